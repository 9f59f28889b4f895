"""Scalar kernels: q-shifted factorials, the theta function and
branch-consistent powers on a q-lattice.

All kernels accept numpy arrays as well as Python scalars and return an
object of the same shape (a Python ``complex`` for scalar input).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PoleError

DEFAULT_TOL = 1e-14
MAX_FACTORS = 10_000


@dataclass(frozen=True)
class QBase:
    """The base ``q`` of all q-series, restricted to the open interval (0, 1)."""

    q: float

    def __post_init__(self):
        q = float(self.q)
        if not (0.0 < q < 1.0) or not math.isfinite(q):
            raise ValueError(f"q must lie strictly inside (0, 1), got {self.q!r}")
        object.__setattr__(self, "q", q)

    @property
    def log(self) -> float:
        return math.log(self.q)

    def __float__(self):
        return self.q


def qvalue(q) -> float:
    """Return ``q`` as a validated float (accepts floats and :class:`QBase`)."""
    if isinstance(q, QBase):
        return q.q
    return QBase(q).q


def _as_complex_array(x):
    arr = np.asarray(x, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite input to a q-series kernel")
    return arr


def _unwrap(arr: np.ndarray):
    if arr.ndim == 0:
        return complex(arr)
    return arr


def _n_factors(xmax: float, q: float, tol: float) -> int:
    if xmax == 0.0:
        return 1
    n = math.ceil(math.log(tol * (1.0 - q) / xmax) / math.log(q))
    return int(min(max(n, 1), MAX_FACTORS))


def qpoch_inf(x, q, tol: float = DEFAULT_TOL):
    """Infinite q-shifted factorial ``(x; q)_inf = prod_{i>=0} (1 - q^i x)``.

    The product is truncated once ``|x| q^N < tol (1 - q)``, which bounds the
    relative error of the omitted tail by roughly ``tol``.

    >>> round(qpoch_inf(0.5, 0.5).real, 10)
    0.2887880951
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    q = qvalue(q)
    x = _as_complex_array(x)
    n = _n_factors(float(np.max(np.abs(x), initial=0.0)), q, tol)
    powers = q ** np.arange(n, dtype=float)
    out = np.prod(1.0 - x[..., None] * powers, axis=-1)
    return _unwrap(out)


def lattice_qpoch(w, start, q, tol: float = DEFAULT_TOL):
    """``prod_{k>=0} (1 - w q^(start+k))`` with integer exponents kept exact.

    ``start`` may be an integer array (broadcast against ``w``).  Because the
    power of ``q`` is formed from an integer exponent, a factor is exactly
    zero whenever ``w == 1`` and ``start + k == 0``; this is how lattice
    points lying on a zero of a q-shifted factorial are detected.
    """
    q = qvalue(q)
    w = _as_complex_array(w)
    start = np.asarray(start, dtype=np.int64)
    w, start = np.broadcast_arrays(w, start)
    if w.size == 0:
        return _unwrap(np.ones(w.shape, dtype=complex))
    # largest factor argument governs the truncation length
    lead = np.abs(w) * q ** start.astype(float)
    n = _n_factors(float(np.max(lead)), q, tol)
    expo = start[..., None] + np.arange(n)
    out = np.prod(1.0 - w[..., None] * q ** expo.astype(float), axis=-1)
    return _unwrap(out)


def lattice_qpoch_ratio(w_num, start_num, w_den, start_den, q, tol: float = DEFAULT_TOL):
    """Ratio of two :func:`lattice_qpoch` products, formed factor by factor.

    Pairing the k-th numerator factor with the k-th denominator factor keeps
    the result representable when both products are individually huge
    (far out on the lattice).  Raises :class:`PoleError` when a denominator
    factor is exactly zero.
    """
    q = qvalue(q)
    w_num, start_num, w_den, start_den = np.broadcast_arrays(
        _as_complex_array(w_num),
        np.asarray(start_num, dtype=np.int64),
        _as_complex_array(w_den),
        np.asarray(start_den, dtype=np.int64),
    )
    if w_num.size == 0:
        return _unwrap(np.ones(w_num.shape, dtype=complex))
    lead = max(
        float(np.max(np.abs(w_num) * q ** start_num.astype(float))),
        float(np.max(np.abs(w_den) * q ** start_den.astype(float))),
    )
    n = _n_factors(lead, q, tol)
    k = np.arange(n)
    num = 1.0 - w_num[..., None] * q ** (start_num[..., None] + k).astype(float)
    den = 1.0 - w_den[..., None] * q ** (start_den[..., None] + k).astype(float)
    if np.any(den == 0):
        raise PoleError("a denominator q-shifted factorial vanishes on the lattice")
    return _unwrap(np.prod(num / den, axis=-1))


def qpoch_int(x, q, n: int):
    """Finite q-shifted factorial ``(x)_n = (x)_inf / (q^n x)_inf`` for any integer n."""
    q = qvalue(q)
    n = int(n)
    x = complex(x)
    if not (math.isfinite(x.real) and math.isfinite(x.imag)):
        raise ValueError("non-finite input to qpoch_int")
    if n >= 0:
        out = 1.0 + 0j
        for k in range(n):
            out *= 1.0 - q**k * x
        return out
    den = 1.0 + 0j
    for k in range(n, 0):
        den *= 1.0 - q**k * x
    if den == 0:
        raise PoleError(f"(x)_{n} has a vanishing denominator factor at x={x}")
    return 1.0 / den


def theta(z, q, tol: float = DEFAULT_TOL):
    """Theta function ``theta(z) = (z)_inf (q/z)_inf``.

    Satisfies ``theta(q z) = -theta(z)/z`` and ``theta(q/z) = theta(z)``.
    """
    q = qvalue(q)
    z = _as_complex_array(z)
    if np.any(z == 0):
        raise ValueError("theta is undefined at z = 0")
    out = np.asarray(qpoch_inf(z, q, tol)) * np.asarray(qpoch_inf(q / z, q, tol))
    return _unwrap(out)


@dataclass(frozen=True)
class LogPoint:
    """The point ``q^nu * exp(log_base)`` of C*, carried with its logarithm.

    Keeping the logarithm around makes complex powers ``z^c`` consistent
    along the lattice ``q^Z xi``: moving ``nu`` by one multiplies ``z^c``
    by ``q^c`` exactly, whatever the branch of ``xi``.
    """

    log_base: complex
    q: float
    nu: int = 0

    def __post_init__(self):
        object.__setattr__(self, "log_base", complex(self.log_base))
        object.__setattr__(self, "q", qvalue(self.q))
        object.__setattr__(self, "nu", int(self.nu))
        if not math.isfinite(abs(self.log_base)):
            raise ValueError("log_base must be finite")

    @classmethod
    def from_value(cls, z, q, nu: int = 0) -> "LogPoint":
        """Wrap a nonzero complex number using its principal logarithm."""
        z = complex(z)
        if z == 0:
            raise ValueError("LogPoint cannot represent 0")
        return cls(np.log(z), q, nu)

    @property
    def log_q(self) -> float:
        return math.log(self.q)

    def log(self) -> complex:
        return self.log_base + self.nu * self.log_q

    def value(self) -> complex:
        return complex(np.exp(self.log_base) * self.q**self.nu)

    def shift(self, k: int = 1) -> "LogPoint":
        return LogPoint(self.log_base, self.q, self.nu + int(k))

    def inverse(self) -> "LogPoint":
        """The point ``1/z``, with logarithm ``-log z``."""
        return LogPoint(-self.log_base, self.q, -self.nu)

    def scaled(self, log_factor: complex) -> "LogPoint":
        """The point ``exp(log_factor) * z`` (same lattice offset)."""
        return LogPoint(self.log_base + log_factor, self.q, self.nu)

    def power(self, c):
        return power_at(self, c)


def power_at(p: LogPoint, c):
    """``z^c`` for ``z = q^nu exp(log_base)``, computed from the stored logarithm."""
    c = np.asarray(c, dtype=complex)
    out = np.exp(c * p.log_base + c * (p.nu * p.log_q))
    return _unwrap(out)


def lattice_power(log_base: complex, nu, q, c):
    """Vectorized :func:`power_at` over an integer array of lattice offsets."""
    q = qvalue(q)
    nu = np.asarray(nu, dtype=float)
    c = complex(c)
    return _unwrap(np.exp(c * complex(log_base) + c * nu * math.log(q)))
