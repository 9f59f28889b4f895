"""The BC1-type Jackson integral.

For parameters ``a_m = q^alpha_m`` (m = 1 .. 2s+2) the weight is

    Phi(z) = prod_m z^(1/2 - alpha_m) (q z / a_m)_inf / (z a_m)_inf,
    Delta(z) = 1/z - z,

and ``<phi, xi> = (1 - q) sum_{nu in Z} phi(z) Phi(z) Delta(z)`` at
``z = q^nu xi``.  Parameter indices in this package are 1-based, matching
``a_1 .. a_{2s+2}``.
"""

from __future__ import annotations

import contextlib
import contextvars
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DegenerateError, DivergenceError, PoleError, SingularError
from .laurent import SymLaurent
from .qcore import (
    LogPoint,
    lattice_power,
    lattice_qpoch_ratio,
    power_at,
    qvalue,
    theta,
)

BALANCE_TOL = 1e-12

_RECORDER: contextvars.ContextVar = contextvars.ContextVar("qbc1_recorder", default=None)


@contextlib.contextmanager
def record_sums():
    """Collect every lattice sum and quadrature result produced inside the block."""
    log: list = []
    token = _RECORDER.set(log)
    try:
        yield log
    finally:
        _RECORDER.reset(token)


def note_result(result):
    log = _RECORDER.get()
    if log is not None:
        log.append(result)
    return result


class Balancing(enum.Enum):
    GENERIC = "generic"
    PRODUCT_ONE = "product-one"  # a_1 ... a_{2s+2} = 1
    PRODUCT_Q = "product-q"  # a_1 ... a_{2s+2} = q


def classify_balancing(sum_alpha: complex) -> Balancing:
    if abs(sum_alpha) < BALANCE_TOL:
        return Balancing.PRODUCT_ONE
    if abs(sum_alpha - 1.0) < BALANCE_TOL:
        return Balancing.PRODUCT_Q
    return Balancing.GENERIC


@dataclass(frozen=True)
class ParameterSet:
    """Base ``q`` and exponents ``alpha_1 .. alpha_{2s+2}``.

    ``balancing`` is always recomputed from ``sum(alpha)``; passing a value
    other than ``None`` asserts it and raises :class:`BalancedError` on
    mismatch.
    """

    q: float
    alpha: tuple
    balancing: Balancing | None = None
    s: int = field(init=False)

    def __post_init__(self):
        from .errors import BalancedError

        q = qvalue(self.q)
        alpha = tuple(complex(x) for x in np.ravel(np.asarray(self.alpha, dtype=complex)))
        if len(alpha) < 4 or len(alpha) % 2:
            raise ValueError(f"need 2s+2 >= 4 exponents, got {len(alpha)}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "s", len(alpha) // 2 - 1)
        actual = classify_balancing(sum(alpha))
        if self.balancing is not None and Balancing(self.balancing) is not actual:
            raise BalancedError(
                f"parameters are {actual.value}, expected {Balancing(self.balancing).value}"
            )
        object.__setattr__(self, "balancing", actual)

    @classmethod
    def balanced(cls, q, free_alpha: Sequence[complex], mode: Balancing) -> "ParameterSet":
        """Append the last exponent so that the product of the a's is 1 or q."""
        target = {Balancing.PRODUCT_ONE: 0.0, Balancing.PRODUCT_Q: 1.0}[Balancing(mode)]
        free = [complex(x) for x in free_alpha]
        return cls(q, tuple(free) + (target - sum(free),), mode)

    @classmethod
    def from_a(cls, q, a: Sequence[complex], balancing=None) -> "ParameterSet":
        """Build from the a's directly, using principal logarithms."""
        lq = math.log(qvalue(q))
        return cls(q, tuple(np.log(np.asarray(a, dtype=complex)) / lq), balancing)

    @property
    def log_q(self) -> float:
        return math.log(self.q)

    @property
    def n_params(self) -> int:
        return len(self.alpha)

    @property
    def alpha_array(self) -> np.ndarray:
        return np.array(self.alpha, dtype=complex)

    @property
    def log_a(self) -> np.ndarray:
        return self.alpha_array * self.log_q

    @property
    def a(self) -> np.ndarray:
        return np.exp(self.log_a)

    def a_(self, i: int) -> complex:
        """``a_i`` for a 1-based index."""
        return complex(np.exp(self.alpha[self._idx(i)] * self.log_q))

    @property
    def sum_alpha(self) -> complex:
        return complex(sum(self.alpha))

    @property
    def prod_a(self) -> complex:
        return complex(np.exp(self.sum_alpha * self.log_q))

    def _idx(self, i: int) -> int:
        if not 1 <= i <= self.n_params:
            raise IndexError(f"parameter index {i} outside 1..{self.n_params}")
        return i - 1

    def log_point(self, i: int, nu: int = 0) -> LogPoint:
        """The point ``a_i`` as a LogPoint whose logarithm is ``alpha_i ln q``."""
        return LogPoint(self.alpha[self._idx(i)] * self.log_q, self.q, nu)

    def check_distinct(self, tol: float = 1e-10):
        a = self.a
        d = np.abs(a[:, None] - a[None, :]) + np.eye(a.size)
        if np.min(d) < tol:
            raise DegenerateError("parameters a_i must be pairwise distinct")


def shift_alpha(params: ParameterSet, j: int, delta: int = 1) -> ParameterSet:
    """The q-shift ``a_j -> q^delta a_j`` (``alpha_j -> alpha_j + delta``)."""
    return shift_alphas(params, {j: delta})


def shift_alphas(params: ParameterSet, shifts: dict) -> ParameterSet:
    alpha = list(params.alpha)
    for j, delta in shifts.items():
        alpha[params._idx(j)] += int(delta)
    return ParameterSet(params.q, tuple(alpha))


# -- the e(x; y) algebra ---------------------------------------------------


def e_func(x, y):
    """``e(x; y) = x + 1/x - (y + 1/y)``."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if np.any(x == 0) or np.any(y == 0):
        raise ValueError("e(x; y) requires nonzero arguments")
    out = x + 1.0 / x - (y + 1.0 / y)
    return complex(out) if out.ndim == 0 else out


def e_poly(a: complex) -> SymLaurent:
    """``z -> e(z; a) = chi_1(z) - (a + 1/a)``."""
    a = complex(a)
    return SymLaurent([-(a + 1.0 / a), 1.0])


def e_product(params: ParameterSet, indices: Iterable[int]) -> SymLaurent:
    """``prod_k e(z; a_{i_k})``; the empty product is the constant 1."""
    out = SymLaurent.constant(1.0)
    for i in indices:
        out = out * e_poly(params.a_(i))
    return out


def basis_v(params: ParameterSet, fixed: Sequence[int]) -> list:
    """``[v_0, v_1, .., v_{s-1}]``: v_0 multiplies all e's, v_k omits the k-th."""
    fixed = list(fixed)
    if len(fixed) != params.s - 1:
        raise IndexError(f"need s-1 = {params.s - 1} fixed indices, got {len(fixed)}")
    if len(set(fixed)) != len(fixed):
        raise IndexError("fixed indices must be distinct")
    for i in fixed:
        params._idx(i)
    out = [e_product(params, fixed)]
    for k in range(len(fixed)):
        out.append(e_product(params, fixed[:k] + fixed[k + 1 :]))
    return out


def expand_in_char(polys: Sequence[SymLaurent], cond_limit: float = 1e12) -> np.ndarray:
    """Transition matrix ``T`` with ``(chi_{n-1}, .., chi_0) = (polys) T``."""
    n = len(polys)
    # row r holds the coefficient of chi_{n-1-r}
    C = np.column_stack([p.padded(n)[::-1] for p in polys])
    if np.linalg.cond(C) > cond_limit:
        raise SingularError("polynomials do not form a well-conditioned basis")
    return np.linalg.solve(C, np.eye(n, dtype=complex))


# -- weight and lattice sums -----------------------------------------------


def phi_lattice(params: ParameterSet, log_base: complex, nu) -> np.ndarray:
    """``Phi(q^nu xi)`` for an integer array ``nu``, with ``xi = exp(log_base)``."""
    nu = np.atleast_1d(np.asarray(nu, dtype=np.int64))
    log_a = params.log_a[:, None]
    w = np.exp(log_base - log_a)  # (q z / a_m) = w q^(nu+1)
    u = np.exp(log_base + log_a)  # (z a_m) = u q^nu
    ratio = lattice_qpoch_ratio(w, nu[None, :] + 1, u, nu[None, :], params.q)
    power = lattice_power(log_base, nu, params.q, (params.s + 1) - params.sum_alpha)
    return np.atleast_1d(power) * np.prod(np.atleast_1d(ratio), axis=0)


def phi_weight(params: ParameterSet, p: LogPoint) -> complex:
    """The weight ``Phi`` at a single lattice point."""
    return complex(phi_lattice(params, p.log_base, [p.nu])[0])


def phi_ratio(params: ParameterSet, z):
    """``Phi(q z) / Phi(z) = q^(s+1) prod_m (1 - a_m z) / (a_m - q z)``."""
    z = np.asarray(z, dtype=complex)
    a = params.a.reshape((-1,) + (1,) * z.ndim)
    out = params.q ** (params.s + 1) * np.prod((1.0 - a * z) / (a - params.q * z), axis=0)
    return complex(out) if out.ndim == 0 else out


def lattice_values(p: LogPoint, nu) -> np.ndarray:
    nu = np.asarray(nu, dtype=np.int64)
    return np.exp(p.log_base) * p.q ** nu.astype(float)


def delta(z):
    """The skew-symmetric factor ``Delta(z) = 1/z - z``."""
    z = np.asarray(z, dtype=complex)
    out = 1.0 / z - z
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TruncationPolicy:
    """Stopping rule for adaptive two-sided lattice summation.

    A tail stops after ``window`` consecutive terms smaller than
    ``tol_abs + tol_rel * scale``, where ``scale`` is the larger of the
    running partial sum and the largest term seen so far.
    """

    tol_rel: float = 1e-13
    tol_abs: float = 0.0
    window: int = 8
    max_terms: int = 5000
    diverge_after: int = 32
    block: int = 16


@dataclass(frozen=True)
class SumResult:
    value: complex
    abs_err_estimate: float
    terms_used: int
    converged: bool

    def __complex__(self):
        return complex(self.value)


def _tail_error(mags: list) -> float:
    if len(mags) < 2 or mags[-1] == 0.0:
        return 0.0
    r = mags[-1] / mags[-2] if mags[-2] > 0 else 1.0
    if r >= 1.0:
        return mags[-1] * len(mags)
    return mags[-1] * r / (1.0 - r)


def bilateral_sum(term_fn: Callable, trunc: TruncationPolicy | None = None) -> SumResult:
    """``sum_{nu in Z} term_fn(nu)`` by expanding both tails from ``nu = 0``.

    ``term_fn`` maps an integer array to a complex array.  The result is not
    multiplied by ``1 - q``.
    """
    trunc = trunc or TruncationPolicy()
    t0 = complex(np.asarray(term_fn(np.array([0])))[0])
    terms = [t0]
    partial = t0
    peak = abs(t0)
    converged = True
    tail_err = 0.0
    for direction in (1, -1):
        small = grow = 0
        prev = abs(t0)
        mags: list = []
        start = direction
        done = False
        count = 0
        while not done:
            nus = start + direction * np.arange(trunc.block)
            start = int(nus[-1]) + direction
            block = np.asarray(term_fn(nus), dtype=complex)
            for t in block:
                t = complex(t)
                if not (math.isfinite(t.real) and math.isfinite(t.imag)):
                    raise DivergenceError("non-finite lattice term")
                terms.append(t)
                partial += t
                m = abs(t)
                mags.append(m)
                peak = max(peak, m)
                count += 1
                if m <= trunc.tol_abs + trunc.tol_rel * max(abs(partial), peak):
                    small += 1
                else:
                    small = 0
                grow = grow + 1 if (m > prev and prev > 0) else 0
                prev = m
                if grow >= trunc.diverge_after:
                    raise DivergenceError(
                        f"lattice tail in direction {direction:+d} grew for {grow} steps"
                    )
                if small >= trunc.window:
                    done = True
                    break
                if count >= trunc.max_terms:
                    converged = False
                    done = True
                    break
        tail_err += _tail_error(mags)
    value = complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))
    round_err = 4.0 * np.finfo(float).eps * sum(abs(t) for t in terms)
    return note_result(SumResult(value, tail_err + round_err, len(terms), converged))


def scale_sum(res: SumResult, factor: complex) -> SumResult:
    return SumResult(
        res.value * factor, res.abs_err_estimate * abs(factor), res.terms_used, res.converged
    )


def convergence_margin(params: ParameterSet, degree: int) -> float:
    """``s - degree - Re sum(alpha)``; the lattice sum converges iff positive."""
    return params.s - degree - params.sum_alpha.real


def weighted_lattice_sum(
    params: ParameterSet,
    fn: Callable,
    xi: LogPoint,
    trunc: TruncationPolicy | None = None,
) -> SumResult:
    """``(1 - q) sum_nu Phi(z) fn(z)`` over ``z = q^nu xi``."""

    def term(nu):
        nu = nu + xi.nu
        z = lattice_values(LogPoint(xi.log_base, xi.q, 0), nu)
        return phi_lattice(params, xi.log_base, nu) * fn(z)

    return scale_sum(bilateral_sum(term, trunc), 1.0 - params.q)


def jackson_integral(
    params: ParameterSet,
    phi: SymLaurent,
    xi: LogPoint,
    trunc: TruncationPolicy | None = None,
) -> SumResult:
    """The BC1-type Jackson integral ``<phi, xi>``."""
    if convergence_margin(params, phi.degree) <= 0:
        raise DivergenceError(
            f"degree {phi.degree} + Re sum(alpha) = "
            f"{phi.degree + params.sum_alpha.real:.4g} is not below s = {params.s}"
        )
    return weighted_lattice_sum(params, lambda z: phi(z) * delta(z), xi, trunc)


def nabla(params: ParameterSet, psi: Callable) -> Callable:
    """``z -> psi(z) - Phi(qz)/Phi(z) psi(qz)``."""

    def out(z):
        return psi(z) - phi_ratio(params, z) * psi(params.q * np.asarray(z))

    return out


def big_theta(params: ParameterSet, p: LogPoint) -> complex:
    """``Theta(z) = z^(s - sum alpha) theta(z^2) / prod_m theta(a_m z)``."""
    z = p.value()
    den = 1.0 + 0j
    for log_a in params.log_a:
        den *= complex(theta(np.exp(p.log_base + log_a) * p.q**p.nu, params.q))
    if den == 0:
        raise PoleError("Theta has a pole at this point")
    return complex(power_at(p, params.s - params.sum_alpha)) * complex(theta(z * z, params.q)) / den


def regularized(
    params: ParameterSet,
    phi: SymLaurent,
    xi: LogPoint,
    trunc: TruncationPolicy | None = None,
) -> SumResult:
    """The regularized integral ``<<phi, xi>> = <phi, xi> / Theta(xi)``."""
    frac = (params.sum_alpha.real - 0.5) % 1.0
    if min(frac, 1.0 - frac) < 1e-8 and abs(params.sum_alpha.imag) < 1e-8:
        raise ValueError("regularization requires sum(alpha) outside 1/2 + Z")
    res = jackson_integral(params, phi, xi, trunc)
    return scale_sum(res, 1.0 / big_theta(params, xi))


def default_xi(q, rng: np.random.Generator | None = None, jitter: float = 0.05) -> LogPoint:
    """Base point ``1.07`` with an optional small random imaginary jitter."""
    im = 0.0 if rng is None else float(rng.uniform(-jitter, jitter))
    return LogPoint(complex(math.log(1.07), im), q)


def residual(lhs, rhs) -> float:
    """Mixed absolute/relative identity residual ``|L - R| / (1 + max(|L|, |R|))``."""
    lhs = np.asarray(lhs, dtype=complex)
    rhs = np.asarray(rhs, dtype=complex)
    num = np.abs(lhs - rhs)
    den = 1.0 + np.maximum(np.abs(lhs), np.abs(rhs))
    return float(np.max(num / den))
