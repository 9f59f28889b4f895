"""Symmetric Laurent polynomials stored in the C1 character basis.

A polynomial ``phi(z) = phi(1/z)`` of degree ``d`` is written as
``sum_i c_i chi_i(z)`` with ``chi_i(z) = (z^(i+1) - z^-(i+1)) / (z - 1/z)``.
Products are formed by convolving the monomial expansions, then mapped back.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np


class SymLaurent:
    """A symmetric Laurent polynomial ``sum_i coeffs[i] * chi_i(z)``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[complex]):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).copy()
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a non-empty 1-d sequence")
        c.setflags(write=False)
        self.coeffs = c

    @classmethod
    def constant(cls, value: complex = 1.0) -> "SymLaurent":
        return cls([value])

    @classmethod
    def character(cls, i: int) -> "SymLaurent":
        """The basis element ``chi_i``."""
        if i < 0:
            raise ValueError("character index must be nonnegative")
        c = np.zeros(i + 1, dtype=complex)
        c[i] = 1.0
        return cls(c)

    @property
    def degree(self) -> int:
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else 0

    def trimmed(self) -> "SymLaurent":
        return SymLaurent(self.coeffs[: self.degree + 1])

    def padded(self, n: int) -> np.ndarray:
        """Coefficient vector ``c_0 .. c_(n-1)`` (zero padded)."""
        out = np.zeros(n, dtype=complex)
        m = min(n, self.coeffs.size)
        out[:m] = self.coeffs[:m]
        if np.any(self.coeffs[m:] != 0):
            raise ValueError(f"polynomial of degree {self.degree} does not fit in {n} coefficients")
        return out

    # -- conversions ------------------------------------------------------
    def to_monomial(self) -> np.ndarray:
        """Coefficients of ``z^-d .. z^d`` (length ``2d+1``)."""
        d = self.coeffs.size - 1
        m = np.zeros(2 * d + 1, dtype=complex)
        for i, c in enumerate(self.coeffs):
            if c != 0:
                m[d - i : d + i + 1 : 2] += c
        return m

    @classmethod
    def from_monomial(cls, m: Sequence[complex]) -> "SymLaurent":
        """Inverse of :meth:`to_monomial`; ``m`` must be palindromic."""
        m = np.asarray(m, dtype=complex)
        if m.size % 2 != 1:
            raise ValueError("monomial vector must have odd length")
        d = m.size // 2
        if not np.allclose(m, m[::-1], rtol=1e-12, atol=1e-12 * max(1.0, np.abs(m).max())):
            raise ValueError("monomial vector is not symmetric under z -> 1/z")
        pos = m[d:]
        c = pos.copy()
        c[:-2] -= pos[2:]
        return cls(c)

    # -- evaluation -------------------------------------------------------
    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        t = z + 1.0 / z
        chi_prev = np.zeros_like(z)
        chi = np.ones_like(z)
        acc = self.coeffs[0] * chi
        for c in self.coeffs[1:]:
            chi_prev, chi = chi, t * chi - chi_prev
            acc = acc + c * chi
        return complex(acc) if acc.ndim == 0 else acc

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, SymLaurent):
            return other
        if np.isscalar(other):
            return SymLaurent.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(self.coeffs.size, other.coeffs.size)
        return SymLaurent(self.padded(n) + other.padded(n))

    __radd__ = __add__

    def __neg__(self):
        return SymLaurent(-self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return SymLaurent(self.coeffs * other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return SymLaurent.from_monomial(np.convolve(self.to_monomial(), other.to_monomial()))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, SymLaurent):
            return NotImplemented
        n = max(self.coeffs.size, other.coeffs.size)
        return bool(np.array_equal(self.padded(n), other.padded(n)))

    __hash__ = None

    def __repr__(self):
        return f"SymLaurent({self.coeffs.tolist()})"


def char_poly(i: int) -> SymLaurent:
    """The irreducible C1 character ``chi_(i)`` as a basis element."""
    return SymLaurent.character(i)


def char_ratio(i: int, z):
    """``chi_(i)(z)`` from its defining ratio (valid away from z = +-1)."""
    z = np.asarray(z, dtype=complex)
    out = (z ** (i + 1) - z ** (-i - 1)) / (z - 1.0 / z)
    return complex(out) if out.ndim == 0 else out
