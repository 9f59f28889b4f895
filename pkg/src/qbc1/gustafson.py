"""BC_n-type multiple Jackson integrals and Gustafson's C_n sum.

The weight is ``Phi_G(z) Delta_Cn(z)`` with ``Phi_G = prod_i Phi(z_i)`` and

    Delta_Cn(z) = prod_i (1 - z_i^2)/z_i  prod_{j<k} (1 - z_j/z_k)(1 - z_j z_k)/z_j.

The pair factor equals ``e(z_j; z_k)``, so the summand factorises into
one-dimensional lattice arrays coupled only through the pair factors.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bc1 import (
    ParameterSet,
    SumResult,
    TruncationPolicy,
    delta,
    e_func,
    jackson_integral,
    lattice_values,
    note_result,
    phi_lattice,
    regularized,
    residual,
)
from .errors import BoxLimitError, DivergenceError, PoleError, SingularWarning
from .laurent import SymLaurent
from .qcore import LogPoint, power_at, qpoch_inf, theta

RADIUS_CAP = {1: 120, 2: 40, 3: 16}


@dataclass(frozen=True)
class MultiPoint:
    """A point ``(x_1, .., x_n)`` of (C*)^n with each component a LogPoint."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps or not all(isinstance(c, LogPoint) for c in comps):
            raise TypeError("MultiPoint needs a non-empty sequence of LogPoint")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_values(cls, values: Sequence[complex], q) -> "MultiPoint":
        return cls(tuple(LogPoint.from_value(v, q) for v in values))

    @property
    def n(self) -> int:
        return len(self.components)

    def values(self) -> np.ndarray:
        return np.array([c.value() for c in self.components])

    def shift(self, i: int, k: int = 1) -> "MultiPoint":
        """Shift the i-th component (0-based) along its lattice."""
        comps = list(self.components)
        comps[i] = comps[i].shift(k)
        return MultiPoint(tuple(comps))

    def swapped(self, i: int, j: int) -> "MultiPoint":
        comps = list(self.components)
        comps[i], comps[j] = comps[j], comps[i]
        return MultiPoint(tuple(comps))

    def inverted(self, i: int) -> "MultiPoint":
        comps = list(self.components)
        comps[i] = comps[i].inverse()
        return MultiPoint(tuple(comps))


def cn_delta(z: np.ndarray) -> complex:
    """``Delta_Cn`` at a single point given as a 1-d array of values."""
    z = np.asarray(z, dtype=complex)
    out = np.prod((1.0 - z * z) / z)
    for j, k in itertools.combinations(range(z.size), 2):
        out *= (1.0 - z[j] / z[k]) * (1.0 - z[j] * z[k]) / z[j]
    return complex(out)


def cn_weight(params: ParameterSet, x: MultiPoint) -> complex:
    """``Phi_G(x) Delta_Cn(x)`` at a single point."""
    phi = 1.0 + 0j
    for p in x.components:
        phi *= complex(phi_lattice(params, p.log_base, [p.nu])[0])
    return phi * cn_delta(x.values())


def _axis_arrays(params, x: MultiPoint, radius: int):
    nus = np.arange(-radius, radius + 1)
    g, zs = [], []
    for p in x.components:
        nu = nus + p.nu
        z = lattice_values(LogPoint(p.log_base, p.q, 0), nu)
        g.append(phi_lattice(params, p.log_base, nu) * delta(z))
        zs.append(z)
    return nus, g, zs


def _box_tensor(params, x: MultiPoint, radius: int) -> np.ndarray:
    n = x.n
    _, g, zs = _axis_arrays(params, x, radius)
    T = np.ones((2 * radius + 1,) * n, dtype=complex)
    for i in range(n):
        shape = [1] * n
        shape[i] = -1
        T = T * g[i].reshape(shape)
    for j, k in itertools.combinations(range(n), 2):
        shape_j = [1] * n
        shape_j[j] = -1
        shape_k = [1] * n
        shape_k[k] = -1
        T = T * e_func(zs[j].reshape(shape_j), zs[k].reshape(shape_k))
    return T


def box_sum(params: ParameterSet, x: MultiPoint, radius: int) -> complex:
    """Fixed-radius cube sum ``(1-q)^n sum_{|nu_i| <= radius}`` (no adaptivity)."""
    T = _box_tensor(params, x, radius)
    return complex(T.sum()) * (1.0 - params.q) ** x.n


def cn_jackson(
    params: ParameterSet,
    x: MultiPoint,
    trunc: TruncationPolicy | None = None,
    radius_cap: int | None = None,
) -> SumResult:
    """The BC_n-type Jackson integral ``<1, x>_G`` by shell-wise cube expansion.

    Shells ``max_i |nu_i| = r`` are accumulated in order; the sum stops at the
    first radius where two consecutive shells are below
    ``tol_abs + tol_rel * |partial|``.
    """
    trunc = trunc or TruncationPolicy()
    n = x.n
    if n > 3:
        raise ValueError("multiple sums are limited to n <= 3")
    cap = radius_cap or RADIUS_CAP[n]
    radius = min(cap, 12)
    while True:
        res = _shell_sum(params, x, radius, trunc)
        if res is not None:
            return res
        if radius >= cap:
            raise BoxLimitError(f"no convergence within radius {cap}")
        radius = min(cap, 2 * radius)


def _shell_sum(params, x: MultiPoint, radius: int, trunc: TruncationPolicy):
    n = x.n
    T = _box_tensor(params, x, radius)
    if not np.all(np.isfinite(T)):
        raise DivergenceError("non-finite term inside the summation box")
    idx = np.indices(T.shape) - radius
    shell = np.max(np.abs(idx), axis=0).ravel()
    flat = T.ravel()
    re = np.bincount(shell, weights=flat.real, minlength=radius + 1)
    im = np.bincount(shell, weights=flat.imag, minlength=radius + 1)
    shells = re + 1j * im
    mags = np.abs(shells)
    partial = np.cumsum(shells)
    grow = 0
    for r in range(1, radius + 1):
        grow = grow + 1 if mags[r] > mags[r - 1] > 0 else 0
        if grow >= trunc.diverge_after:
            raise DivergenceError("shell contributions keep growing")
        thr = trunc.tol_abs + trunc.tol_rel * abs(partial[r])
        if r >= 2 and mags[r] <= thr and mags[r - 1] <= thr:
            inside = shell <= r
            used = int(np.sum(inside))
            rounding = 4 * np.finfo(float).eps * float(np.sum(np.abs(flat[inside])))
            err = float(mags[r] + mags[r - 1]) + rounding
            scale = (1.0 - params.q) ** n
            return note_result(SumResult(complex(partial[r]) * scale, err * scale, used, True))
    return None


def cn_big_theta(params: ParameterSet, x: MultiPoint) -> complex:
    """``Theta_G``: component i carries the power ``x_i^(i - sum alpha)``."""
    out = 1.0 + 0j
    sa = params.sum_alpha
    for i, p in enumerate(x.components, start=1):
        z = p.value()
        den = 1.0 + 0j
        for log_a in params.log_a:
            den *= complex(theta(np.exp(p.log_base + log_a) * p.q**p.nu, params.q))
        if den == 0:
            raise PoleError("Theta_G has a pole at this point")
        out *= complex(power_at(p, i - sa)) * complex(theta(z * z, params.q)) / den
    out *= pair_theta(x.values(), params.q, divide=False)
    return out


def pair_theta(z: np.ndarray, q, divide: bool = True) -> complex:
    """``prod_{j<k} theta(z_j/z_k) theta(z_j z_k)`` (divided by ``z_j`` if asked)."""
    out = 1.0 + 0j
    for j, k in itertools.combinations(range(len(z)), 2):
        f = complex(theta(z[j] / z[k], q)) * complex(theta(z[j] * z[k], q))
        out *= f / z[j] if divide else f
    return out


def cn_regularized(
    params: ParameterSet,
    x: MultiPoint,
    trunc: TruncationPolicy | None = None,
    radius_cap: int | None = None,
) -> SumResult:
    """``<<1, x>>_G = <1, x>_G / Theta_G(x)``."""
    res = cn_jackson(params, x, trunc, radius_cap)
    th = cn_big_theta(params, x)
    return SumResult(res.value / th, res.abs_err_estimate / abs(th), res.terms_used, res.converged)


def gustafson_product(params: ParameterSet, n: int | None = None) -> complex:
    """Closed form of ``<<1, x>>_G`` when ``s = n``."""
    n = params.s if n is None else n
    if n != params.s:
        raise ValueError("the product formula needs s = n")
    q = params.q
    a = params.a
    num = (1.0 - q) ** n * complex(qpoch_inf(q, q)) ** n
    for i, j in itertools.combinations(range(a.size), 2):
        num *= complex(qpoch_inf(q / (a[i] * a[j]), q))
    return num / complex(qpoch_inf(q / params.prod_a, q))


def det_relation(
    params: ParameterSet,
    x: MultiPoint,
    trunc: TruncationPolicy | None = None,
    regularize: bool = True,
) -> tuple:
    """Both sides of the BC1 determinant relation.

    Left: ``det(<<chi_(n-i), x_j>>)``.  Right: ``<<1, x>>_G prod_{j<k}
    theta(x_j/x_k) theta(x_j x_k) / x_j``.  With ``regularize=False`` the
    unregularized form ``det(<chi_(n-i), x_j>) = <1, x>_G`` is returned.
    """
    n = x.n
    rows = []
    for i in range(1, n + 1):
        chi = SymLaurent.character(n - i)
        if regularize:
            rows.append([regularized(params, chi, p, trunc).value for p in x.components])
        else:
            rows.append([jackson_integral(params, chi, p, trunc).value for p in x.components])
    lhs = complex(np.linalg.det(np.array(rows, dtype=complex)))
    if regularize:
        pref = pair_theta(x.values(), params.q)
        if abs(pref) < 1e-8:
            warnings.warn("theta prefactor is nearly zero", SingularWarning, stacklevel=2)
        rhs = cn_regularized(params, x, trunc).value * pref
    else:
        rhs = cn_jackson(params, x, trunc).value
    return lhs, rhs


def det_relation_residual(
    params: ParameterSet,
    x: MultiPoint,
    trunc: TruncationPolicy | None = None,
    regularize: bool = True,
) -> float:
    return residual(*det_relation(params, x, trunc, regularize))


def bc1_bridge(params: ParameterSet, p: LogPoint) -> complex:
    """Ratio of the n = 1 multiple summand to the BC1 summand (identically 1)."""
    single = complex(phi_lattice(params, p.log_base, [p.nu])[0]) * delta(p.value())
    return cn_weight(params, MultiPoint((p,))) / single
