"""Unit-circle quadrature for the balanced integrals and their residue sums.

The integrals live under ``a_1 ... a_{2s+2} = q`` with ``|a_i| < 1`` for the
free parameters.  Their integrands are analytic in an annulus around the
unit circle, so the trapezoid rule on roots of unity converges
geometrically.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bc1 import (
    Balancing,
    ParameterSet,
    TruncationPolicy,
    jackson_integral,
    note_result,
    residual,
    shift_alphas,
)
from .errors import (
    BalancedError,
    DegenerateError,
    NonConvergenceError,
    PoleProximityWarning,
)
from .gustafson import MultiPoint, cn_jackson
from .laurent import SymLaurent
from .qcore import qpoch_inf, qpoch_int, theta

MAX_POINTS = 2**20
GRID_CAP = {1: 2048, 2: 512}
POLE_WARN = 1e-3
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    points_used: int
    est_error: float
    pole_margin: float


def _nodes(M: int, odd_only: bool = False) -> np.ndarray:
    k = np.arange(1, M, 2) if odd_only else np.arange(M)
    return np.exp(2j * np.pi * k / M)


def circle_quadrature(
    f: Callable[[np.ndarray], np.ndarray],
    M0: int = 32,
    tol: float = 1e-13,
    pole_margin: float = math.inf,
    max_points: int = MAX_POINTS,
) -> QuadratureResult:
    """``(1/2 pi i) \\oint f(z) dz/z`` over ``|z| = 1`` by the trapezoid rule.

    ``f`` is evaluated on arrays of nodes.  The number of nodes doubles from
    ``M0``, reusing the previous nodes, until two successive estimates differ
    by less than ``tol``.

    >>> circle_quadrature(lambda z: z**5 + 1.0).value
    (1+0j)
    """
    if M0 < 1:
        raise ValueError("M0 must be positive")
    if pole_margin < POLE_WARN:
        warnings.warn(
            f"integrand pole within {pole_margin:.2e} of the unit circle",
            PoleProximityWarning,
            stacklevel=2,
        )
    M = int(M0)
    vals = np.asarray(f(_nodes(M)), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise NonConvergenceError("integrand is not finite on the unit circle")
    current = complex(vals.mean())
    while 2 * M <= max_points:
        extra = np.asarray(f(_nodes(2 * M, odd_only=True)), dtype=complex)
        if not np.all(np.isfinite(extra)):
            raise NonConvergenceError("integrand is not finite on the unit circle")
        refined = 0.5 * (current + complex(extra.mean()))
        M *= 2
        err = abs(refined - current)
        if err < tol:
            return note_result(QuadratureResult(refined, M, float(err), float(pole_margin)))
        current = refined
    raise NonConvergenceError(f"trapezoid rule did not settle within {max_points} nodes")


def _require_product_q(params: ParameterSet, s: int | None = None):
    if params.balancing is not Balancing.PRODUCT_Q:
        raise BalancedError("the integral needs a_1 ... a_{2s+2} = q")
    if s is not None and params.s != s:
        raise ValueError(f"this integral needs s = {s}, got s = {params.s}")


def _free_margin(params: ParameterSet) -> float:
    free = np.abs(params.a[:-1])
    return float(1.0 - free.max())


def _single_weight(params: ParameterSet, z: np.ndarray) -> np.ndarray:
    q = params.q
    a = params.a
    last = a[-1]
    num = qpoch_inf(q * z / last, q) * qpoch_inf(q / (last * z), q)
    num = num * qpoch_inf(z * z, q) * qpoch_inf(1.0 / (z * z), q)
    den = np.ones_like(z)
    for am in a[:-1]:
        den = den * qpoch_inf(am * z, q) * qpoch_inf(am / z, q)
    return num / den


def _check_inside(params: ParameterSet) -> float:
    margin = _free_margin(params)
    if margin <= 0:
        raise ValueError("the free parameters must satisfy |a_i| < 1")
    return margin


def nr_lhs(params: ParameterSet, tol: float = 1e-13, M0: int = 64) -> QuadratureResult:
    """The six-parameter balanced contour integral over the unit circle."""
    _require_product_q(params, 2)
    margin = _check_inside(params)
    return circle_quadrature(lambda z: _single_weight(params, z), M0, tol, margin)


def _pair_rhs(params: ParameterSet) -> complex:
    q = params.q
    a = params.a
    last = a[-1]
    num = complex(np.prod(qpoch_inf(q / (last * a[:-1]), q)))
    den = 1.0 + 0j
    for i, j in itertools.combinations(range(a.size - 1), 2):
        den *= complex(qpoch_inf(a[i] * a[j], q))
    return num / den


def nr_rhs(params: ParameterSet) -> complex:
    """Closed product for :func:`nr_lhs`."""
    _require_product_q(params, 2)
    return 2.0 * _pair_rhs(params) / complex(qpoch_inf(params.q, params.q))


def _theta_ratio_factor(params: ParameterSet, k: int) -> complex:
    q = params.q
    a = params.a
    ak = params.a_(k)
    last = a[-1]
    den = complex((qpoch_inf(q, q)) ** 2) * ak
    for m in range(1, params.n_params):
        if m != k:
            den *= complex(theta(params.a_(m) / ak, q))
    if abs(den) < DEGENERACY_TOL:
        raise DegenerateError(f"theta factor vanishes at a_{k}")
    return complex(theta(q / (last * ak), q)) * complex(theta(ak**-2, q)) / den


def residue_coeff_R(params: ParameterSet, k: int) -> complex:
    """Residue at ``z = a_k`` of the q-periodic theta quotient (k = 1..5)."""
    _require_product_q(params, 2)
    if not 1 <= k < params.n_params:
        raise IndexError(f"k must lie in 1..{params.n_params - 1}")
    return _theta_ratio_factor(params, k)


def residue_coeff_Rmu(params: ParameterSet, mu: Sequence[int], periodic: bool = True) -> complex:
    """Multiple residue at ``z = (a_{mu_1}, .., a_{mu_n})`` with ``s = n + 1``.

    The theta quotient ``prod_i [theta(q/(a_last z_i)) theta(z_i^-2) / (z_i prod_m
    theta(a_m/z_i))] prod_{j<k} theta(z_k/z_j) theta(1/(z_j z_k))`` is invariant
    under ``z_1 -> q z_1`` but gains a factor ``q^(i-1)`` under ``z_i -> q z_i``.
    Dividing it by ``prod_i z_i^(i-1)`` gives the q-periodic factor that turns
    the integrand into ``(periodic) * Phi_G Delta_Cn``; with ``periodic=True``
    (default) the residue of that factor is returned, otherwise the residue of
    the undivided quotient.  The two agree for n = 1.
    """
    _require_product_q(params)
    mu = tuple(int(m) for m in mu)
    n = params.s - 1
    if len(mu) != n or any(b <= a for a, b in zip(mu, mu[1:])):
        raise IndexError(f"mu must be {n} strictly increasing indices")
    if not all(1 <= m < params.n_params for m in mu):
        raise IndexError(f"indices must lie in 1..{params.n_params - 1}")
    out = 1.0 + 0j
    for m in mu:
        out *= _theta_ratio_factor(params, m)
    q = params.q
    for j, k in itertools.combinations(mu, 2):
        zj, zk = params.a_(j), params.a_(k)
        out *= complex(theta(zk / zj, q)) * complex(theta(1.0 / (zj * zk), q))
    if periodic:
        for i, m in enumerate(mu):
            out /= params.a_(m) ** i
    return out


def rmu_shift_factor(params: ParameterSet, j: int) -> complex:
    """Multiplier of the periodic ``R_mu`` under the coupled shift of ``a_j``:
    ``(a_j a_last / q)^n``."""
    _require_product_q(params)
    if not 1 <= j < params.n_params:
        raise IndexError(f"j must lie in 1..{params.n_params - 1}")
    return complex(params.a_(j) * params.a[-1] / params.q) ** (params.s - 1)


def residue_sum(params: ParameterSet, trunc: TruncationPolicy | None = None) -> complex:
    """``sum_k R_k <1, a_k> / (1 - q)`` for the six-parameter case.

    The Jackson integral carries a factor ``(1 - q)`` that the residue sum
    does not, hence the division.
    """
    _require_product_q(params, 2)
    one = SymLaurent.constant(1.0)
    total = 0j
    for k in range(1, params.n_params):
        xi = params.log_point(k)
        total += residue_coeff_R(params, k) * jackson_integral(params, one, xi, trunc).value
    return total / (1.0 - params.q)


def residue_decomposition_residual(
    params: ParameterSet, trunc: TruncationPolicy | None = None, tol: float = 1e-13
) -> float:
    return residual(nr_lhs(params, tol).value, residue_sum(params, trunc))


def _coupling(z1: np.ndarray, z2: np.ndarray, q) -> np.ndarray:
    return (
        qpoch_inf(z1 * z2, q)
        * qpoch_inf(z1 / z2, q)
        * qpoch_inf(z2 / z1, q)
        * qpoch_inf(1.0 / (z1 * z2), q)
    )


def gus_integral_lhs(
    params: ParameterSet, n: int | None = None, tol: float = 1e-12, M0: int = 32
) -> QuadratureResult:
    """The n-fold balanced integral over the torus, n = 1 or 2.

    The same node count is used on every axis; it doubles until two
    successive estimates differ by less than ``tol``.
    """
    _require_product_q(params)
    n = params.s - 1 if n is None else n
    if n != params.s - 1:
        raise ValueError("the integral needs s = n + 1")
    if n == 1:
        return nr_lhs(params, tol, M0)
    if n != 2:
        raise ValueError("only n = 1 and n = 2 are supported")
    margin = _check_inside(params)
    if margin < POLE_WARN:
        warnings.warn("integrand pole near the torus", PoleProximityWarning, stacklevel=2)
    cap = GRID_CAP[2]

    def estimate(M):
        z = _nodes(M)
        w = _single_weight(params, z)
        C = _coupling(z[:, None], z[None, :], params.q)
        return complex(np.einsum("i,ij,j->", w, C, w)) / (M * M)

    M = int(M0)
    current = estimate(M)
    while 2 * M <= cap:
        M *= 2
        refined = estimate(M)
        err = abs(refined - current)
        if err < tol:
            return note_result(QuadratureResult(refined, M, float(err), margin))
        current = refined
    raise NonConvergenceError(f"tensor grid did not settle within {cap} points per axis")


def gus_integral_rhs(params: ParameterSet, n: int | None = None) -> complex:
    """Closed product for :func:`gus_integral_lhs`."""
    _require_product_q(params)
    n = params.s - 1 if n is None else n
    if n != params.s - 1:
        raise ValueError("the integral needs s = n + 1")
    q = params.q
    return 2**n * math.factorial(n) * _pair_rhs(params) / complex(qpoch_inf(q, q)) ** n


def gus_residue_sum(
    params: ParameterSet,
    trunc: TruncationPolicy | None = None,
    radius_cap: int | None = None,
) -> complex:
    """``n! sum_mu R_mu <1, a_(mu)>_G / (1 - q)^n`` over increasing index tuples.

    The periodic ``R_mu`` is antisymmetric under swapping two residue points,
    as is ``<1, x>_G``, so each ordering contributes equally; hence ``n!``.
    For n = 2 the individual products are many orders of magnitude larger
    than their sum, so in double precision the result carries an absolute
    error of roughly ``eps * max_mu |R_mu <1, a_(mu)>_G|``; see
    :func:`gus_residue_terms` for the individual products.
    """
    terms = gus_residue_terms(params, trunc, radius_cap)
    n = params.s - 1
    return math.factorial(n) * complex(math.fsum(t.real for t in terms.values())
                                       + 1j * math.fsum(t.imag for t in terms.values()))


def gus_residue_terms(
    params: ParameterSet,
    trunc: TruncationPolicy | None = None,
    radius_cap: int | None = None,
) -> dict:
    """``{mu: R_mu <1, a_(mu)>_G / (1 - q)^n}`` for every increasing tuple."""
    _require_product_q(params)
    n = params.s - 1
    out = {}
    for mu in itertools.combinations(range(1, params.n_params), n):
        x = MultiPoint(tuple(params.log_point(m) for m in mu))
        val = cn_jackson(params, x, trunc, radius_cap).value
        out[mu] = residue_coeff_Rmu(params, mu) * val / (1.0 - params.q) ** n
    return out


def residue_oracle(params: ParameterSet, k: int, radius: float = 1e-4, M: int = 64) -> complex:
    """Residue at ``z = a_k`` from a small-circle trapezoid rule.

    Integrates the theta quotient ``theta(q/(a_last z)) theta(z^-2) /
    (z^2 prod_m theta(a_m/z))`` around a circle of the given radius.
    """
    _require_product_q(params, 2)
    q = params.q
    ak = params.a_(k)
    last = params.a[-1]
    w = np.exp(2j * np.pi * np.arange(M) / M)
    z = ak + radius * w
    g = theta(q / (last * z), q) * theta(z**-2, q) / z**2
    for am in params.a[:-1]:
        g = g / theta(am / z, q)
    return complex(np.mean(g * radius * w))


def scaled_params(params: ParameterSet, N: int) -> ParameterSet:
    """``a_i -> q^N a_i`` for the free parameters, the last one rebalanced."""
    _require_product_q(params)
    last = params.n_params
    shifts = {i: N for i in range(1, last)}
    shifts[last] = -N * (last - 1)
    return shift_alphas(params, shifts)


def scaling_chain_factor(params: ParameterSet, N: int) -> complex:
    """``I(a) / I(q^N a)`` for the balanced integral, from the closed recurrence.

    With ``m`` free parameters, scaling each by ``q^N`` multiplies
    ``q / (a_last a_k)`` by ``q^((m-1)N)`` and ``a_i a_j`` by ``q^(2N)``.
    """
    _require_product_q(params)
    q = params.q
    a = params.a
    last = a[-1]
    free = a.size - 1
    num = 1.0 + 0j
    for k in range(free):
        num *= qpoch_int(q / (last * a[k]), q, (free - 1) * N)
    den = 1.0 + 0j
    for i, j in itertools.combinations(range(free), 2):
        den *= qpoch_int(a[i] * a[j], q, 2 * N)
    return num / den
