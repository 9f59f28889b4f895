"""Linear relations among BC1 Jackson integrals.

* the key relation with coefficients ``C_0`` and ``C_{i_k}``;
* the first order q-difference system ``T_{a_j} <v> = <v> B`` with the
  explicit Gauss decomposition ``B = U L`` and its regularized form;
* the reflection system under ``a_1 ... a_{2s+2} = 1``;
* scalar recurrence factors for the one-dimensional cases.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bc1 import (
    Balancing,
    ParameterSet,
    TruncationPolicy,
    basis_v,
    e_func,
    e_product,
    jackson_integral,
    regularized,
    residual,
    shift_alpha,
    shift_alphas,
)
from .errors import BalancedError, DegenerateError
from .laurent import SymLaurent
from .qcore import LogPoint, theta

DEGENERACY_TOL = 1e-10


def _check_indices(params: ParameterSet, indices: Sequence[int]):
    if len(set(indices)) != len(indices):
        raise IndexError(f"indices must be distinct: {list(indices)}")
    for i in indices:
        params._idx(i)


def _nonzero(x: complex, what: str) -> complex:
    if abs(x) < DEGENERACY_TOL:
        raise DegenerateError(f"{what} vanishes (|{what}| = {abs(x):.3e})")
    return x


@dataclass(frozen=True)
class KeyCoefficients:
    C0: complex
    C: tuple
    subset: tuple


def key_coefficients(params: ParameterSet, subset: Sequence[int]) -> KeyCoefficients:
    """Coefficients of ``C0 <e_{i_1}..e_{i_s}> + sum_k C_{i_k} <.. hat e_{i_k} ..> = 0``."""
    subset = tuple(subset)
    if len(subset) != params.s:
        raise IndexError(f"the subset must have s = {params.s} indices")
    _check_indices(params, subset)
    a = params.a
    C0 = 1.0 - params.prod_a
    C = []
    for k, ik in enumerate(subset):
        ak = params.a_(ik)
        den = ak**params.s * (1.0 - ak * ak)
        for l, il in enumerate(subset):
            if l != k:
                den *= e_func(ak, params.a_(il))
        C.append(complex(np.prod(1.0 - ak * a)) / _nonzero(den, "C denominator"))
    return KeyCoefficients(complex(C0), tuple(C), subset)


def key_equation_sides(
    params: ParameterSet,
    subset: Sequence[int],
    xi: LogPoint,
    trunc: TruncationPolicy | None = None,
) -> tuple:
    """``(C0 <e_{i_1}..e_{i_s}, xi>, -sum_k C_{i_k} <..hat..>)``; the two agree."""
    kc = key_coefficients(params, subset)
    subset = list(kc.subset)
    lhs = kc.C0 * jackson_integral(params, e_product(params, subset), xi, trunc).value
    rhs = 0j
    for k, c in enumerate(kc.C):
        omit = subset[:k] + subset[k + 1 :]
        rhs -= c * jackson_integral(params, e_product(params, omit), xi, trunc).value
    return lhs, rhs


def verify_key_equation(params, subset, xi, trunc=None) -> float:
    return residual(*key_equation_sides(params, subset, xi, trunc))


@dataclass(frozen=True)
class SystemMatrices:
    U: np.ndarray
    L: np.ndarray
    B: np.ndarray
    det_closed: complex
    c: tuple
    d: tuple
    j: int
    fixed: tuple


def _product_one_guard(params: ParameterSet):
    if abs(params.sum_alpha) < 1e-6 or abs(1.0 - params.prod_a) < 1e-12:
        raise BalancedError("the difference system needs a_1 ... a_{2s+2} != 1")


def difference_matrix(params: ParameterSet, fixed: Sequence[int], j: int) -> SystemMatrices:
    """Coefficient matrix of ``T_{a_j}(<v_0>, .., <v_{s-1}>) = (<v_0>, ..) B``."""
    fixed = tuple(fixed)
    s = params.s
    if len(fixed) != s - 1:
        raise IndexError(f"need s-1 = {s - 1} fixed indices")
    _check_indices(params, fixed + (j,))
    _product_one_guard(params)
    a = params.a
    aj = params.a_(j)
    one_minus_prod = 1.0 - params.prod_a
    det_closed = complex(np.prod(1.0 - aj * a)) / _nonzero(
        (-aj) ** s * one_minus_prod * (1.0 - aj * aj), "det B denominator"
    )
    c_rest = [e_func(params.a_(i), aj) for i in fixed]
    c0 = det_closed / _nonzero(complex(np.prod(c_rest)) if c_rest else 1.0, "e-product")
    d = []
    for k, ik in enumerate(fixed):
        ak = params.a_(ik)
        den = (-ak) ** s * one_minus_prod * (1.0 - ak * ak) * e_func(aj, ak)
        for l, il in enumerate(fixed):
            if l != k:
                den *= e_func(params.a_(il), ak)
        d.append(complex(np.prod(1.0 - ak * a)) / _nonzero(den, "d denominator"))
    U = np.zeros((s, s), dtype=complex)
    U[0, :] = 1.0
    U[0, 0] = c0
    for k in range(1, s):
        U[k, k] = c_rest[k - 1]
    L = np.eye(s, dtype=complex)
    L[1:, 0] = d
    return SystemMatrices(U, L, U @ L, det_closed, (c0, *c_rest), tuple(d), j, fixed)


def regularized_matrix(params: ParameterSet, fixed: Sequence[int], j: int) -> SystemMatrices:
    """``B_bar = -B / a_j``, factored as ``(-U / a_j) L``, with its closed-form determinant."""
    base = difference_matrix(params, fixed, j)
    aj = params.a_(j)
    inv = 1.0 / params.a
    det_closed = complex(np.prod(1.0 - inv / aj)) / (
        (1.0 - aj**-2) * (1.0 - 1.0 / params.prod_a)
    )
    return SystemMatrices(
        -base.U / aj, base.L, -base.B / aj, det_closed, base.c, base.d, j, base.fixed
    )


def upper_diagonal_closed(params: ParameterSet, fixed: Sequence[int], j: int) -> list:
    """Diagonal of ``-U / a_j`` written with inverse parameters."""
    aj = params.a_(j)
    inv = 1.0 / params.a
    first = complex(np.prod(1.0 - inv / aj)) / (
        (1.0 - 1.0 / params.prod_a) * (1.0 - aj**-2)
    )
    rest = []
    for i in fixed:
        ai = params.a_(i)
        f = (1.0 - ai / aj) * (1.0 - 1.0 / (ai * aj))
        first /= f
        rest.append(f)
    return [first, *rest]


def _integrals(params, polys, xi, trunc, regularize: bool):
    fn = regularized if regularize else jackson_integral
    return np.array([fn(params, p, xi, trunc).value for p in polys])


def difference_system_sides(
    params: ParameterSet,
    fixed: Sequence[int],
    j: int,
    xi: LogPoint,
    trunc: TruncationPolicy | None = None,
    regularize: bool = False,
    route: str = "shift",
) -> tuple:
    """Both sides of ``T_{a_j} <v> = <v> B`` (or ``<<v>>`` with ``B_bar``).

    ``route="shift"`` evaluates the left side at shifted parameters;
    ``route="multiply"`` uses ``<e_j v_i>`` at the original parameters
    (unregularized only).
    """
    mats = (regularized_matrix if regularize else difference_matrix)(params, fixed, j)
    v = basis_v(params, fixed)
    base = _integrals(params, v, xi, trunc, regularize)
    if route == "shift":
        shifted = shift_alpha(params, j, 1)
        lhs = _integrals(shifted, v, xi, trunc, regularize)
    elif route == "multiply" and not regularize:
        ej = e_product(params, [j])
        lhs = _integrals(params, [ej * p for p in v], xi, trunc, False)
    else:
        raise ValueError(f"unknown route {route!r}")
    return lhs, base @ mats.B


@dataclass(frozen=True)
class ReflectionMatrices:
    Mj1: np.ndarray
    Mj2: np.ndarray
    N: np.ndarray
    M: np.ndarray
    det_closed: complex
    sigma: tuple
    tau: tuple
    gamma1: tuple
    gamma2: tuple


def gamma_coeffs(params: ParameterSet, fixed: Sequence[int], j: int) -> list:
    """``gamma_{k,j}`` for k = 1 .. s-1."""
    s = params.s
    a = params.a
    aj = params.a_(j)
    out = []
    for k, ik in enumerate(fixed):
        ak = params.a_(ik)
        g = aj**s * (1.0 - aj * aj) / (ak**s * (1.0 - ak * ak))
        g *= complex(np.prod((1.0 - ak * a) / (1.0 - aj * a)))
        for l, il in enumerate(fixed):
            if l != k:
                al = params.a_(il)
                g *= e_func(aj, al) / _nonzero(e_func(ak, al), "e(a_ik; a_il)")
        out.append(complex(g))
    return out


def _m_matrix(gamma: Sequence[complex]) -> np.ndarray:
    n = len(gamma)
    M = np.eye(n, dtype=complex)
    M[:, 0] = gamma
    return M


def _m_inverse(gamma: Sequence[complex]) -> np.ndarray:
    # bordered structure: first column (1/g1, -g2/g1, ..), identity elsewhere
    g1 = _nonzero(gamma[0], "gamma_{1,j}")
    n = len(gamma)
    M = np.eye(n, dtype=complex)
    M[0, 0] = 1.0 / g1
    M[1:, 0] = -np.asarray(gamma[1:], dtype=complex) / g1
    return M


def reflection_system(
    params: ParameterSet, fixed: Sequence[int], j1: int, j2: int
) -> ReflectionMatrices:
    """``(<e_{j1} v_k>)_k = (<e_{j2} v_k>)_k M`` with ``M = M_{j2} N M_{j1}^{-1}``."""
    if params.balancing is not Balancing.PRODUCT_ONE:
        raise BalancedError("the reflection system needs a_1 ... a_{2s+2} = 1")
    fixed = tuple(fixed)
    s = params.s
    if s < 2:
        raise ValueError("the reflection system needs s >= 2")
    if len(fixed) != s - 1:
        raise IndexError(f"need s-1 = {s - 1} fixed indices")
    if j1 == j2:
        raise IndexError("j1 and j2 must differ")
    _check_indices(params, fixed + (j1, j2))
    a1, a2 = params.a_(j1), params.a_(j2)
    sigma, tau = [], []
    for ik in fixed[1:]:
        ak = params.a_(ik)
        sigma.append(e_func(a1, a2) / _nonzero(e_func(ak, a2), "e(a_ik; a_j2)"))
        tau.append(e_func(a1, ak) / _nonzero(e_func(a2, ak), "e(a_j2; a_ik)"))
    g1 = gamma_coeffs(params, fixed, j1)
    g2 = gamma_coeffs(params, fixed, j2)
    N = np.eye(s - 1, dtype=complex)
    N[0, 1:] = sigma
    N[np.arange(1, s - 1), np.arange(1, s - 1)] = tau
    Mj1, Mj2 = _m_matrix(g1), _m_matrix(g2)
    M = Mj2 @ N @ _m_inverse(g1)
    a = params.a
    det_closed = a2**s * (1.0 - a2 * a2) / (a1**s * (1.0 - a1 * a1))
    det_closed *= complex(np.prod((1.0 - a1 * a) / (1.0 - a2 * a)))
    return ReflectionMatrices(
        Mj1, Mj2, N, M, complex(det_closed), tuple(sigma), tuple(tau), tuple(g1), tuple(g2)
    )


def telescoping_boundary(params: ParameterSet, xi: LogPoint) -> complex:
    """Boundary value left by the telescoping sum when ``a_1 ... a_{2s+2} = 1``.

    With ``f = Phi F / z^(s+1)`` one has ``sum_nu (f(q^nu xi) - f(q^(nu+1) xi))
    = f(inf) - f(0)``.  For a product-one set ``f(0) = 1`` and ``f`` tends to the
    q-periodic value ``c(xi) = prod_m theta(xi/a_m)/theta(xi a_m)`` along the
    lattice towards infinity, so the key relation acquires the constant
    ``(1 - q)(1 - c(xi))`` on its right side.  Off the balanced hyperplane,
    inside the convergence domain, both limits vanish and this term is absent.
    """
    if params.balancing is not Balancing.PRODUCT_ONE:
        raise BalancedError("the boundary value is defined for a_1 ... a_{2s+2} = 1")
    z = xi.value()
    q = params.q
    c = 1.0 + 0j
    for am in params.a:
        c *= complex(theta(z / am, q)) / complex(theta(z * am, q))
    return complex((1.0 - q) * (1.0 - c))


def _reflection_c(params, fixed, j) -> complex:
    return key_coefficients(params, tuple(fixed) + (j,)).C[-1]


def reflection_sides(params, fixed, j1, j2, xi, trunc=None, corrected: bool = False) -> tuple:
    """Both sides of the vector reflection identity.

    With ``corrected=True`` the right side also carries the contribution of
    :func:`telescoping_boundary`, which the plain identity omits.
    """
    R = reflection_system(params, fixed, j1, j2)
    v = basis_v(params, fixed)[1:]
    e1, e2 = e_product(params, [j1]), e_product(params, [j2])
    lhs = _integrals(params, [e1 * p for p in v], xi, trunc, False)
    rhs = _integrals(params, [e2 * p for p in v], xi, trunc, False) @ R.M
    if corrected:
        bnd = telescoping_boundary(params, xi)
        row = R.N[0] / _reflection_c(params, fixed, j2)
        row = row - np.eye(params.s - 1, dtype=complex)[0] / _reflection_c(params, fixed, j1)
        rhs = rhs + bnd * (row @ _m_inverse(R.gamma1))
    return lhs, rhs


def reflection_subidentities(params, fixed, j1, j2, xi, trunc=None, corrected: bool = False) -> dict:
    """Residuals of the componentwise relations behind the reflection system.

    ``gamma_j``: ``sum_k gamma_{k,j} <e_j v_k> = <v_0>`` for j in (j1, j2);
    ``sigma_tau_k``: ``<e_{j1} v_k> = sigma_k <v_0> + tau_k <e_{j2} v_k>``.
    With ``corrected=True`` the ``gamma_j`` relations include the boundary
    term ``-telescoping_boundary / C_j``.
    """
    R = reflection_system(params, fixed, j1, j2)
    v = basis_v(params, fixed)
    v0 = jackson_integral(params, v[0], xi, trunc).value
    bnd = telescoping_boundary(params, xi) if corrected else 0.0
    out = {}
    ej = {j: e_product(params, [j]) for j in (j1, j2)}
    ev = {j: _integrals(params, [ej[j] * p for p in v[1:]], xi, trunc, False) for j in (j1, j2)}
    for j, g in ((j1, R.gamma1), (j2, R.gamma2)):
        rhs = v0 - (bnd / _reflection_c(params, fixed, j) if corrected else 0.0)
        out[f"gamma_{j}"] = residual(np.dot(g, ev[j]), rhs)
    for k in range(1, params.s - 1):
        rhs = R.sigma[k - 1] * v0 + R.tau[k - 1] * ev[j2][k]
        out[f"sigma_tau_{k + 1}"] = residual(ev[j1][k], rhs)
    return out


def recurrence_factor_generic(params: ParameterSet, j: int) -> complex:
    """Multiplier of ``T_{a_j} <<1, x>>_G`` (equal to ``det B_bar``)."""
    if abs(1.0 - params.prod_a) < 1e-12:
        raise BalancedError("the generic recurrence needs a_1 ... a_{2n+2} != 1")
    aj = params.a_(j)
    inv = 1.0 / params.a
    return complex(np.prod(1.0 - inv / aj)) / ((1.0 - aj**-2) * (1.0 - 1.0 / params.prod_a))


def recurrence_factor_balanced(params: ParameterSet, j: int) -> complex:
    """Multiplier of ``T_{a_j} <1, xi>`` under ``a_1 ... a_{2s+2} = q``.

    ``T_{a_j}`` here is the coupled shift ``a_j -> q a_j``, ``a_last -> a_last / q``.
    """
    if params.balancing is not Balancing.PRODUCT_Q:
        raise BalancedError("the balanced recurrence needs a_1 ... a_{2s+2} = q")
    last = params.n_params
    if not 1 <= j < last:
        raise IndexError(f"j must lie in 1..{last - 1}")
    q = params.q
    aj, al = params.a_(j), params.a_(last)
    out = q / (aj * al)
    for l in range(1, last):
        if l != j:
            a_l = params.a_(l)
            out *= (1.0 - aj * a_l) / (1.0 - q / (al * a_l))
    return complex(out)


def coupled_shift(params: ParameterSet, j: int, k: int = 1) -> ParameterSet:
    """``a_j -> q^k a_j`` and ``a_last -> q^-k a_last`` (keeps the product)."""
    return shift_alphas(params, {j: k, params.n_params: -k})


def recurrence_boundary_correction(params: ParameterSet, j: int, xi: LogPoint) -> complex:
    """Additive term in ``T_{a_j} <1, xi> = factor <1, xi> + correction`` (s = 2).

    The correction is ``telescoping_boundary(b, xi) / C_last(b)`` at the product-one
    set ``b`` obtained by ``a_last -> a_last / q``.  It vanishes only where the
    elliptic function ``c(xi)`` equals one.
    """
    if params.s != 2:
        raise ValueError("the scalar recurrence is stated for s = 2")
    recurrence_factor_balanced(params, j)
    last = params.n_params
    b = shift_alpha(params, last, -1)
    return telescoping_boundary(b, xi) / key_coefficients(b, [j, last]).C[1]


def balanced_recurrence_sides(
    params: ParameterSet, j: int, xi: LogPoint, trunc=None, corrected: bool = False
) -> tuple:
    """``(T_{a_j} <1, xi>, factor * <1, xi> [+ correction])`` by two lattice sums."""
    unit = SymLaurent.constant(1.0)
    one = jackson_integral(params, unit, xi, trunc).value
    shifted = jackson_integral(coupled_shift(params, j), unit, xi, trunc).value
    rhs = recurrence_factor_balanced(params, j) * one
    if corrected:
        rhs += recurrence_boundary_correction(params, j, xi)
    return shifted, rhs

