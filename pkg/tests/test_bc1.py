import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import Weight, window_sum
from qbc1.bc1 import (
    Balancing,
    ParameterSet,
    TruncationPolicy,
    basis_v,
    big_theta,
    bilateral_sum,
    convergence_margin,
    default_xi,
    e_func,
    e_product,
    expand_in_char,
    jackson_integral,
    nabla,
    phi_ratio,
    phi_weight,
    record_sums,
    regularized,
    residual,
    shift_alpha,
    weighted_lattice_sum,
)
from qbc1.cli import sample_params
from qbc1.errors import BalancedError, DivergenceError, SingularError
from qbc1.laurent import SymLaurent
from qbc1.qcore import LogPoint, theta

Q = 0.3
ONE = SymLaurent.constant(1.0)
EXAMPLE = (-0.30, -0.20, -0.15, -0.05)


def xi_at(x):
    return LogPoint(complex(math.log(x), 0.0), Q)


def generic(s, seed):
    return sample_params("key-equation", s, Q, np.random.default_rng(seed))


class TestParameterSet:
    def test_balancing_classified(self):
        assert ParameterSet(Q, EXAMPLE).balancing is Balancing.GENERIC
        assert ParameterSet(Q, (0.1, -0.2, 0.3, -0.2)).balancing is Balancing.PRODUCT_ONE
        assert ParameterSet(Q, (0.1, 0.2, 0.3, 0.4)).balancing is Balancing.PRODUCT_Q

    def test_asserted_balancing_mismatch(self):
        with pytest.raises(BalancedError):
            ParameterSet(Q, EXAMPLE, Balancing.PRODUCT_ONE)

    def test_balanced_constructor(self):
        p = ParameterSet.balanced(Q, [0.1, 0.2 + 0.1j, -0.3, 0.05, 0.2], Balancing.PRODUCT_Q)
        assert p.s == 2
        assert abs(p.prod_a - Q) < 1e-15

    def test_odd_length_rejected(self):
        with pytest.raises(ValueError):
            ParameterSet(Q, (0.1, 0.2, 0.3))

    def test_shift_alpha(self):
        p = ParameterSet(Q, EXAMPLE)
        assert shift_alpha(p, 2, 0) == p
        new = shift_alpha(p, 2, 1)
        assert abs(new.a_(2) / p.a_(2) - Q) < 1e-15
        assert new.alpha[0] == p.alpha[0]

    def test_shift_recomputes_balancing(self):
        p = ParameterSet(Q, (0.1, -0.2, 0.3, -0.2))
        assert shift_alpha(p, 1, 1).balancing is Balancing.PRODUCT_Q

    def test_index_bounds(self):
        with pytest.raises(IndexError):
            ParameterSet(Q, EXAMPLE).a_(5)


e_args = st.tuples(
    st.floats(min_value=0.3, max_value=3.0), st.floats(min_value=-math.pi, max_value=math.pi)
).map(lambda rt: complex(rt[0] * math.cos(rt[1]), rt[0] * math.sin(rt[1])))


class TestEIdentities:
    @settings(max_examples=100, deadline=None)
    @given(e_args, e_args, e_args)
    def test_additive(self, x, y, z):
        terms = [e_func(x, z), e_func(x, y), e_func(y, z)]
        assert abs(terms[0] - terms[1] - terms[2]) <= 1e-12 * (1 + max(map(abs, terms)))

    @settings(max_examples=100, deadline=None)
    @given(e_args, e_args)
    def test_antisymmetric_and_inversion(self, x, y):
        scale = 1 + abs(e_func(x, y))
        assert abs(e_func(x, y) + e_func(y, x)) <= 1e-12 * scale
        assert abs(e_func(x, y) - e_func(1 / x, y)) <= 1e-12 * scale

    @settings(max_examples=100, deadline=None)
    @given(e_args, e_args, e_args, e_args)
    def test_three_term(self, x, y, z, w):
        t = [e_func(x, y) * e_func(z, w), e_func(x, z) * e_func(y, w), e_func(x, w) * e_func(y, z)]
        assert abs(t[0] - t[1] + t[2]) <= 1e-12 * (1 + max(map(abs, t)))


class TestBasis:
    def test_s1_is_constant(self):
        p = ParameterSet(Q, EXAMPLE)
        assert basis_v(p, []) == [ONE]

    def test_s2(self):
        p = generic(2, 0)
        v = basis_v(p, [1])
        assert v[0] == e_product(p, [1]) and v[1] == ONE

    def test_s3_order(self):
        p = generic(3, 0)
        v = basis_v(p, [1, 2])
        assert v == [e_product(p, [1, 2]), e_product(p, [2]), e_product(p, [1])]

    def test_wrong_size(self):
        with pytest.raises(IndexError):
            basis_v(generic(2, 0), [])


class TestExpandInChar:
    def test_identity(self):
        chars = [SymLaurent.character(i) for i in (2, 1, 0)]
        assert np.allclose(expand_in_char(chars), np.eye(3))

    def test_two_dimensional_example(self):
        e1 = SymLaurent([-(2 + 0.5), 1.0])
        T = expand_in_char([e1, ONE])
        assert np.allclose(T, [[1, 0], [2.5, 1]])

    def test_reconstructs_characters_pointwise(self):
        p = generic(3, 4)
        polys = basis_v(p, [1, 2])
        T = expand_in_char(polys)
        z = np.array([1.3 + 0.2j, 0.7 - 0.5j, -1.1 + 0.4j])
        vals = np.array([[poly(x) for poly in polys] for x in z])
        for col, i in enumerate((2, 1, 0)):
            assert np.allclose(vals @ T[:, col], SymLaurent.character(i)(z), atol=1e-11)

    def test_singular_basis(self):
        with pytest.raises(SingularError):
            expand_in_char([ONE, ONE])


class TestWeight:
    def test_rational_ratio_at_half(self):
        p = ParameterSet(Q, (0.5, 0.5, 0.5, 0.5))
        z = 1.1
        sq = math.sqrt(Q)
        expected = Q**2 * ((1 - sq * z) / (sq - Q * z)) ** 4
        pt = LogPoint(complex(math.log(z)), Q)
        assert abs(phi_weight(p, pt.shift(1)) / phi_weight(p, pt) - expected) < 1e-12 * abs(expected)
        assert abs(phi_ratio(p, z) - expected) < 1e-12 * abs(expected)

    def test_matches_mpmath(self):
        p = generic(2, 7)
        pt = LogPoint(complex(math.log(1.05), 0.0), Q)
        ref = complex(Weight(Q, p.alpha).phi(mp.mpc(pt.log())))
        assert abs(phi_weight(p, pt) - ref) < 1e-12 * abs(ref)

    def test_rational_ratio_random(self):
        p = generic(2, 8)
        z = 0.9 + 0.3j
        pt = LogPoint.from_value(z, Q)
        expected = Q ** (p.s + 1) * np.prod((1 - p.a * z) / (p.a - Q * z))
        ratio = phi_weight(p, pt.shift(1)) / phi_weight(p, pt)
        assert abs(ratio - expected) < 1e-11 * abs(expected)


class TestBilateralSum:
    def test_geometric(self):
        r = 0.4
        res = bilateral_sum(lambda nu: r ** np.abs(nu).astype(float))
        assert abs(res.value - (1 + r) / (1 - r)) < 1e-14
        assert res.converged

    def test_divergence(self):
        with pytest.raises(DivergenceError):
            bilateral_sum(lambda nu: 1.1 ** np.abs(nu).astype(float))

    def test_max_terms(self):
        res = bilateral_sum(
            lambda nu: 0.99 ** np.abs(nu).astype(float), TruncationPolicy(max_terms=50)
        )
        assert not res.converged

    def test_recorder(self):
        with record_sums() as log:
            bilateral_sum(lambda nu: 0.5 ** np.abs(nu).astype(float))
        assert len(log) == 1 and log[0].converged


class TestJackson:
    def test_window_oracle(self):
        p = ParameterSet(Q, EXAMPLE)
        xi = xi_at(1.07)
        val = jackson_integral(p, ONE, xi, TruncationPolicy(tol_rel=1e-14)).value
        ref = window_sum(Q, EXAMPLE, lambda z: 1, 1.07, radius=60)
        assert abs(val - ref) < 1e-13 * abs(ref)

    def test_adaptive_mp_oracle_degree_two(self):
        p = generic(2, 3)
        xi = default_xi(Q, np.random.default_rng(1))
        chi2 = SymLaurent.character(2)
        val = jackson_integral(p, chi2, xi).value
        ref = complex(Weight(Q, p.alpha).jackson(lambda z: z * z + 1 + 1 / (z * z), xi.log()))
        assert residual(val, ref) < 1e-11

    def test_lattice_shift_invariance(self):
        p = generic(2, 5)
        xi = default_xi(Q, np.random.default_rng(2))
        a = jackson_integral(p, ONE, xi).value
        b = jackson_integral(p, ONE, xi.shift(1)).value
        assert abs(a - b) < 1e-10 * abs(a)

    @pytest.mark.parametrize("i", [0, 1, 2])
    def test_nabla_integrates_to_zero(self, i):
        p = generic(1, 6)
        xi = default_xi(Q, np.random.default_rng(3))
        psi = SymLaurent.character(i)
        res = weighted_lattice_sum(p, nabla(p, psi), xi)
        scale = weighted_lattice_sum(p, lambda z: np.abs(psi(z)), xi).value
        assert abs(res.value) <= 5 * res.abs_err_estimate + 1e-13 * abs(scale)

    def test_divergent_degree_rejected(self):
        p = ParameterSet(Q, (0.3, 0.3, 0.3, 0.3))
        assert convergence_margin(p, 0) < 0
        with pytest.raises(DivergenceError):
            jackson_integral(p, ONE, xi_at(1.07))

    @pytest.mark.parametrize("s", [1, 2, 3])
    def test_transfer_identity(self, s):
        # T_{a_j} <v> equals <e_j v> at the original parameters
        rng = np.random.default_rng(10 + s)
        for trial in range(4):
            p = sample_params("difference-system", s, Q, rng)
            j = int(rng.integers(1, p.n_params + 1))
            xi = default_xi(Q, rng)
            v = SymLaurent.character(s - 1)
            lhs = jackson_integral(shift_alpha(p, j, 1), v, xi).value
            rhs = jackson_integral(p, e_product(p, [j]) * v, xi).value
            assert abs(lhs - rhs) < 1e-9 * max(abs(lhs), 1e-300)


class TestBigTheta:
    def test_shift_in_parameter(self):
        p = generic(2, 11)
        xi = default_xi(Q, np.random.default_rng(4))
        for j in range(1, p.n_params + 1):
            ratio = big_theta(shift_alpha(p, j, 1), xi) / big_theta(p, xi)
            assert abs(ratio + p.a_(j)) < 1e-11 * abs(p.a_(j))

    def test_lattice_quasi_periodicity(self):
        p = generic(1, 12)
        xi = default_xi(Q, np.random.default_rng(5))
        z = xi.value()
        # factorwise: theta(q^2 z^2) = q^-1 z^-4 theta(z^2), theta(q a z) = -theta(a z)/(a z)
        expected = Q ** (p.s - p.sum_alpha) / (Q * z**4)
        for am in p.a:
            expected *= -(am * z)
        ratio = big_theta(p, xi.shift(1)) / big_theta(p, xi)
        assert abs(ratio - expected) < 1e-11 * abs(expected)

    def test_real_for_symmetric_real_parameters(self):
        p = ParameterSet(Q, (0.2, -0.2, 0.1, -0.1))
        assert abs(big_theta(p, xi_at(1.3)).imag) < 1e-12 * abs(big_theta(p, xi_at(1.3)))


class TestRegularized:
    def test_lattice_invariance_s1(self):
        p = generic(1, 13)
        xi = default_xi(Q, np.random.default_rng(6))
        a = regularized(p, ONE, xi).value
        b = regularized(p, ONE, xi.shift(1)).value
        assert abs(a - b) < 1e-10 * abs(a)

    def test_lattice_factor_higher_s(self):
        # Theta(q z)/Theta(z) = q^(s-1) z^(2s-2), so only s = 1 is q-periodic
        p = generic(2, 13)
        xi = default_xi(Q, np.random.default_rng(6))
        a = regularized(p, ONE, xi).value
        b = regularized(p, ONE, xi.shift(1)).value
        z = xi.value()
        expected = Q ** (1 - p.s) * z ** (2 - 2 * p.s)
        assert abs(b / a - expected) < 1e-10 * abs(expected)

    def test_inversion_symmetry(self):
        p = generic(2, 14)
        xi = default_xi(Q, np.random.default_rng(7))
        a = regularized(p, SymLaurent.character(1), xi).value
        b = regularized(p, SymLaurent.character(1), xi.inverse()).value
        assert abs(a - b) < 1e-9 * abs(a)

    def test_window_oracle_ratio(self):
        p = ParameterSet(Q, EXAMPLE)
        xi = xi_at(1.07)
        ref = window_sum(Q, EXAMPLE, lambda z: 1, 1.07, radius=60)
        with mp.workdps(30):
            z = mp.mpf(1.07)
            w = Weight(Q, EXAMPLE)
            th = mp.exp((p.s - w.sum_alpha) * mp.log(z)) * mp.qp(z * z, Q) * mp.qp(Q / (z * z), Q)
            for am in w.a:
                th /= mp.qp(am * z, Q) * mp.qp(Q / (am * z), Q)
        val = regularized(p, ONE, xi, TruncationPolicy(tol_rel=1e-14)).value
        assert abs(val - ref / complex(th)) < 1e-12 * abs(val)

    def test_half_integer_sum_rejected(self):
        p = ParameterSet(Q, (-0.25, -0.25, -0.5, -0.5))
        with pytest.raises(ValueError):
            regularized(p, ONE, xi_at(1.07))


def test_default_xi_is_reproducible():
    a = default_xi(Q, np.random.default_rng(3))
    b = default_xi(Q, np.random.default_rng(3))
    assert a == b
    assert abs(a.log_base.imag) <= 0.05
    assert default_xi(Q).log_base == complex(math.log(1.07), 0)


def test_residual_metric():
    assert residual(1.0, 1.0) == 0.0
    assert residual(0.0, 1e-9) == pytest.approx(1e-9)
    assert residual(1e6, 1e6 + 1) == pytest.approx(1 / (1 + 1e6 + 1))


def test_theta_kernel_used_by_weight():
    # theta(q z)/theta(z) = -1/z at a generic point, as used by the big theta
    z = 0.8 + 0.6j
    assert abs(theta(Q * z, Q) / theta(z, Q) + 1 / z) < 1e-13
