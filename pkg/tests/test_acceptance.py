"""Acceptance criteria, each at its stated tolerance and time limit.

Every test records its worst residual and wall time; the conftest prints one
line per criterion at the end of the run.
"""

import json
import math
import time

import numpy as np
import pytest

from qbc1.bc1 import default_xi, e_func, residual, shift_alpha
from qbc1.cli import SuiteConfig, _random_multipoint, main, run_suite, sample_params
from qbc1.contour import (
    gus_integral_lhs,
    gus_integral_rhs,
    nr_lhs,
    nr_rhs,
    residue_decomposition_residual,
)
from qbc1.diffsys import (
    balanced_recurrence_sides,
    difference_matrix,
    difference_system_sides,
    recurrence_factor_generic,
    reflection_sides,
    reflection_subidentities,
    reflection_system,
    regularized_matrix,
)
from qbc1.gustafson import cn_regularized, det_relation_residual, gustafson_product
from qbc1.qcore import theta

Q = 0.3
QG = 0.2
# the harness default summation tolerance (tol_sum = 1e-11)
SUM = SuiteConfig("gustafson-sum").truncation()


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def record(record_property, values, seconds=None):
    worst = max(values)
    record_property("max_residual", worst)
    if seconds is not None:
        record_property("seconds", seconds)
    return worst


def mixed(lhs, rhs):
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    return np.abs(lhs - rhs) / (1 + np.maximum(np.abs(lhs), np.abs(rhs)))


def ring_points(rng, k):
    return rng.uniform(0.5, 2.0, k) * np.exp(1j * rng.uniform(-math.pi, math.pi, k))


@pytest.mark.criterion(1, "theta quasi-periodicity and inversion")
def test_criterion_01_kernel_laws(record_property):
    rng = np.random.default_rng(1)
    z = ring_points(rng, 1000)
    with Timer() as t:
        th = theta(z, Q)
        shift = mixed(theta(Q * z, Q), -th / z)
        inv = mixed(theta(Q / z, Q), th)
    worst = record(record_property, [shift.max(), inv.max()], t.seconds)
    assert worst < 1e-12
    assert t.seconds < 1


@pytest.mark.criterion(2, "e-function identities")
def test_criterion_02_e_identities(record_property):
    rng = np.random.default_rng(2)
    x, y, z, w = (ring_points(rng, 1000) for _ in range(4))
    with Timer() as t:
        res = [
            mixed(e_func(x, y), -e_func(y, x)).max(),
            mixed(e_func(x, y), e_func(1 / x, y)).max(),
            mixed(e_func(x, w), e_func(x, y) + e_func(y, w)).max(),
            mixed(
                e_func(x, y) * e_func(z, w) + e_func(x, w) * e_func(y, z),
                e_func(x, z) * e_func(y, w),
            ).max(),
        ]
    worst = record(record_property, res, t.seconds)
    assert worst < 1e-12
    assert t.seconds < 1


@pytest.mark.criterion(3, "key equation, s = 1..3")
def test_criterion_03_key_equation(record_property):
    worst = []
    with Timer() as t:
        for s in (1, 2, 3):
            report = run_suite(SuiteConfig("key-equation", size=s, trials=25, seed=30 + s))
            assert report.converged
            worst.append(report.max_residual)
    assert record(record_property, worst, t.seconds) < 1e-8
    assert t.seconds < 30


def _system_trials(suite, regularize, seed):
    rng = np.random.default_rng(seed)
    vec, det = [], []
    for s in (1, 2, 3):
        for _ in range(25):
            p = sample_params(suite, s, Q, rng)
            order = list(rng.permutation(p.n_params) + 1)
            fixed, choices = order[: s - 1], order[s - 1 : s + 2]
            xi = default_xi(Q, rng)
            for j in choices:
                m = (regularized_matrix if regularize else difference_matrix)(p, fixed, j)
                det.append(residual(np.linalg.det(m.U) * np.linalg.det(m.L), m.det_closed))
                vec.append(residual(*difference_system_sides(p, fixed, j, xi, regularize=regularize)))
    return vec, det


@pytest.mark.criterion(4, "difference system and det B")
def test_criterion_04_difference_system(record_property):
    with Timer() as t:
        vec, det = _system_trials("difference-system", False, 4)
    record(record_property, vec + det, t.seconds)
    assert max(vec) < 1e-8
    assert max(det) < 1e-10
    assert t.seconds < 60


@pytest.mark.criterion(5, "regularized system and det B-bar")
def test_criterion_05_regularized_system(record_property):
    with Timer() as t:
        vec, det = _system_trials("regularized-system", True, 5)
    record(record_property, vec + det, t.seconds)
    assert max(vec) < 1e-8
    assert max(det) < 1e-8
    assert t.seconds < 60


def _recurrence(n, seed, radius_cap=None, trials=3):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(trials):
        p = sample_params("gustafson-sum", n, QG, rng)
        x = _random_multipoint(rng, n, QG)
        j = int(rng.integers(1, p.n_params + 1))
        base = cn_regularized(p, x, SUM, radius_cap).value
        shifted = cn_regularized(shift_alpha(p, j), x, SUM, radius_cap).value
        out.append(residual(shifted / base, recurrence_factor_generic(p, j)))
    return out


@pytest.mark.criterion(6, "n = 1 recurrence")
def test_criterion_06_recurrence_n1(record_property):
    with Timer() as t:
        res = _recurrence(1, 61, trials=5)
    assert record(record_property, res, t.seconds) < 1e-8


@pytest.mark.criterion(6, "n = 2 recurrence, box radius 30")
def test_criterion_06_recurrence_n2(record_property):
    with Timer() as t:
        res = _recurrence(2, 62, radius_cap=30)
    assert record(record_property, res, t.seconds) < 1e-6
    assert t.seconds < 300


@pytest.mark.criterion(7, "product formula and constancy")
def test_criterion_07_gustafson_product(record_property):
    rng = np.random.default_rng(7)
    res = {1: [], 2: []}
    with Timer() as t:
        for n in (1, 2):
            for _ in range(3):
                p = sample_params("gustafson-sum", n, QG, rng)
                x = _random_multipoint(rng, n, QG)
                res[n].append(residual(cn_regularized(p, x, SUM).value, gustafson_product(p)))
        p = sample_params("gustafson-sum", 2, QG, rng)
        vals = [cn_regularized(p, _random_multipoint(rng, 2, QG), SUM).value for _ in range(5)]
        const = [residual(v, vals[0]) for v in vals[1:]]
    record(record_property, res[1] + res[2] + const, t.seconds)
    assert max(res[1]) < 1e-8
    assert max(res[2]) < 1e-6
    assert max(const) < 1e-6


@pytest.mark.criterion(8, "determinant relation, n = 2")
def test_criterion_08_det_relation(record_property):
    rng = np.random.default_rng(8)
    with Timer() as t:
        res = []
        for _ in range(10):
            p = sample_params("det-relation", 2, QG, rng)
            res.append(det_relation_residual(p, _random_multipoint(rng, 2, QG), SUM))
    assert record(record_property, res, t.seconds) < 1e-7


def _reflection_draws(seed):
    rng = np.random.default_rng(seed)
    for s in (2, 3):
        for _ in range(25):
            p = sample_params("reflection", s, Q, rng)
            idx = list(rng.permutation(p.n_params)[: s + 1] + 1)
            yield p, idx[:-2], idx[-2], idx[-1], default_xi(Q, rng)


@pytest.mark.criterion(9, "det M")
def test_criterion_09_reflection_det(record_property):
    res = []
    for p, fixed, j1, j2, _ in _reflection_draws(91):
        R = reflection_system(p, fixed, j1, j2)
        res.append(residual(np.linalg.det(R.M), R.det_closed))
    assert record(record_property, res) < 1e-10


@pytest.mark.criterion(9, "vector identity")
def test_criterion_09_reflection_vector(record_property):
    res = [residual(*reflection_sides(p, f, j1, j2, xi)) for p, f, j1, j2, xi in _reflection_draws(92)]
    assert record(record_property, res) < 1e-8


@pytest.mark.criterion(9, "Mentry0 relations")
def test_criterion_09_reflection_mentry0(record_property):
    res = []
    for p, f, j1, j2, xi in _reflection_draws(93):
        sub = reflection_subidentities(p, f, j1, j2, xi)
        res.extend(v for k, v in sub.items() if k.startswith("gamma"))
    assert record(record_property, res) < 1e-8


@pytest.mark.criterion(9, "Mentryi relations")
def test_criterion_09_reflection_mentryi(record_property):
    res = [0.0]
    for p, f, j1, j2, xi in _reflection_draws(94):
        sub = reflection_subidentities(p, f, j1, j2, xi)
        res.extend(v for k, v in sub.items() if k.startswith("sigma_tau"))
    assert record(record_property, res) < 1e-8


@pytest.mark.criterion(10, "balanced recurrence by two paths")
def test_criterion_10_balanced_recurrence(record_property):
    rng = np.random.default_rng(10)
    res = []
    for _ in range(25):
        p = sample_params("nassrallah-rahman", 2, Q, rng)
        j = int(rng.integers(1, p.n_params))
        res.append(residual(*balanced_recurrence_sides(p, j, default_xi(Q, rng))))
    assert record(record_property, res) < 1e-8


@pytest.mark.criterion(11, "six-parameter contour integral")
def test_criterion_11_nassrallah_rahman(record_property):
    rng = np.random.default_rng(11)
    res, err = [], []
    with Timer() as t:
        for _ in range(10):
            p = sample_params("nassrallah-rahman", 2, Q, rng)
            quad = nr_lhs(p)
            res.append(residual(quad.value, nr_rhs(p)))
            err.append(quad.est_error)
    record(record_property, res, t.seconds)
    assert max(res) < 1e-7
    assert max(err) < 1e-10
    assert t.seconds < 30


@pytest.mark.criterion(12, "residue decomposition")
def test_criterion_12_residue_decomposition(record_property):
    rng = np.random.default_rng(12)
    with Timer() as t:
        res = [
            residue_decomposition_residual(sample_params("residue-decomposition", 2, Q, rng))
            for _ in range(10)
        ]
    assert record(record_property, res, t.seconds) < 1e-7


@pytest.mark.criterion(13, "n = 2 torus integral")
def test_criterion_13_gustafson_integral(record_property):
    rng = np.random.default_rng(13)
    res = []
    with Timer() as t:
        for _ in range(3):
            p = sample_params("gustafson-integral", 2, Q, rng)
            assert np.all(np.abs(p.a[:-1]) <= 0.5)
            quad = gus_integral_lhs(p)
            assert quad.points_used <= 512
            res.append(residual(quad.value, gus_integral_rhs(p)))
    assert record(record_property, res, t.seconds) < 1e-6
    assert t.seconds < 600


@pytest.mark.criterion(14, "byte-identical json reports")
def test_criterion_14_determinism(tmp_path, capsys):
    paths = []
    for i, workers in enumerate(("1", "1", "2")):
        out = tmp_path / f"r{i}.json"
        code = main([
            "verify", "difference-system", "--trials", "6", "--seed", "1234",
            "--report", "json", "--out", str(out), "--no-timestamp", "--workers", workers,
        ])
        assert code == 0
        paths.append(out)
    blobs = [p.read_bytes() for p in paths]
    assert blobs[0] == blobs[1] == blobs[2]
    assert json.loads(blobs[0])["summary"]["trials"] == 6
