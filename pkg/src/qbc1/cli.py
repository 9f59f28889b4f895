"""Batch verification harness: parameter sampling, suite execution, reports.

Each suite draws random parameter sets from a domain where the identities
it checks are expected to hold, evaluates both sides independently and
records mixed residuals ``|L - R| / (1 + max(|L|, |R|))``.  Trial ``i`` uses
its own generator seeded with ``seed ^ i``, so reports do not depend on the
order or parallelism of execution.

Exit codes of ``qbc1 verify``: 0 all trials pass, 1 some identity failed,
2 configuration error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import datetime
import itertools
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import contour, diffsys, gustafson
from .bc1 import (
    Balancing,
    ParameterSet,
    SumResult,
    TruncationPolicy,
    default_xi,
    e_func,
    record_sums,
    residual,
    shift_alpha,
)
from .errors import (
    BalancedError,
    BoxLimitError,
    DivergenceError,
    NonConvergenceError,
    QBC1Error,
    SamplerExhaustedError,
)
from .qcore import theta

SCHEMA_VERSION = 1
MAX_REJECTIONS = 1000
PAIR_TOL = 1e-6

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NONCONVERGENCE = 0, 1, 2, 3

SUITES = (
    "key-equation",
    "difference-system",
    "regularized-system",
    "reflection",
    "gustafson-sum",
    "det-relation",
    "nassrallah-rahman",
    "gustafson-integral",
    "residue-decomposition",
    "kernels",
)

# suite -> (balancing required of explicit parameters, default size, size is "s" or "n")
_SUITE_SHAPE = {
    "key-equation": (Balancing.GENERIC, 2, "s"),
    "difference-system": (Balancing.GENERIC, 2, "s"),
    "regularized-system": (Balancing.GENERIC, 2, "s"),
    "reflection": (Balancing.PRODUCT_ONE, 2, "s"),
    "gustafson-sum": (Balancing.GENERIC, 2, "n"),
    "det-relation": (Balancing.GENERIC, 2, "n"),
    "nassrallah-rahman": (Balancing.PRODUCT_Q, 2, "s"),
    "gustafson-integral": (Balancing.PRODUCT_Q, 2, "n"),
    "residue-decomposition": (Balancing.PRODUCT_Q, 2, "s"),
    "kernels": (None, 1, "s"),
}

_NONCONVERGENCE = (NonConvergenceError, BoxLimitError, DivergenceError)


class ConfigError(QBC1Error, ValueError):
    """Invalid harness configuration (exit code 2)."""


@dataclass(frozen=True)
class SuiteConfig:
    suite: str
    q: float | None = None
    size: int | None = None
    trials: int = 25
    seed: int = 0
    tol_sum: float = 1e-11
    tol_identity: float = 1e-8
    max_terms: int = 5000
    explicit_params: tuple | None = None
    boundary_corrected: bool = False
    workers: int = 1

    @property
    def base(self) -> float:
        """The q actually used: the multiple sums default to 0.2, the rest to 0.3."""
        if self.q is not None:
            return float(self.q)
        return 0.2 if self.suite in ("gustafson-sum", "det-relation") else 0.3

    @property
    def order(self) -> int:
        """The s (or n) actually used by the suite."""
        return _SUITE_SHAPE[self.suite][1] if self.size is None else int(self.size)

    def truncation(self) -> TruncationPolicy:
        return TruncationPolicy(tol_rel=self.tol_sum, max_terms=self.max_terms)

    def validate(self) -> None:
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}")
        if not 0.0 < self.base < 1.0:
            raise ConfigError("q must lie in (0, 1)")
        if self.trials < 0:
            raise ConfigError("trials must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.tol_sum <= 0 or self.tol_identity <= 0 or self.max_terms < 1:
            raise ConfigError("tolerances and max_terms must be positive")
        mode, _, kind = _SUITE_SHAPE[self.suite]
        order = self.order
        limits = {
            "key-equation": (1, 3),
            "difference-system": (1, 3),
            "regularized-system": (1, 3),
            "reflection": (2, 4),
            "gustafson-sum": (1, 3),
            "det-relation": (1, 3),
            "nassrallah-rahman": (2, 2),
            "gustafson-integral": (1, 2),
            "residue-decomposition": (2, 2),
            "kernels": (1, 1 << 30),
        }[self.suite]
        if not limits[0] <= order <= limits[1]:
            raise ConfigError(
                f"{self.suite} supports {kind} in {limits[0]}..{limits[1]}, got {order}"
            )
        if self.explicit_params is not None:
            if mode is None:
                raise ConfigError("the kernels suite takes no parameters")
            params = explicit_parameter_set(self)
            if params.balancing is not mode:
                raise ConfigError(
                    f"{self.suite} needs {mode.value} parameters, got {params.balancing.value}"
                )
            if params.s != _suite_s(self.suite, order):
                raise ConfigError(
                    f"{self.suite} with {kind}={order} needs "
                    f"{2 * _suite_s(self.suite, order) + 2} exponents, got {params.n_params}"
                )


def _suite_s(suite: str, order: int) -> int:
    return order + 1 if suite == "gustafson-integral" else order


def explicit_parameter_set(config: SuiteConfig) -> ParameterSet:
    try:
        return ParameterSet(config.base, tuple(complex(a) for a in config.explicit_params))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad explicit parameters: {exc}") from exc


# ---------------------------------------------------------------- sampling


def _pairwise_ok(a: np.ndarray, min_gap: float = PAIR_TOL) -> bool:
    for i, j in itertools.combinations(range(a.size), 2):
        if abs(a[i] - a[j]) < min_gap or abs(1.0 - a[i] * a[j]) < PAIR_TOL:
            return False
    return True


def _near_half_integer(x: float, gap: float = 0.05) -> bool:
    frac = (x - 0.5) % 1.0
    return min(frac, 1.0 - frac) < gap


def _draw(suite: str, s: int, q: float, rng: np.random.Generator) -> ParameterSet | None:
    lq = math.log(q)
    m = 2 * s + 2
    if suite in ("key-equation", "difference-system", "regularized-system"):
        alpha = rng.uniform(-0.25, -0.06, m) + 1j * rng.uniform(-0.3, 0.3, m)
        params = ParameterSet(q, tuple(alpha))
        sa = params.sum_alpha.real
        if suite == "regularized-system" and (
            _near_half_integer(sa) or _near_half_integer(sa + 1)
        ):
            return None
        return params if sa < -0.2 and _pairwise_ok(params.a) else None
    if suite == "reflection":
        free = rng.uniform(-0.25, 0.25, m - 1) + 1j * rng.uniform(-0.3, 0.3, m - 1)
        params = ParameterSet.balanced(q, free, Balancing.PRODUCT_ONE)
        return params if _pairwise_ok(params.a) else None
    if suite in ("gustafson-sum", "det-relation"):
        # n = 3 boxes are capped at a small radius, so the sums (including
        # the one shifted by a_j -> q a_j) must decay faster there
        target = rng.uniform(-1.45, -1.1) if s == 3 else rng.uniform(-0.85, -0.6)
        w = rng.uniform(0.5, 1.5, m)
        alpha = target * w / w.sum() + 1j * rng.uniform(-0.3, 0.3, m)
        params = ParameterSet(q, tuple(alpha))
        return params if _pairwise_ok(params.a) else None
    if suite in ("nassrallah-rahman", "residue-decomposition", "gustafson-integral"):
        # small |a_k| make the residue terms large and cancelling; the
        # decomposition suite keeps them away from zero and from each other
        lo, hi, gap = (0.3, 0.6, 0.1) if suite == "residue-decomposition" else (0.1, 0.6, 0.02)
        if s > 2:
            hi = 0.5
        mod = rng.uniform(lo, hi, m - 1)
        arg = rng.uniform(-math.pi, math.pi, m - 1)
        free = (np.log(mod) + 1j * arg) / lq
        params = ParameterSet.balanced(q, free, Balancing.PRODUCT_Q)
        a = params.a
        if 1.0 - np.max(np.abs(a[:-1])) < 0.05 or not _pairwise_ok(a[:-1], gap):
            return None
        return params if _pairwise_ok(a) else None
    raise ConfigError(f"no parameter domain for suite {suite!r}")


def sample_params(suite: str, s: int, q: float, rng: np.random.Generator) -> ParameterSet:
    """A random parameter set from the suite's verification domain.

    ``s`` is the number of the suite's own size parameter (``n`` for the
    multiple sums and integrals).  Draws that are degenerate or too close to
    the convergence boundary are rejected and redrawn.
    """
    if suite not in _SUITE_SHAPE or _SUITE_SHAPE[suite][0] is None:
        raise ConfigError(f"suite {suite!r} has no parameter domain")
    s_eff = _suite_s(suite, s)
    for _ in range(MAX_REJECTIONS):
        params = _draw(suite, s_eff, q, rng)
        if params is not None:
            return params
    raise SamplerExhaustedError(f"{suite}: no admissible draw in {MAX_REJECTIONS} attempts")


def _random_indices(rng, m: int, k: int) -> list:
    return [int(i) + 1 for i in rng.permutation(m)[:k]]


def _random_multipoint(rng, n: int, q: float) -> gustafson.MultiPoint:
    while True:
        r = rng.uniform(0.8, 1.25, n)
        phase = rng.uniform(-0.4, 0.4, n)
        vals = r * np.exp(1j * phase)
        ok = all(
            abs(1.0 - v) > 0.05 and abs(1.0 + v) > 0.05 for v in vals
        ) and all(
            abs(vals[i] - vals[j]) > 0.05 and abs(1.0 - vals[i] * vals[j]) > 0.05
            for i, j in itertools.combinations(range(n), 2)
        )
        if ok:
            return gustafson.MultiPoint.from_values(vals, q)


# ---------------------------------------------------------------- suites


def _check_key_equation(config, params, rng, trunc):
    subset = sorted(_random_indices(rng, params.n_params, params.s))
    xi = default_xi(params.q, rng)
    res = {"key": diffsys.verify_key_equation(params, subset, xi, trunc)}
    return res, [xi]


def _system_indices(rng, params):
    idx = _random_indices(rng, params.n_params, params.s)
    return idx[:-1], idx[-1]


def _check_difference(config, params, rng, trunc):
    fixed, j = _system_indices(rng, params)
    xi = default_xi(params.q, rng)
    mats = diffsys.difference_matrix(params, fixed, j)
    shift = diffsys.difference_system_sides(params, fixed, j, xi, trunc)
    mult = diffsys.difference_system_sides(params, fixed, j, xi, trunc, route="multiply")
    res = {
        "shift": residual(*shift),
        "multiply": residual(*mult),
        "det": residual(np.linalg.det(mats.B), mats.det_closed),
    }
    return res, [xi]


def _check_regularized(config, params, rng, trunc):
    fixed, j = _system_indices(rng, params)
    xi = default_xi(params.q, rng)
    mats = diffsys.regularized_matrix(params, fixed, j)
    base = diffsys.difference_matrix(params, fixed, j)
    sides = diffsys.difference_system_sides(params, fixed, j, xi, trunc, regularize=True)
    aj = params.a_(j)
    res = {
        "shift": residual(*sides),
        "det": residual(np.linalg.det(mats.B), mats.det_closed),
        "det_scaling": residual(
            np.linalg.det(mats.B), np.linalg.det(base.B) * (-1.0 / aj) ** params.s
        ),
    }
    return res, [xi]


def _check_reflection(config, params, rng, trunc):
    idx = _random_indices(rng, params.n_params, params.s + 1)
    fixed, j1, j2 = idx[:-2], idx[-2], idx[-1]
    xi = default_xi(params.q, rng)
    corr = config.boundary_corrected
    R = diffsys.reflection_system(params, fixed, j1, j2)
    res = {"det": residual(np.linalg.det(R.M), R.det_closed)}
    res["vector"] = residual(*diffsys.reflection_sides(params, fixed, j1, j2, xi, trunc, corr))
    sub = diffsys.reflection_subidentities(params, fixed, j1, j2, xi, trunc, corr)
    for name in sorted(sub):
        res[name] = sub[name]
    return res, [xi]


def _check_gustafson_sum(config, params, rng, trunc):
    n = params.s
    x1 = _random_multipoint(rng, n, params.q)
    x2 = _random_multipoint(rng, n, params.q)
    j = _random_indices(rng, params.n_params, 1)[0]
    v1 = gustafson.cn_regularized(params, x1, trunc).value
    v2 = gustafson.cn_regularized(params, x2, trunc).value
    shifted = gustafson.cn_regularized(shift_alpha(params, j, 1), x1, trunc).value
    res = {
        "product": residual(v1, gustafson.gustafson_product(params)),
        "constancy": residual(v1, v2),
        "recurrence": residual(shifted / v1, diffsys.recurrence_factor_generic(params, j)),
    }
    return res, list(x1.components) + list(x2.components)


def _check_det_relation(config, params, rng, trunc):
    x = _random_multipoint(rng, params.s, params.q)
    res = {
        "regularized": gustafson.det_relation_residual(params, x, trunc),
        "unregularized": gustafson.det_relation_residual(params, x, trunc, regularize=False),
    }
    return res, list(x.components)


def _check_nassrallah_rahman(config, params, rng, trunc):
    quad = contour.nr_lhs(params)
    scaled = contour.scaled_params(params, 2)
    chained = contour.scaling_chain_factor(params, 2) * contour.nr_lhs(scaled).value
    res = {
        "integral": residual(quad.value, contour.nr_rhs(params)),
        "quadrature_error": quad.est_error,
        "chain": residual(quad.value, chained),
    }
    return res, []


def _check_gustafson_integral(config, params, rng, trunc):
    quad = contour.gus_integral_lhs(params)
    res = {
        "integral": residual(quad.value, contour.gus_integral_rhs(params)),
        "quadrature_error": quad.est_error,
    }
    return res, []


def _check_residue_decomposition(config, params, rng, trunc):
    j = _random_indices(rng, params.n_params - 1, 1)[0]
    k = _random_indices(rng, params.n_params - 1, 1)[0]
    shifted = diffsys.coupled_shift(params, j)
    ratio = contour.residue_coeff_R(shifted, k) / contour.residue_coeff_R(params, k)
    res = {
        "decomposition": contour.residue_decomposition_residual(params, trunc),
        "R_shift": residual(ratio, params.a_(j) * params.a[-1] / params.q),
    }
    return res, [params.log_point(m) for m in range(1, params.n_params)]


KERNEL_POINTS = 200


def _check_kernels(config, params, rng, trunc):
    q = config.base
    k = KERNEL_POINTS

    def points():
        return rng.uniform(0.5, 2.0, k) * np.exp(1j * rng.uniform(-math.pi, math.pi, k))

    z = points()
    th = theta(z, q)
    res = {
        "theta_shift": residual(theta(q * z, q) + th / z, 0.0),
        "theta_inversion": residual(theta(q / z, q), th),
    }
    x, y, w, u = points(), points(), points(), points()
    exy, eyx = e_func(x, y), e_func(y, x)
    scale = 1.0 + np.abs(exy)
    res["e_additive"] = float(np.max(np.abs(e_func(x, w) - exy - e_func(y, w)) / scale))
    res["e_antisymmetry"] = float(np.max(np.abs(exy + eyx) / scale))
    res["e_inversion"] = float(np.max(np.abs(exy - e_func(1.0 / x, y)) / scale))
    t1 = e_func(x, y) * e_func(w, u)
    t2 = e_func(x, w) * e_func(y, u)
    t3 = e_func(x, u) * e_func(y, w)
    big = 1.0 + np.maximum(np.maximum(np.abs(t1), np.abs(t2)), np.abs(t3))
    res["e_three_term"] = float(np.max(np.abs(t1 - t2 + t3) / big))
    return res, []


_CHECKS: dict = {
    "key-equation": _check_key_equation,
    "difference-system": _check_difference,
    "regularized-system": _check_regularized,
    "reflection": _check_reflection,
    "gustafson-sum": _check_gustafson_sum,
    "det-relation": _check_det_relation,
    "nassrallah-rahman": _check_nassrallah_rahman,
    "gustafson-integral": _check_gustafson_integral,
    "residue-decomposition": _check_residue_decomposition,
    "kernels": _check_kernels,
}


# ---------------------------------------------------------------- reports


@dataclass
class TrialRecord:
    index: int
    alphas: list
    points: list
    residuals: dict
    terms: int
    converged: bool
    passed: bool
    error: str | None = None

    @property
    def max_residual(self) -> float:
        vals = [v for v in self.residuals.values() if v is not None]
        return max(vals) if vals else math.nan


@dataclass
class VerificationReport:
    config: SuiteConfig
    trials: list = field(default_factory=list)
    seconds: float = 0.0
    timestamp: str | None = None

    @property
    def pass_count(self) -> int:
        return sum(t.passed for t in self.trials)

    @property
    def passed(self) -> bool:
        return self.pass_count == len(self.trials)

    @property
    def converged(self) -> bool:
        return all(t.converged for t in self.trials)

    @property
    def max_residual(self) -> float | None:
        vals = [t.max_residual for t in self.trials if not math.isnan(t.max_residual)]
        return max(vals) if vals else None

    @property
    def exit_code(self) -> int:
        if not self.converged:
            return EXIT_NONCONVERGENCE
        return EXIT_PASS if self.passed else EXIT_FAIL

    def to_dict(self, include_timing: bool = True) -> dict:
        cfg = asdict(self.config)
        cfg["size"] = self.config.order
        cfg["q"] = self.config.base
        del cfg["workers"]  # execution detail; reports must not depend on it
        if cfg["explicit_params"] is not None:
            cfg["explicit_params"] = [_pair(a) for a in self.config.explicit_params]
        trials = []
        for t in self.trials:
            rec = {
                "index": t.index,
                "alphas": t.alphas,
                "points": t.points,
                "residuals": {k: _finite(v) for k, v in t.residuals.items()},
                "terms": t.terms,
                "converged": t.converged,
                "pass": t.passed,
            }
            if t.error is not None:
                rec["error"] = t.error
            trials.append(rec)
        out = {
            "schema": SCHEMA_VERSION,
            "suite": self.config.suite,
            "config": cfg,
            "trials": trials,
            "summary": {
                "pass": self.passed,
                "pass_count": self.pass_count,
                "trials": len(self.trials),
                "max_residual": _finite(self.max_residual),
                "seconds": round(self.seconds, 6) if include_timing else None,
            },
        }
        if include_timing and self.timestamp is not None:
            out["timestamp"] = self.timestamp
        return out


def _pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _finite(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


REPORT_SCHEMA = {
    "type": "object",
    "required": ["schema", "suite", "config", "trials", "summary"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "suite": {"enum": list(SUITES)},
        "config": {"type": "object"},
        "trials": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["index", "alphas", "residuals", "terms", "converged", "pass"],
                "properties": {
                    "index": {"type": "integer", "minimum": 0},
                    "alphas": {
                        "type": "array",
                        "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
                    },
                    "points": {"type": "array"},
                    "residuals": {
                        "type": "object",
                        "additionalProperties": {"type": ["number", "null"]},
                    },
                    "terms": {"type": "integer", "minimum": 0},
                    "converged": {"type": "boolean"},
                    "pass": {"type": "boolean"},
                    "error": {"type": "string"},
                },
            },
        },
        "summary": {
            "type": "object",
            "required": ["pass", "max_residual", "seconds"],
            "properties": {
                "pass": {"type": "boolean"},
                "pass_count": {"type": "integer"},
                "max_residual": {"type": ["number", "null"]},
                "seconds": {"type": ["number", "null"]},
            },
        },
    },
}


# ---------------------------------------------------------------- execution


def trial_seed(seed: int, index: int) -> int:
    return (int(seed) ^ int(index)) & (2**64 - 1)


def _count_terms(log: Sequence) -> tuple:
    terms = 0
    converged = True
    for r in log:
        if isinstance(r, SumResult):
            terms += r.terms_used
            converged &= r.converged
        else:
            terms += r.points_used
    return terms, converged


def run_trial(config: SuiteConfig, index: int) -> TrialRecord:
    """Run one trial; errors are recorded instead of raised."""
    rng = np.random.default_rng(trial_seed(config.seed, index))
    params = None
    try:
        if config.suite == "kernels":
            pass
        elif config.explicit_params is not None:
            params = explicit_parameter_set(config)
        else:
            params = sample_params(config.suite, config.order, config.base, rng)
        with record_sums() as log:
            residuals, points = _CHECKS[config.suite](config, params, rng, config.truncation())
        terms, converged = _count_terms(log)
        residuals = {k: float(v) for k, v in residuals.items()}
        passed = converged and all(
            math.isfinite(v) and v < config.tol_identity for v in residuals.values()
        )
        err = None
    except (QBC1Error, ArithmeticError, ValueError, IndexError) as exc:
        residuals, points, terms, passed = {}, [], 0, False
        converged = not isinstance(exc, _NONCONVERGENCE)
        err = f"{type(exc).__name__}: {exc}"
    alphas = [] if params is None else [_pair(a) for a in params.alpha]
    return TrialRecord(
        index,
        alphas,
        [_pair(p.value()) for p in points],
        residuals,
        int(terms),
        bool(converged),
        bool(passed),
        err,
    )


def _run_indexed(args):
    return run_trial(*args)


def run_suite(config: SuiteConfig) -> VerificationReport:
    """Execute ``config.trials`` trials and assemble them in index order."""
    config.validate()
    start = time.perf_counter()
    jobs = [(config, i) for i in range(config.trials)]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            trials = list(pool.map(_run_indexed, jobs))
    else:
        trials = [run_trial(*job) for job in jobs]
    seconds = time.perf_counter() - start
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    return VerificationReport(config, trials, seconds, stamp)


def format_text(report: VerificationReport) -> str:
    cfg = report.config
    lines = [
        f"suite {cfg.suite}  q={cfg.base}  size={cfg.order}  trials={len(report.trials)}  "
        f"seed={cfg.seed}  tol_identity={cfg.tol_identity:g}"
    ]
    for t in report.trials:
        status = "pass" if t.passed else "FAIL"
        worst = "n/a" if math.isnan(t.max_residual) else f"{t.max_residual:.3e}"
        line = f"trial {t.index:4d}  max residual {worst}  terms {t.terms:7d}  {status}"
        if t.error:
            line += f"  ({t.error})"
        lines.append(line)
    worst = report.max_residual
    lines.append(
        f"summary: {report.pass_count}/{len(report.trials)} passed, max residual "
        + ("n/a" if worst is None else f"{worst:.3e}")
        + f", {report.seconds:.2f} s"
    )
    return "\n".join(lines) + "\n"


def format_json(report: VerificationReport, include_timing: bool = True) -> str:
    return json.dumps(report.to_dict(include_timing), indent=2, sort_keys=True) + "\n"


def emit_report(
    report: VerificationReport,
    format: str = "json",
    path: str | None = None,
    include_timing: bool = True,
) -> None:
    """Write the report as json or text to ``path`` (standard output if None)."""
    if format == "json":
        text = format_json(report, include_timing)
    elif format == "text":
        text = format_text(report)
    else:
        raise ConfigError(f"unknown report format {format!r}")
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def load_params_file(path: str) -> dict:
    """Read ``{"q": .., "s": .., "alpha": [[re, im], ...]}`` from a json file."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read parameter file {path}: {exc}") from exc
    if not isinstance(doc, dict) or "alpha" not in doc:
        raise ConfigError(f"{path}: expected an object with an 'alpha' list")
    try:
        alpha = tuple(complex(float(re), float(im)) for re, im in doc["alpha"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: alpha entries must be [re, im] pairs") from exc
    out = {"alpha": alpha}
    if "q" in doc:
        out["q"] = float(doc["q"])
    for key in ("s", "n"):
        if key in doc:
            out["size"] = int(doc[key])
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbc1", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--q", type=float, default=None)
    size = v.add_mutually_exclusive_group()
    size.add_argument("--s", type=int, default=None, dest="size")
    size.add_argument("--n", type=int, default=None, dest="size")
    v.add_argument("--trials", type=int, default=25)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol-sum", type=float, default=1e-11)
    v.add_argument("--tol-id", type=float, default=1e-8)
    v.add_argument("--max-terms", type=int, default=5000)
    v.add_argument("--params", default=None, help="json file with q, s and alpha pairs")
    v.add_argument("--report", choices=("json", "text"), default="text")
    v.add_argument("--out", default=None)
    v.add_argument("--no-timestamp", action="store_true")
    v.add_argument(
        "--boundary-corrected",
        action="store_true",
        help="include the telescoping boundary term in the reflection checks",
    )
    v.add_argument("--workers", type=int, default=1)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        fields = {}
        if args.params:
            fields = load_params_file(args.params)
        q = args.q if args.q is not None else fields.get("q")
        size = args.size if args.size is not None else fields.get("size")
        config = SuiteConfig(
            suite=args.suite,
            q=q,
            size=size,
            trials=args.trials,
            seed=args.seed,
            tol_sum=args.tol_sum,
            tol_identity=args.tol_id,
            max_terms=args.max_terms,
            explicit_params=fields.get("alpha"),
            boundary_corrected=args.boundary_corrected,
            workers=max(1, args.workers),
        )
        report = run_suite(config)
    except (ConfigError, BalancedError, SamplerExhaustedError) as exc:
        print(f"qbc1: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        emit_report(report, args.report, args.out, include_timing=not args.no_timestamp)
    except OSError as exc:
        print(f"qbc1: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return report.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
