"""Acceptance criteria, one ``test_cNN_*`` group per criterion.

Run ``pytest tests/test_acceptance.py`` (or this file directly); the
terminal summary prints one PASS/FAIL line per criterion. Expected values
come from closed forms or brute-force searches written here, never from the
package under test.
"""
import json
import math
import sys

import numpy as np
import pytest

from proxdescent import (
    SamplingPlan,
    SolverConfig,
    check_hessian_bounds,
    check_prox_regularity,
    check_prox_subgradient,
    check_subdiff_lipschitz,
    default_corpus,
    descent_bound_report,
    make_seeded_l2_quadratic,
    make_strictly_convex_quadratic,
    run_nsdm,
    run_sdm,
    smooth,
)
from proxdescent.cli import main as cli_main
from proxdescent.problems import l2_target
from proxdescent.verify import level_set_samples

crit = pytest.mark.criterion
C1 = crit(1, "l2 quadratic solved in one exact step, dims 1/3/10/100")
C2 = crit(2, "l2 quadratic subdifferential Lipschitz: pass at L=1, fail at L=0.5")
C3 = crit(3, "strictly convex quadratic: Hessian bounds (1,3) and convergence to (1,1)")
C4 = crit(4, "nonsmooth convex: |x| and l1 composites reach the soft-threshold minimizer")
C5 = crit(5, "descent bound holds on every convex corpus trace (eps=0.1, declared L)")
C6 = crit(6, "monotone descent and level-set confinement, 20 random starts per problem")
C7 = crit(7, "subgradient norm reaches 1e-8 on bounded-level-set convex problems")
C8 = crit(8, "membership and prox-regularity verifiers accept and reject correctly")
C9 = crit(9, "SDM and NSDM produce identical iterates on smooth problems")
C10 = crit(10, "bench output is byte-identical across runs")


def _fsum_sq(v):
    return math.fsum(float(a) * float(a) for a in v)


# 1 ---------------------------------------------------------------------------


@C1
@pytest.mark.parametrize("dim", [1, 3, 10, 100])
def test_c01_l2_one_step(dim):
    y = np.random.default_rng(7).standard_normal(dim)
    assert np.array_equal(y, l2_target(dim, 7))
    spec = make_seeded_l2_quadratic(dim, 7)
    assert np.array_equal(spec.x0, np.zeros(dim))
    trace = run_nsdm(spec.oracle, spec.x0, SolverConfig())
    assert trace.iterations == 1
    assert trace.final.status.converged
    assert np.linalg.norm(trace.x_final - y) <= 1e-8
    f_star = 3.0 - 0.5 * _fsum_sq(y)
    assert abs(trace.final.f_value - f_star) <= 1e-10 * abs(f_star)


# 2 ---------------------------------------------------------------------------


def _l2_lipschitz(L):
    spec = make_seeded_l2_quadratic(10, 7)
    omega = level_set_samples(spec.oracle, spec.x0, spec.level_set_center, spec.level_set_radius, 200, 42)
    plan = SamplingPlan(spec.x0, 1.0, num_points=2000, seed=42)
    return spec, omega, check_subdiff_lipschitz(spec.oracle, omega, 1.0, L, plan)


@C2
def test_c02_lipschitz_one_passes():
    spec, omega, cert = _l2_lipschitz(1.0)
    f0 = spec.oracle.eval(spec.x0)
    assert all(spec.oracle.eval(p) <= f0 for p in omega)
    assert cert.samples_tested == 2000
    assert cert.passed and cert.violation_count == 0


@C2
def test_c02_lipschitz_half_fails_with_witness():
    spec, _, cert = _l2_lipschitz(0.5)
    assert not cert.passed and cert.violations
    y_star = l2_target(10, 7)
    for v in cert.violations:
        y, z = v.witness["y"], v.witness["z"]
        # gradients x - y* at both points; their distance is |y - z| exactly
        dist = np.linalg.norm((y - y_star) - (z - y_star))
        assert dist > 0.5 * np.linalg.norm(y - z) + 1e-10


# 3 ---------------------------------------------------------------------------


@C3
def test_c03_hessian_bounds():
    A = np.array([[2.0, 1.0], [1.0, 2.0]])
    spec = make_strictly_convex_quadratic(A, [3.0, 3.0], 0.0, x0=[-2.0, 1.0])
    eig = np.linalg.eigvalsh(A)
    assert np.allclose(eig, [1.0, 3.0])
    assert check_hessian_bounds(spec.oracle, 1.0, 3.0).passed


@C3
def test_c03_converges_to_minimizer():
    A = np.array([[2.0, 1.0], [1.0, 2.0]])
    b = np.array([3.0, 3.0])
    x_star = np.linalg.solve(A, b)
    f_star = 0.5 * x_star @ A @ x_star - b @ x_star
    assert np.allclose(x_star, [1.0, 1.0]) and abs(f_star + 3.0) < 1e-15
    spec = make_strictly_convex_quadratic(A, b, 0.0, x0=[-2.0, 1.0])
    trace = run_nsdm(spec.oracle, spec.x0, SolverConfig(max_iters=200))
    assert trace.iterations <= 200
    assert abs(trace.final.f_value - (-3.0)) <= 1e-10
    assert np.linalg.norm(trace.x_final - np.array([1.0, 1.0])) <= 1e-5


# 4 ---------------------------------------------------------------------------


def _soft(b, lam, diag):
    return np.array([math.copysign(max(abs(bi) - lam, 0.0), bi) / d for bi, d in zip(b, diag)])


def _grid_argmin_1d(f, lo=-5.0, hi=5.0, step=1e-4):
    t = np.arange(lo, hi + step, step)
    return t[np.argmin(f(t))]


NONSMOOTH = {
    "abs": (lambda: np.array([0.0]), lambda t: np.abs(t)),
    "l1_soft_2": (lambda: _soft([2.0], 1.0, [1.0]), lambda t: np.abs(t) + 0.5 * t * t - 2.0 * t),
    "l1_soft_half": (lambda: _soft([0.5], 1.0, [1.0]), lambda t: np.abs(t) + 0.5 * t * t - 0.5 * t),
    "l1_diag_2": (lambda: _soft([2.0, -2.0], 0.5, [1.0, 1.0]), None),
}


@C4
@pytest.mark.parametrize("pid", sorted(NONSMOOTH))
def test_c04_nonsmooth_convex(pid, corpus_runs):
    spec, trace = corpus_runs[pid]
    expected_fn, f1d = NONSMOOTH[pid]
    expected = expected_fn()
    if f1d is not None:
        # independent cross-check of the closed form by grid search
        assert abs(_grid_argmin_1d(f1d) - expected[0]) <= 1e-3
    else:
        # separable: each coordinate is 0.5|t| + t^2/2 -/+ 2t
        for i, bi in enumerate([2.0, -2.0]):
            assert abs(_grid_argmin_1d(lambda t: 0.5 * np.abs(t) + 0.5 * t * t - bi * t) - expected[i]) <= 1e-3
    assert trace.final.status.converged
    assert trace.final.subgrad_norm <= 1e-8
    assert np.max(np.abs(trace.x_final - expected)) <= 1e-6


# 5 ---------------------------------------------------------------------------

CONVEX_IDS = sorted(s.id for s in default_corpus() if s.convex)


@C5
@pytest.mark.parametrize("pid", CONVEX_IDS)
def test_c05_descent_bound(pid, corpus_runs):
    spec, trace = corpus_runs[pid]
    cert = descent_bound_report(trace, spec.declared["L"], 0.1, slack=1e-9)
    assert cert.passed, cert.violations[:3]


# 6 ---------------------------------------------------------------------------

ALL_IDS = sorted(s.id for s in default_corpus())
RANDOM_START_MAX_ITERS = 2000


def _check_monotone(spec, trace):
    recs = trace.records
    f0 = spec.oracle.eval(recs[0].x)
    prev = f0
    for r in recs[1:]:
        fn = spec.oracle.eval(r.x)
        assert fn == r.f_value
        assert fn <= prev + 1e-12 * (1 + abs(prev))
        assert fn <= f0
        prev = fn


@C6
@pytest.mark.parametrize("pid", ALL_IDS)
def test_c06_monotone_default_start(pid, corpus_runs):
    spec, trace = corpus_runs[pid]
    _check_monotone(spec, trace)


@C6
@pytest.mark.parametrize("pid", ALL_IDS)
def test_c06_monotone_random_starts(pid, corpus_runs):
    spec, _ = corpus_runs[pid]
    cfg = SolverConfig(max_iters=RANDOM_START_MAX_ITERS)
    for seed in range(20):
        x0 = spec.x0 + np.random.default_rng(seed).standard_normal(spec.oracle.dim)
        trace = run_nsdm(spec.oracle, x0, cfg)
        _check_monotone(spec, trace)


# 7 ---------------------------------------------------------------------------

BOUNDED_CONVEX = sorted(s.id for s in default_corpus() if s.convex and s.bounded_level_set)


@C7
@pytest.mark.parametrize("pid", BOUNDED_CONVEX)
def test_c07_subgradient_decay(pid, corpus_runs):
    spec, trace = corpus_runs[pid]
    assert trace.iterations <= 100_000
    assert np.min(trace.subgrad_norms()) <= 1e-8


# 8 ---------------------------------------------------------------------------

square = smooth(lambda x: x[0] ** 2, lambda x: np.array([2.0 * x[0]]), 1, convex=True, id="square")
neg_sq = smooth(lambda x: -float(x @ x), lambda x: -2.0 * x, 2, id="neg_square")


@C8
def test_c08_membership_accepts():
    cert = check_prox_subgradient(square, [1.0], [2.0], 0.0, SamplingPlan([1.0], 1.0, 2000, 42))
    assert cert.passed


@C8
def test_c08_membership_rejects_with_witness():
    plan = SamplingPlan([1.0], 0.1, 2000, 42)
    cert = check_prox_subgradient(square, [1.0], [3.0], 1.0, plan)
    again = check_prox_subgradient(square, [1.0], [3.0], 1.0, plan)
    assert not cert.passed and cert.violations
    assert cert.to_dict() == again.to_dict()
    for v in cert.violations:
        y = float(v.witness["y"][0])
        h = y - 1.0
        assert y * y < 1.0 + 3.0 * h - 0.5 * h * h - 1e-10 * 2.0


@C8
@pytest.mark.parametrize("L,should_pass", [(2.5, True), (1.0, False)])
def test_c08_prox_regularity_concave(L, should_pass):
    plan = SamplingPlan(np.zeros(2), 1.0, 2000, 42)
    cert = check_prox_regularity(neg_sq, np.zeros(2), 1.0, L, plan)
    assert cert.passed is should_pass
    if not should_pass:
        assert cert.violations
        for v in cert.violations:
            y, yp = v.witness["y"], v.witness["y_prime"]
            w = -2.0 * y
            h = yp - y
            residual = -(yp @ yp) - (-(y @ y) + w @ h - 0.5 * L * (h @ h))
            assert residual == pytest.approx((L - 2.0) / 2.0 * (h @ h), rel=1e-9, abs=1e-12)
            assert residual < -1e-10 * (1 + y @ y)


# 9 ---------------------------------------------------------------------------

SMOOTH_IDS = sorted(s.id for s in default_corpus() if s.oracle.smooth)


@C9
@pytest.mark.parametrize("pid", SMOOTH_IDS)
def test_c09_sdm_equals_nsdm(pid, corpus_runs):
    spec, nsdm = corpus_runs[pid]
    sdm = run_sdm(spec.oracle, spec.x0, SolverConfig())
    assert len(sdm.records) == len(nsdm.records)
    for a, b in zip(sdm.records, nsdm.records):
        assert np.max(np.abs(a.x - b.x)) <= 1e-14
        assert a.status == b.status
    assert np.max(np.abs(sdm.x_final - nsdm.x_final)) <= 1e-14


# 10 --------------------------------------------------------------------------


@C10
def test_c10_bench_deterministic(tmp_path):
    outputs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        d.mkdir()
        cfg = d / "bench.json"
        cfg.write_text(json.dumps({"corpus": "default", "output": {"summary": "out.csv", "report": "out.json"}}))
        assert cli_main(["bench", str(cfg), "--jobs", "2" if k else "1"]) == 0
        outputs.append(((d / "out.csv").read_bytes(), (d / "out.json").read_bytes()))
    assert outputs[0] == outputs[1]
    rows = outputs[0][0].decode().splitlines()
    assert len(rows) == 1 + len(ALL_IDS) + len(SMOOTH_IDS)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
