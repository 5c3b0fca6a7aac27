import numpy as np
import pytest

from proxdescent.core import SingularMatrix
from proxdescent.descent import run_nsdm
from proxdescent.oracle import Rule, select_subgradient
from proxdescent.problems import (
    corpus_by_id,
    default_corpus,
    eigen_bounds,
    make_abs,
    make_l1_composite,
    make_l2_quadratic,
    make_max_affine,
    make_smooth_nonconvex,
    make_strictly_convex_quadratic,
    power_iteration,
)
from proxdescent.verify import SamplingPlan, check_prox_regularity, sample_ball


def test_l2_examples():
    s = make_l2_quadratic([1.0, 2.0, 2.0])
    assert s.known_min_value == -1.5 and s.oracle.eval(s.known_minimizer) == -1.5
    assert s.declared["L"] == 1.0
    z = make_l2_quadratic([0.0, 0.0])
    assert z.known_min_value == 3.0
    assert run_nsdm(z.oracle, z.x0).iterations == 0
    assert make_l2_quadratic([5.0]).known_min_value == -9.5


def test_quadratic_examples():
    s = make_strictly_convex_quadratic(np.diag([1.0, 4.0]), [0.0, 0.0], 0.0, x0=[2.0, 1.0])
    np.testing.assert_array_equal(s.known_minimizer, [0.0, 0.0])
    s = make_strictly_convex_quadratic([[2.0, 1.0], [1.0, 2.0]], [3.0, 3.0])
    np.testing.assert_allclose(s.known_minimizer, np.linalg.solve([[2, 1], [1, 2]], [3, 3]), atol=1e-12)
    assert s.known_min_value == pytest.approx(-3.0, abs=1e-12)
    assert s.declared["m"] == pytest.approx(1.0, abs=1e-9) and s.declared["M"] == pytest.approx(3.0, abs=1e-9)
    s = make_strictly_convex_quadratic(np.eye(2), [1.0, 0.0])
    np.testing.assert_allclose(s.known_minimizer, [1.0, 0.0])
    assert s.known_min_value == -0.5
    with pytest.raises(SingularMatrix):
        make_strictly_convex_quadratic([[1.0, 0.0], [0.0, 0.0]], [1.0, 1.0])


def test_power_iteration_against_eigh():
    rng = np.random.default_rng(2)
    B = rng.standard_normal((6, 6))
    A = B @ B.T + 0.5 * np.eye(6)
    ev = np.linalg.eigvalsh(A)
    lo, hi = eigen_bounds(A)
    assert lo == pytest.approx(ev[0], rel=1e-6) and hi == pytest.approx(ev[-1], rel=1e-9)
    lam, v = power_iteration(A)
    assert np.linalg.norm(A @ v - lam * v) <= 1e-5 * lam


def _grid_min(f, lo, hi, step):
    g = np.arange(lo, hi + step / 2, step)
    X, Y = np.meshgrid(g, g, indexing="ij")
    vals = f(X, Y)
    i = np.unravel_index(np.argmin(vals), vals.shape)
    return np.array([X[i], Y[i]]), vals[i]


def test_max_affine_three_pieces_brute_force():
    def f(x, y):
        return np.maximum(np.maximum(x, y), -x - y) + 0.5 * (x * x + y * y)

    coarse, _ = _grid_min(f, -2.0, 2.0, 1e-2)
    g = np.arange(-0.02, 0.02 + 5e-5, 1e-4)
    X, Y = np.meshgrid(coarse[0] + g, coarse[1] + g, indexing="ij")
    vals = f(X, Y)
    i = np.unravel_index(np.argmin(vals), vals.shape)
    x_ref, f_ref = np.array([X[i], Y[i]]), vals[i]

    s = make_max_affine([([1.0, 0.0], 0.0), ([0.0, 1.0], 0.0), ([-1.0, -1.0], 0.0)], 1.0, x0=[1.5, -0.7])
    assert np.linalg.norm(s.known_minimizer - x_ref) <= 2e-4
    assert abs(s.known_min_value - f_ref) <= 1e-7
    tr = run_nsdm(s.oracle, s.x0)
    assert np.linalg.norm(tr.x_final - x_ref) <= 2e-4


def test_max_affine_other_examples():
    s = make_max_affine([([1.0], 0.0), ([-1.0], 0.0)], 0.0, x0=[2.0], known_minimizer=[0.0])
    assert s.known_min_value == 0.0
    s = make_max_affine([([1.0, 2.0], 0.5)], 1.0)
    np.testing.assert_allclose(s.known_minimizer, [-1.0, -2.0])
    assert s.known_min_value == pytest.approx(0.5 - 2.5)
    assert not s.oracle.smooth or s.oracle.prox_subdifferential([0.0, 0.0]).as_singleton() is not None


def test_l1_examples():
    assert make_l1_composite(1.0, [[1.0]], [2.0]).known_min_value == pytest.approx(-0.5)
    np.testing.assert_array_equal(make_l1_composite(1.0, [[1.0]], [2.0]).known_minimizer, [1.0])
    np.testing.assert_array_equal(make_l1_composite(1.0, [[1.0]], [0.5]).known_minimizer, [0.0])
    np.testing.assert_array_equal(make_l1_composite(0.5, np.eye(2), [2.0, -2.0]).known_minimizer, [1.5, -1.5])


def test_rosenbrock_examples():
    s = make_smooth_nonconvex("rosenbrock", x0=[-1.2, 1.0])
    assert s.oracle.eval([1.0, 1.0]) == 0.0
    with pytest.raises(ValueError):
        make_smooth_nonconvex("himmelblau")


def test_corpus_sorted_and_unique():
    ids = [s.id for s in default_corpus()]
    assert ids == sorted(ids) and len(set(ids)) == len(ids)
    assert set(corpus_by_id()) == set(ids)
    assert make_abs().declared["sharpness"] == 1.0


@pytest.mark.parametrize("spec", [s for s in default_corpus() if s.known_minimizer is not None], ids=lambda s: s.id)
def test_expected_values_consistent(spec):
    f = spec.oracle.eval(spec.known_minimizer)
    assert abs(f - spec.known_min_value) <= 1e-12 * max(1.0, abs(spec.known_min_value))
    if spec.convex:
        v = select_subgradient(spec.oracle.prox_subdifferential(spec.known_minimizer), Rule.MIN_NORM)
        assert np.linalg.norm(v) <= 1e-10


@pytest.mark.parametrize("spec", [s for s in default_corpus() if s.bounded_level_set], ids=lambda s: s.id)
def test_level_set_inside_declared_ball(spec):
    rng = np.random.default_rng(0)
    f0 = spec.oracle.eval(spec.x0)
    c, R = spec.level_set_center, spec.level_set_radius
    kept = []
    while len(kept) < 1000:
        for p in sample_ball(rng, c, 1.5 * R, 20_000):
            if spec.oracle.eval(p) <= f0:
                kept.append(p)
    kept = np.array(kept[:1000])
    assert np.all(np.linalg.norm(kept - c, axis=1) <= R)


@pytest.mark.parametrize("spec", [s for s in default_corpus() if s.convex], ids=lambda s: s.id)
def test_convex_specs_prox_regular_tiny_L(spec):
    p = SamplingPlan(spec.x0, 1.0, 500, 42)
    assert check_prox_regularity(spec.oracle, spec.x0, 1.0, 1e-6, p).passed


def test_with_start_recomputes_radius():
    s = corpus_by_id()["quad_diag_1_4"]
    far = s.with_start([20.0, 10.0])
    assert far.level_set_radius > s.level_set_radius
    assert corpus_by_id()["rosenbrock"].with_start([0.0, 0.0]).level_set_radius is None
