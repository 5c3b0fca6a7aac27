import numpy as np
import pytest

from proxdescent.core import CertificateKind, DimensionError, NotQuadratic, NotSmoothAt
from proxdescent.oracle import QuadraticOracle, abs_value, excess, l2_quadratic, smooth
from proxdescent.problems import default_corpus
from proxdescent.verify import (
    SamplingPlan,
    check_hessian_bounds,
    check_prox_regularity,
    check_prox_subgradient,
    check_subdiff_lipschitz,
    finite_difference_gradient_check,
    sample_ball,
)

square = smooth(lambda x: x[0] ** 2, lambda x: np.array([2.0 * x[0]]), 1, convex=True, id="square")
neg_sq = smooth(lambda x: -float(x @ x), lambda x: -2.0 * x, 2, id="neg_square")
diag14 = QuadraticOracle(np.diag([1.0, 4.0]), [0.0, 0.0])


def plan(center, radius=1.0, n=2000, seed=42):
    return SamplingPlan(np.atleast_1d(np.asarray(center, dtype=float)), radius, n, seed)


def test_sampling_plan_validation():
    with pytest.raises(ValueError):
        SamplingPlan([0.0], 0.0)
    with pytest.raises(ValueError):
        SamplingPlan([0.0], 1.0, num_points=0)


def test_sample_ball_inside():
    pts = sample_ball(np.random.default_rng(0), np.array([1.0, -1.0, 2.0]), 0.5, 5000)
    assert np.all(np.linalg.norm(pts - [1.0, -1.0, 2.0], axis=1) < 0.5)


@pytest.mark.parametrize("radius", [0.1, 1.0, 10.0])
def test_membership_exact_gradient_passes(radius):
    cert = check_prox_subgradient(square, [1.0], [2.0], 0.0, plan([1.0], radius))
    assert cert.passed and cert.kind is CertificateKind.PROX_SUBGRADIENT_MEMBERSHIP
    assert cert.estimated_constants["min_residual"] >= -1e-12


def test_membership_wrong_slope_fails():
    # by hand at y = 1.001: f(y) = 1.002001, bound = 1 + 0.003 - 0.0000005 = 1.0029995
    y = 1.001
    assert y * y < 1.0 + 3.0 * (y - 1.0) - 0.5 * (y - 1.0) ** 2
    cert = check_prox_subgradient(square, [1.0], [3.0], 1.0, plan([1.0], 0.1))
    assert not cert.passed
    for v in cert.violations:
        yy = v.witness["y"][0]
        assert yy * yy < 1.0 + 3.0 * (yy - 1.0) - 0.5 * (yy - 1.0) ** 2 - 2e-10


def test_membership_abs_at_kink():
    assert check_prox_subgradient(abs_value(), [0.0], [0.5], 0.0, plan([0.0])).passed


def test_membership_dimension_error():
    with pytest.raises(DimensionError):
        check_prox_subgradient(square, [1.0], [1.0, 2.0], 0.0, plan([1.0]))


@pytest.mark.parametrize("spec", [s for s in default_corpus() if s.convex], ids=lambda s: s.id)
@pytest.mark.parametrize("L", [1e-6, 1.0, 1e3])
def test_convex_regularity_shortcut(spec, L):
    center = spec.known_minimizer if spec.known_minimizer is not None else spec.x0
    p = plan(center, 1.0, 500)
    assert check_prox_regularity(spec.oracle, center, 1.0, L, p).passed


def test_regularity_concave_threshold():
    c = np.zeros(2)
    assert check_prox_regularity(neg_sq, c, 1.0, 2.0, plan(c)).passed
    assert check_prox_regularity(neg_sq, c, 1.0, 2.5, plan(c)).passed
    cert = check_prox_regularity(neg_sq, c, 1.0, 1.0, plan(c))
    assert not cert.passed
    assert cert.estimated_constants["L_required"] == pytest.approx(2.0, abs=1e-6)


def test_regularity_abs():
    assert check_prox_regularity(abs_value(), [0.0], 1.0, 0.1, plan([0.0])).passed


def test_regularity_monotone_in_L():
    c = np.zeros(2)
    verdicts = [check_prox_regularity(neg_sq, c, 1.0, L, plan(c, n=300)).passed for L in (0.5, 1.5, 1.99, 2.0, 3.0, 10.0)]
    assert verdicts == sorted(verdicts)


def test_abs_violates_lipschitz_across_kink():
    d_y = abs_value().prox_subdifferential([0.1])
    d_z = abs_value().prox_subdifferential([-0.1])
    assert excess(d_y, d_z) == 2.0
    cert = check_subdiff_lipschitz(abs_value(), [[0.1]], 0.3, 1.0, plan([0.1], n=500))
    assert not cert.passed
    for v in cert.violations:
        y, z = v.witness["y"][0], v.witness["z"][0]
        assert y > 0 > z and 2.0 > abs(y - z) + 1e-10


def test_lipschitz_diag_quadratic():
    rng = np.random.default_rng(5)
    omega = rng.uniform(-2, 2, (100, 2))
    assert check_subdiff_lipschitz(diag14, omega, 1.0, 4.0, plan([0, 0])).passed
    cert = check_subdiff_lipschitz(diag14, omega, 1.0, 3.9, plan([0, 0]))
    assert not cert.passed
    for v in cert.violations:
        h = v.witness["y"] - v.witness["z"]
        assert np.linalg.norm([h[0], 4 * h[1]]) > 3.9 * np.linalg.norm(h)
        assert abs(h[1]) > abs(h[0])  # witness direction leans on coordinate 2


def test_lipschitz_monotone_and_deterministic():
    f = l2_quadratic([1.0, -1.0])
    omega = np.random.default_rng(1).uniform(-1, 1, (50, 2))
    verdicts = [check_subdiff_lipschitz(f, omega, 1.0, L, plan([0, 0], n=300)).passed for L in (0.5, 0.9, 1.0, 2.0)]
    assert verdicts == [False, False, True, True]
    a = check_subdiff_lipschitz(f, omega, 1.0, 0.5, plan([0, 0], n=300)).to_dict()
    b = check_subdiff_lipschitz(f, omega, 1.0, 0.5, plan([0, 0], n=300)).to_dict()
    assert a == b
    with pytest.raises(DimensionError):
        check_subdiff_lipschitz(f, np.zeros((3, 3)), 1.0, 1.0, plan([0, 0]))


def test_hessian_examples():
    assert check_hessian_bounds(diag14, 1.0, 4.0).passed
    cert = check_hessian_bounds(diag14, 2.0, 4.0)
    assert not cert.passed
    low = [v for v in cert.violations if v.witness["source"] == "shifted_power_iteration"]
    assert low, "the bottom eigenvector should be among the witnesses"
    y = low[0].witness["y"]
    assert abs(abs(y[0]) - 1.0) < 1e-6 and y @ diag14.A @ y < 2.0
    q = QuadraticOracle([[2.0, 1.0], [1.0, 2.0]], [3.0, 3.0])
    assert check_hessian_bounds(q, 1.0, 3.0).passed
    assert not check_hessian_bounds(q, 1.0, 2.9).passed
    with pytest.raises(NotQuadratic):
        check_hessian_bounds(abs_value(), 0.0, 1.0)


def test_fd_examples():
    cert = finite_difference_gradient_check(l2_quadratic([1.0, 2.0, 2.0]), np.zeros(3), 1e-4)
    assert cert.passed and cert.estimated_constants["max_deviation"] <= 1e-8
    assert finite_difference_gradient_check(diag14, [2.0, 1.0]).passed
    with pytest.raises(NotSmoothAt):
        finite_difference_gradient_check(abs_value(), [0.0])


def test_fd_catches_wrong_gradient():
    bad = smooth(lambda x: float(x @ x), lambda x: 3.0 * x, 2, id="bad_grad")
    cert = finite_difference_gradient_check(bad, [1.0, 1.0])
    assert not cert.passed and cert.violation_count == 2
