"""Sampled certification of the inequalities the convergence theory assumes.

Each check draws points from a seeded :class:`SamplingPlan` and returns a
:class:`~proxdescent.core.Certificate`. Failures carry witnesses that
reproduce the violated inequality; passes are evidence only.

Slacks are relative, ``1e-10 * (1 + |f|)``, so large objective values do not
produce spurious witnesses.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (
    CertificateKind,
    DimensionError,
    NotQuadratic,
    NotSmoothAt,
    ViolationLog,
    as_vector,
    check_same_dim,
)
from .oracle import Oracle, QuadraticOracle, Rule, excess, select_subgradient
from .problems import power_iteration

REL_SLACK = 1e-10


@dataclass(frozen=True)
class SamplingPlan:
    center: np.ndarray
    radius: float
    num_points: int = 2000
    seed: int = 42

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center, "center"))
        if not self.radius > 0:
            raise ValueError("radius must be > 0")
        if self.num_points < 1:
            raise ValueError("num_points must be >= 1")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def sample_ball(rng: np.random.Generator, center, radius: float, n: int) -> np.ndarray:
    """``n`` points uniform in the open ball ``B(center, radius)``."""
    center = np.asarray(center, dtype=float)
    d = center.shape[0]
    g = rng.standard_normal((n, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    rad = radius * rng.random(n) ** (1.0 / d)
    return center + g * rad[:, None]


def _slack(fx: float) -> float:
    return REL_SLACK * (1.0 + abs(fx))


def check_prox_subgradient(oracle: Oracle, x, zeta, r: float, plan: SamplingPlan):
    """Test ``f(y) >= f(x) + <zeta, y-x> - r/2 |y-x|^2`` for y in ``B(x, plan.radius)``."""
    x = oracle._check(x)
    zeta = as_vector(zeta, "zeta")
    check_same_dim(x, zeta)
    if r < 0:
        raise ValueError("r must be >= 0")
    fx = oracle.eval(x)
    slack = _slack(fx)
    log = ViolationLog()
    worst = np.inf
    for y in sample_ball(plan.rng(), x, plan.radius, plan.num_points):
        h = y - x
        lhs = fx + zeta @ h - 0.5 * r * (h @ h)
        fy = oracle.eval(y)
        worst = min(worst, fy - lhs)
        if fy < lhs - slack:
            log.add({"x": x, "y": y, "zeta": zeta, "r": r}, lhs, fy)
    return log.certificate(
        CertificateKind.PROX_SUBGRADIENT_MEMBERSHIP,
        plan.num_points,
        {"r": r, "radius": plan.radius, "min_residual": float(worst)},
    )


def check_prox_regularity(oracle: Oracle, region_center, delta: float, L: float, plan: SamplingPlan):
    """Test ``f(y') >= f(y) + <w, y'-y> - L/2 |y'-y|^2`` for sampled y, y' in ``B(center, delta)``.

    ``w`` is the minimum-norm proximal subgradient at ``y``. ``L_required``
    is the smallest ``L`` the sampled pairs would accept.
    """
    c = oracle._check(region_center)
    if not (delta > 0 and L >= 0):
        raise ValueError("delta must be > 0 and L >= 0")
    rng = plan.rng()
    ys = sample_ball(rng, c, delta, plan.num_points)
    yps = sample_ball(rng, c, delta, plan.num_points)
    log = ViolationLog()
    needed = 0.0
    for y, yp in zip(ys, yps):
        fy = oracle.eval(y)
        w = select_subgradient(oracle.prox_subdifferential(y), Rule.MIN_NORM)
        h = yp - y
        hh = float(h @ h)
        fyp = oracle.eval(yp)
        linear = fy + float(w @ h)
        if hh > 0:
            needed = max(needed, 2.0 * (linear - fyp) / hh)
        rhs = linear - 0.5 * L * hh
        if fyp < rhs - _slack(fy):
            log.add({"y": y, "y_prime": yp, "w": w, "L": L}, rhs, fyp)
    return log.certificate(
        CertificateKind.PROX_REGULARITY,
        plan.num_points,
        {"L": L, "delta": delta, "L_required": needed},
    )


def check_subdiff_lipschitz(
    oracle: Oracle, omega_samples: Sequence, delta: float, L: float, plan: SamplingPlan
):
    """Test ``dp f(y) in dp f(z) + L|y-z| B`` for y from ``omega_samples``, ``|z - y| < delta``.

    Distances to descriptors are exact for singletons and boxes and go through
    the min-norm-point solver for finite hulls.
    """
    if not (delta > 0 and L >= 0):
        raise ValueError("delta must be > 0 and L >= 0")
    omega = np.atleast_2d(np.asarray(omega_samples, dtype=float))
    if omega.shape[1] != oracle.dim:
        raise DimensionError(f"omega samples have dim {omega.shape[1]}, oracle has {oracle.dim}")
    rng = plan.rng()
    picks = rng.integers(0, omega.shape[0], plan.num_points)
    log = ViolationLog()
    ratio = 0.0
    for i in picks:
        y = omega[i]
        z = sample_ball(rng, y, delta, 1)[0]
        dist = float(np.linalg.norm(y - z))
        gap = excess(oracle.prox_subdifferential(y), oracle.prox_subdifferential(z))
        if dist > 0:
            ratio = max(ratio, gap / dist)
        rhs = L * dist + 1e-10
        if gap > rhs:
            log.add({"y": y, "z": z, "L": L}, gap, rhs)
    return log.certificate(
        CertificateKind.SUBDIFF_LIPSCHITZ,
        plan.num_points,
        {"L": L, "delta": delta, "L_observed": ratio},
    )


def check_hessian_bounds(oracle: Oracle, m: float, M: float, probes: int = 1000, seed: int = 42):
    """Test ``m |y|^2 <= y'Ay <= M |y|^2`` for a quadratic oracle.

    Rayleigh quotients of random unit vectors plus power iteration for the
    top eigenvalue and shifted power iteration on ``sigma I - A`` for the
    bottom one.
    """
    if not isinstance(oracle, QuadraticOracle):
        raise NotQuadratic(f"{oracle.id} has no constant Hessian")
    if m > M:
        raise ValueError("need m <= M")
    A = oracle.A
    n = A.shape[0]
    slack = 1e-10 * (1.0 + max(abs(m), abs(M)))
    log = ViolationLog()

    def test(y, source):
        y = y / np.linalg.norm(y)
        q = float(y @ A @ y)
        if q < m - slack:
            log.add({"y": y, "source": source, "bound": "m"}, m, q)
        if q > M + slack:
            log.add({"y": y, "source": source, "bound": "M"}, q, M)
        return q

    lam_max, v_max = power_iteration(A, seed=seed)
    sigma = lam_max + 1.0
    top, v_min = power_iteration(sigma * np.eye(n) - A, seed=seed + 1)
    lam_min = sigma - top
    q_hi = test(v_max, "power_iteration")
    q_lo = test(v_min, "shifted_power_iteration")
    rng = np.random.default_rng(seed)
    q_min, q_max = min(q_lo, q_hi), max(q_lo, q_hi)
    for y in rng.standard_normal((probes, n)):
        q = test(y, "random_probe")
        q_min, q_max = min(q_min, q), max(q_max, q)
    return log.certificate(
        CertificateKind.HESSIAN_BOUNDS,
        probes + 2,
        {"m": m, "M": M, "lambda_min_estimate": lam_min, "lambda_max_estimate": lam_max,
         "rayleigh_min": q_min, "rayleigh_max": q_max},
    )


def finite_difference_gradient_check(oracle: Oracle, x, h: float = 1e-4):
    """Central differences per coordinate against the singleton descriptor at ``x``."""
    x = oracle._check(x)
    if not h > 0:
        raise ValueError("h must be > 0")
    g = oracle.prox_subdifferential(x).as_singleton()
    if g is None:
        raise NotSmoothAt(x)
    fx = oracle.eval(x)
    bound = 10.0 * h * h * (1.0 + abs(fx))
    log = ViolationLog()
    fd = np.empty(oracle.dim)
    for j in range(oracle.dim):
        e = np.zeros(oracle.dim)
        e[j] = h
        fd[j] = (oracle.eval(x + e) - oracle.eval(x - e)) / (2.0 * h)
        dev = abs(fd[j] - g[j])
        if dev > bound:
            log.add({"x": x, "coordinate": j, "h": h, "fd": fd[j], "descriptor": g[j]}, dev, bound)
    return log.certificate(
        CertificateKind.GRADIENT_CHECK,
        oracle.dim,
        {"h": h, "max_deviation": float(np.max(np.abs(fd - g))), "bound": bound},
    )


def level_set_samples(
    oracle: Oracle, x0, center=None, radius: float = 1.0, n: int = 200, seed: int = 42,
    extra: Optional[Sequence] = None,
) -> np.ndarray:
    """Points of ``{f <= f(x0)}`` by rejection from ``B(center, radius)``, plus ``x0`` and ``extra``."""
    x0 = oracle._check(x0)
    center = x0 if center is None else oracle._check(center)
    f0 = oracle.eval(x0)
    rng = np.random.default_rng(seed)
    keep = [x0]
    if extra is not None:
        keep.extend(p for p in np.atleast_2d(extra) if oracle.eval(p) <= f0)
    tries = 0
    while len(keep) < n + 1 and tries < 200:
        tries += 1
        for p in sample_ball(rng, center, radius, 4 * n):
            if oracle.eval(p) <= f0:
                keep.append(p)
                if len(keep) >= n + 1:
                    break
    return np.array(keep)
