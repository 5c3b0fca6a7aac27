"""Built-in problem corpus.

Every problem is built in code from fixed parameters and seeds, so runs over
the corpus are bit-reproducible. ``declared`` carries the constants a problem
claims (``L`` for the subdifferential Lipschitz bound, ``delta``, ``m``/``M``
Hessian bounds); the verifiers check them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import SingularMatrix, as_vector
from .oracle import (
    L1CompositeOracle,
    MaxAffineOracle,
    Oracle,
    QuadraticOracle,
    Rosenbrock,
    l2_quadratic,
    min_norm_in_hull,
    stack_pieces,
)


@dataclass(frozen=True)
class ProblemSpec:
    id: str
    oracle: Oracle
    x0: np.ndarray
    params: dict = field(default_factory=dict)
    declared: dict = field(default_factory=dict)
    known_minimizer: Optional[np.ndarray] = None
    known_min_value: Optional[float] = None
    # level set {f <= f(x0)} lies in the ball (level_set_center, level_set_radius)
    level_set_center: Optional[np.ndarray] = None
    level_set_radius: Optional[float] = None

    @property
    def bounded_level_set(self) -> bool:
        return self.level_set_radius is not None

    @property
    def convex(self) -> bool:
        return self.oracle.convex

    def with_start(self, x0) -> "ProblemSpec":
        """Same problem from another start; level-set radius recomputed when possible."""
        x0 = self.oracle._check(x0)
        radius = self.level_set_radius
        if radius is not None and ("strong_convexity" in self.declared or "sharpness" in self.declared):
            radius = _level_set_radius(self, x0)
        elif radius is not None:
            radius = None
        return ProblemSpec(
            self.id, self.oracle, x0, self.params, self.declared,
            self.known_minimizer, self.known_min_value, self.level_set_center, radius,
        )


def _level_set_radius(spec: ProblemSpec, x0) -> float:
    """Radius from quadratic growth ``f - f* >= mu/2 |x - x*|^2`` or sharp growth ``f - f* >= s |x - x*|``."""
    gap = max(spec.oracle.eval(x0) - spec.known_min_value, 0.0)
    if "strong_convexity" in spec.declared:
        radius = math.sqrt(2.0 * gap / spec.declared["strong_convexity"])
    else:
        radius = gap / spec.declared["sharpness"]
    return radius * (1 + 1e-9) + 1e-12


def _finish(spec: ProblemSpec) -> ProblemSpec:
    growth = "strong_convexity" in spec.declared or "sharpness" in spec.declared
    if growth and spec.known_minimizer is not None:
        radius = _level_set_radius(spec, spec.x0)
        return ProblemSpec(
            spec.id, spec.oracle, spec.x0, spec.params, spec.declared,
            spec.known_minimizer, spec.known_min_value, spec.known_minimizer, radius,
        )
    return spec


# ---------------------------------------------------------------------------
# eigenvalues and linear solves used at construction


def power_iteration(A, iters: int = 10_000, tol: float = 1e-14, seed: int = 0) -> tuple:
    """Largest eigenvalue (by magnitude) of symmetric ``A`` and its eigenvector."""
    A = np.asarray(A, dtype=float)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(A.shape[0])
    v /= np.linalg.norm(v)
    lam = float(v @ A @ v)
    for _ in range(iters):
        w = A @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0, v
        v = w / nw
        new = float(v @ A @ v)
        if abs(new - lam) <= tol * max(1.0, abs(new)):
            lam = new
            break
        lam = new
    return lam, v


def eigen_bounds(A, seed: int = 0) -> tuple:
    """``(lambda_min, lambda_max)`` of symmetric PSD ``A`` by (shifted) power iteration."""
    A = np.asarray(A, dtype=float)
    lam_max, _ = power_iteration(A, seed=seed)
    sigma = lam_max + 1.0
    top, _ = power_iteration(sigma * np.eye(A.shape[0]) - A, seed=seed + 1)
    return sigma - top, lam_max


def conjugate_gradient(A, b, tol: float = 1e-12, max_iter: Optional[int] = None) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    max_iter = max_iter or 10 * n + 10
    x = np.zeros(n)
    r = b.copy()
    p = r.copy()
    rs = float(r @ r)
    scale = max(1.0, float(np.linalg.norm(b)))
    for _ in range(max_iter):
        if math.sqrt(rs) <= tol * scale:
            return x
        Ap = A @ p
        pAp = float(p @ Ap)
        if not pAp > 0:
            raise SingularMatrix("matrix is not positive definite along a CG direction")
        alpha = rs / pAp
        x = x + alpha * p
        r = r - alpha * Ap
        rs_new = float(r @ r)
        p = r + (rs_new / rs) * p
        rs = rs_new
    if np.linalg.norm(A @ x - b) <= tol * scale:
        return x
    raise SingularMatrix("conjugate gradient did not converge")


# ---------------------------------------------------------------------------
# factories


def make_l2_quadratic(y, x0=None, id: Optional[str] = None) -> ProblemSpec:
    y = as_vector(y, "y")
    oracle = l2_quadratic(y, id=id or "l2_quadratic")
    x0 = np.zeros_like(y) if x0 is None else x0
    spec = ProblemSpec(
        id=oracle.id,
        oracle=oracle,
        x0=as_vector(x0, "x0"),
        params={"y": y.tolist()},
        declared={"L": 1.0, "delta": 1.0, "m": 1.0, "M": 1.0, "strong_convexity": 1.0},
        known_minimizer=y,
        known_min_value=3.0 - 0.5 * float(y @ y),
    )
    return _finish(spec)


def l2_target(dim: int, seed: int) -> np.ndarray:
    """Target vector for the seeded l2 family: standard normal draws."""
    return np.random.default_rng(seed).standard_normal(dim)


def make_seeded_l2_quadratic(dim: int = 10, seed: int = 7) -> ProblemSpec:
    spec = make_l2_quadratic(l2_target(dim, seed), id=f"l2_quadratic[dim={dim},seed={seed}]")
    return ProblemSpec(
        spec.id, spec.oracle, spec.x0, {"dim": dim, "seed": seed}, spec.declared,
        spec.known_minimizer, spec.known_min_value, spec.level_set_center, spec.level_set_radius,
    )


def make_strictly_convex_quadratic(A, b, c: float = 0.0, x0=None, id: str = "quadratic") -> ProblemSpec:
    oracle = QuadraticOracle(A, b, c, id=id)
    x_star = as_vector(conjugate_gradient(oracle.A, oracle.b), "minimizer")
    m, M = eigen_bounds(oracle.A)
    x0 = np.zeros(oracle.dim) if x0 is None else x0
    spec = ProblemSpec(
        id=id,
        oracle=oracle,
        x0=as_vector(x0, "x0"),
        params={"A": oracle.A.tolist(), "b": oracle.b.tolist(), "c": oracle.c},
        declared={"L": M, "delta": 1.0, "m": m, "M": M, "strong_convexity": m},
        known_minimizer=x_star,
        known_min_value=oracle.eval(x_star),
    )
    return _finish(spec)


def make_max_affine(
    pieces,
    quadratic_weight: float = 0.0,
    x0=None,
    id: str = "max_affine",
    known_minimizer=None,
    known_min_value=None,
) -> ProblemSpec:
    """``max_i(<a_i, x> + b_i) + (w/2)|x|^2`` from ``pieces = [(a_i, b_i), ...]``.

    With ``w > 0`` and equal offsets the minimizer is ``-p/w`` where ``p`` is
    the min-norm point of the slopes' hull (dual of the max).
    """
    slopes, offsets = stack_pieces(pieces)
    oracle = MaxAffineOracle(slopes, offsets, quadratic_weight, id=id)
    x0 = np.zeros(oracle.dim) if x0 is None else x0
    declared = {"L": max(quadratic_weight, 1.0), "delta": 1.0}
    if known_minimizer is None and quadratic_weight > 0 and np.all(offsets == offsets[0]):
        p = min_norm_in_hull(slopes, 1e-14)
        p[np.abs(p) < 1e-12] = 0.0
        known_minimizer = -p / quadratic_weight
    if known_minimizer is not None:
        known_minimizer = as_vector(known_minimizer, "known_minimizer")
        if known_min_value is None:
            known_min_value = oracle.eval(known_minimizer)
    if quadratic_weight > 0:
        declared["strong_convexity"] = float(quadratic_weight)
    spec = ProblemSpec(
        id=id,
        oracle=oracle,
        x0=as_vector(x0, "x0"),
        params={"slopes": slopes.tolist(), "offsets": offsets.tolist(), "quadratic_weight": quadratic_weight},
        declared=declared,
        known_minimizer=known_minimizer,
        known_min_value=known_min_value,
    )
    return _finish(spec)


def make_abs(x0=(2.0,)) -> ProblemSpec:
    """``|x|`` as the max of the pieces ``x`` and ``-x``; sharp minimum at 0."""
    spec = make_max_affine(
        [([1.0], 0.0), ([-1.0], 0.0)], 0.0, x0=x0, id="abs", known_minimizer=[0.0], known_min_value=0.0
    )
    declared = dict(spec.declared, sharpness=1.0)
    return _finish(ProblemSpec(
        spec.id, spec.oracle, spec.x0, spec.params, declared, spec.known_minimizer, spec.known_min_value,
    ))


def soft_threshold(z, lam):
    z = np.asarray(z, dtype=float)
    return np.sign(z) * np.maximum(np.abs(z) - lam, 0.0)


def make_l1_composite(lam: float, A, b, x0=None, id: str = "l1_composite") -> ProblemSpec:
    """``lam |x|_1 + x'Ax/2 - <b, x>``; closed-form minimizer when ``A`` is diagonal."""
    oracle = L1CompositeOracle(lam, A, b, id=id)
    x0 = np.zeros(oracle.dim) if x0 is None else x0
    m, M = eigen_bounds(oracle.A)
    declared = {"L": M, "delta": 1.0, "m": m, "M": M}
    known = None
    diag = np.diag(oracle.A)
    if np.count_nonzero(oracle.A - np.diag(diag)) == 0 and np.all(diag > 0):
        known = as_vector(soft_threshold(oracle.b, lam) / diag)
    if m > 1e-12:
        declared["strong_convexity"] = m
    spec = ProblemSpec(
        id=id,
        oracle=oracle,
        x0=as_vector(x0, "x0"),
        params={"lambda": lam, "A": oracle.A.tolist(), "b": oracle.b.tolist()},
        declared=declared,
        known_minimizer=known,
        known_min_value=None if known is None else oracle.eval(known),
    )
    return _finish(spec)


def make_smooth_nonconvex(id: str = "rosenbrock", x0=(-1.2, 1.0)) -> ProblemSpec:
    if id != "rosenbrock":
        raise ValueError(f"unknown smooth nonconvex problem {id!r}")
    oracle = Rosenbrock()
    return ProblemSpec(
        id="rosenbrock",
        oracle=oracle,
        x0=as_vector(x0, "x0"),
        params={},
        declared={"delta": 1.0},
        known_minimizer=as_vector([1.0, 1.0]),
        known_min_value=0.0,
    )


def default_corpus() -> list:
    """The corpus used by the benchmark and acceptance runs, sorted by id."""
    specs = [
        make_seeded_l2_quadratic(10, 7),
        make_strictly_convex_quadratic(np.diag([1.0, 4.0]), [0.0, 0.0], 0.0, x0=[2.0, 1.0], id="quad_diag_1_4"),
        make_strictly_convex_quadratic([[2.0, 1.0], [1.0, 2.0]], [3.0, 3.0], 0.0, x0=[-2.0, 1.0], id="quad_2112"),
        make_strictly_convex_quadratic(np.eye(2), [1.0, 0.0], 0.0, x0=[-1.0, 2.0], id="quad_identity"),
        make_abs(x0=[2.0]),
        make_max_affine([([1.0, 0.0], 0.0), ([0.0, 1.0], 0.0), ([-1.0, -1.0], 0.0)], 1.0,
                        x0=[1.5, -0.7], id="max_affine_3"),
        make_max_affine([([1.0, 2.0], 0.5)], 1.0, x0=[2.0, 2.0], id="max_affine_single"),
        make_l1_composite(1.0, [[1.0]], [2.0], x0=[-3.0], id="l1_soft_2"),
        make_l1_composite(1.0, [[1.0]], [0.5], x0=[2.0], id="l1_soft_half"),
        make_l1_composite(0.5, np.eye(2), [2.0, -2.0], x0=[0.3, 1.0], id="l1_diag_2"),
        make_smooth_nonconvex("rosenbrock", x0=[-1.2, 1.0]),
    ]
    return sorted(specs, key=lambda s: s.id)


def corpus_by_id() -> dict:
    return {s.id: s for s in default_corpus()}
