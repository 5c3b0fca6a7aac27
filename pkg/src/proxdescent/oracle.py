"""Objective oracles with exact proximal-subdifferential descriptors.

Every oracle evaluates ``f`` and returns a finite description of the
proximal subdifferential at a point. For the convex classes that set is the
ordinary convex subdifferential. Oracles also expose :meth:`Oracle.ray`,
the restriction ``t -> f(x + t u) - f(x)`` in a closed form the compiled
line-search kernel can evaluate without calling back into Python.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (
    DimensionError,
    EmptyHullError,
    EmptyPieces,
    NonFiniteValue,
    as_vector,
)

# piece i of a max is active iff max_j g_j - g_i <= ACTIVITY_RTOL * (1 + |max_j g_j|)
ACTIVITY_RTOL = 1e-10
# coordinate j of an l1 term is kinked iff |x_j| <= KINK_RTOL * (1 + max|x|)
KINK_RTOL = 1e-10


class ClassTag(str, enum.Enum):
    SMOOTH = "Smooth"
    CONVEX_QUADRATIC = "ConvexQuadratic"
    MAX_OF_SMOOTH = "MaxOfSmooth"
    L1_COMPOSITE = "L1Composite"


class Rule(str, enum.Enum):
    MIN_NORM = "MinNorm"
    FIRST_GENERATOR = "FirstGenerator"


# ---------------------------------------------------------------------------
# descriptors


@dataclass(frozen=True)
class Singleton:
    value: np.ndarray

    @property
    def dim(self) -> int:
        return self.value.shape[0]

    def generators(self) -> np.ndarray:
        return self.value[None, :]

    def as_singleton(self) -> Optional[np.ndarray]:
        return self.value

    def min_norm(self, tol: float = 1e-10) -> np.ndarray:
        return self.value

    def first(self) -> np.ndarray:
        return self.value

    def distance(self, p: np.ndarray, tol: float = 1e-10) -> float:
        return float(np.linalg.norm(p - self.value))


@dataclass(frozen=True)
class FiniteHull:
    """Convex hull of the rows of ``points``."""

    points: np.ndarray

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def generators(self) -> np.ndarray:
        return self.points

    def as_singleton(self) -> Optional[np.ndarray]:
        if self.points.shape[0] == 1:
            return self.points[0]
        return None

    def min_norm(self, tol: float = 1e-10) -> np.ndarray:
        return min_norm_in_hull(self.points, tol)

    def first(self) -> np.ndarray:
        return self.points[0]

    def distance(self, p: np.ndarray, tol: float = 1e-10) -> float:
        return float(np.linalg.norm(min_norm_in_hull(self.points - p, tol)))


@dataclass(frozen=True)
class BoxProduct:
    """The set ``smooth + [lo_1, hi_1] x ... x [lo_d, hi_d]``.

    Non-kinked coordinates have ``lo == hi``.
    """

    smooth: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    @property
    def dim(self) -> int:
        return self.smooth.shape[0]

    @property
    def kinked(self) -> np.ndarray:
        return self.lo < self.hi

    def generators(self, max_kinked: int = 12) -> np.ndarray:
        idx = np.flatnonzero(self.kinked)
        if idx.size > max_kinked:
            raise ValueError(f"{idx.size} kinked coordinates; vertex enumeration is capped at {max_kinked}")
        base = self.smooth + self.lo
        out = []
        for mask in range(1 << idx.size):
            g = base.copy()
            for bit, j in enumerate(idx):
                if mask >> bit & 1:
                    g[j] = self.smooth[j] + self.hi[j]
            out.append(g)
        return np.array(out)

    def as_singleton(self) -> Optional[np.ndarray]:
        if not self.kinked.any():
            return self.smooth + self.lo
        return None

    def project(self, p: np.ndarray) -> np.ndarray:
        return self.smooth + np.clip(p - self.smooth, self.lo, self.hi)

    def min_norm(self, tol: float = 1e-10) -> np.ndarray:
        return self.project(np.zeros(self.dim))

    def first(self) -> np.ndarray:
        return self.smooth + self.lo

    def distance(self, p: np.ndarray, tol: float = 1e-10) -> float:
        return float(np.linalg.norm(p - self.project(p)))


Descriptor = Singleton | FiniteHull | BoxProduct


def excess(d_from: Descriptor, d_to: Descriptor, tol: float = 1e-10) -> float:
    """``sup_{g in d_from} dist(g, d_to)``.

    The distance to a convex set is convex, so the sup over a polytope is
    attained at a generator; box-to-box is computed coordinatewise.
    """
    if isinstance(d_from, BoxProduct) and isinstance(d_to, BoxProduct):
        a_lo = d_from.smooth + d_from.lo - d_to.smooth
        a_hi = d_from.smooth + d_from.hi - d_to.smooth
        far = np.maximum(
            np.abs(a_lo - np.clip(a_lo, d_to.lo, d_to.hi)),
            np.abs(a_hi - np.clip(a_hi, d_to.lo, d_to.hi)),
        )
        return float(np.linalg.norm(far))
    return max(d_to.distance(g, tol) for g in d_from.generators())


# ---------------------------------------------------------------------------
# min-norm point (Wolfe)


def min_norm_in_hull(generators, tol: float = 1e-10, max_iter: int = 500) -> np.ndarray:
    """Point of minimum Euclidean norm in the convex hull of ``generators``.

    Wolfe's algorithm: grow a corral of affinely independent generators,
    minimize over its affine hull, and step back towards the previous point
    whenever the affine minimizer leaves the simplex.
    """
    P = np.atleast_2d(np.asarray(generators, dtype=float))
    if P.size == 0 or P.shape[0] == 0:
        raise EmptyHullError("convex hull of no generators")
    if not np.all(np.isfinite(P)):
        raise NonFiniteValue("generators must be finite")
    k = P.shape[0]
    if k == 1:
        return P[0].copy()

    sq = np.einsum("ij,ij->i", P, P)
    scale = float(sq.max())
    S = [int(np.argmin(sq))]
    w = np.array([1.0])
    x = P[S[0]].copy()

    for _ in range(max_iter):
        gaps = P @ x
        j = int(np.argmin(gaps))
        # Wolfe criterion
        if x @ x - gaps[j] <= tol * max(scale, 1e-300) or j in S:
            break
        S.append(j)
        w = np.append(w, 0.0)
        while True:
            Q = P[S]
            G = Q @ Q.T
            n = len(S)
            K = np.zeros((n + 1, n + 1))
            K[:n, :n] = G
            K[:n, n] = 1.0
            K[n, :n] = 1.0
            rhs = np.zeros(n + 1)
            rhs[n] = 1.0
            alpha = np.linalg.lstsq(K, rhs, rcond=None)[0][:n]
            if np.all(alpha > 1e-14):
                w = alpha
                break
            neg = alpha <= 1e-14
            denom = w[neg] - alpha[neg]
            ratios = np.where(denom > 0, w[neg] / np.where(denom > 0, denom, 1.0), 0.0)
            theta = float(np.min(ratios))
            w = w + theta * (alpha - w)
            keep = w > 1e-14
            keep[int(np.argmax(w))] = True
            S = [s for s, kp in zip(S, keep) if kp]
            w = w[keep]
            w = w / w.sum()
        x = w @ P[S]
    return x


def select_subgradient(d: Descriptor, rule: Rule | str = Rule.MIN_NORM, tol: float = 1e-10) -> np.ndarray:
    rule = Rule(rule)
    if rule is Rule.MIN_NORM:
        return d.min_norm(tol)
    return d.first()


# ---------------------------------------------------------------------------
# ray restriction shared by both line-search kernels


@dataclass(frozen=True)
class Ray:
    """``t -> f(x + t u) - f(x)`` as a sum of simple terms.

    ``t*(c1 + c2*t/2)``
    ``+ max_i(p_i + q_i t) - max_i p_i``          (when ``p`` is non-empty)
    ``+ w * sum_j(|r_j + s_j t| - |r_j|)``        (when ``r`` is non-empty)
    ``+ rosen(x + t u) - rosen(x)``               (when ``rosen`` is set)
    """

    c1: float = 0.0
    c2: float = 0.0
    p: np.ndarray = field(default_factory=lambda: np.zeros(0))
    q: np.ndarray = field(default_factory=lambda: np.zeros(0))
    w: float = 0.0
    r: np.ndarray = field(default_factory=lambda: np.zeros(0))
    s: np.ndarray = field(default_factory=lambda: np.zeros(0))
    rosen_x: np.ndarray = field(default_factory=lambda: np.zeros(0))
    rosen_u: np.ndarray = field(default_factory=lambda: np.zeros(0))


# ---------------------------------------------------------------------------
# oracles


class Oracle:
    """Base objective oracle. Subclasses are immutable after construction."""

    id: str = "oracle"
    class_tag: ClassTag
    convex: bool = False

    def __init__(self, dim: int):
        self.dim = int(dim)

    def _check(self, x) -> np.ndarray:
        x = as_vector(x)
        if x.shape[0] != self.dim:
            raise DimensionError(f"{self.id}: expected dim {self.dim}, got {x.shape[0]}")
        return x

    def eval(self, x) -> float:
        return self._eval(self._check(x))

    def prox_subdifferential(self, x) -> Descriptor:
        return self._subdiff(self._check(x))

    def ray(self, x: np.ndarray, u: np.ndarray) -> Optional[Ray]:
        """Closed-form ray restriction, or None to use plain evaluations."""
        return None

    @property
    def smooth(self) -> bool:
        return self.class_tag in (ClassTag.SMOOTH, ClassTag.CONVEX_QUADRATIC)

    @property
    def needs_prescan(self) -> bool:
        return self.class_tag is ClassTag.SMOOTH and not self.convex

    def __repr__(self):
        return f"{type(self).__name__}(id={self.id!r}, dim={self.dim})"


class SmoothOracle(Oracle):
    """Smooth objective given by value and gradient callables."""

    class_tag = ClassTag.SMOOTH

    def __init__(self, f: Callable, grad: Callable, dim: int, convex: bool = False, id: str = "smooth"):
        super().__init__(dim)
        self._f = f
        self._grad = grad
        self.convex = convex
        self.id = id

    def _eval(self, x):
        return float(self._f(x))

    def gradient(self, x) -> np.ndarray:
        x = self._check(x)
        return np.asarray(self._grad(x), dtype=float).reshape(self.dim)

    def _subdiff(self, x):
        return Singleton(np.asarray(self._grad(x), dtype=float).reshape(self.dim))


class Rosenbrock(SmoothOracle):
    def __init__(self):
        super().__init__(_rosen, _rosen_grad, 2, convex=False, id="rosenbrock")

    def ray(self, x, u):
        return Ray(rosen_x=np.asarray(x, dtype=float), rosen_u=np.asarray(u, dtype=float))


def _rosen(x):
    return (1.0 - x[0]) ** 2 + 100.0 * (x[1] - x[0] * x[0]) ** 2


def _rosen_grad(x):
    a = x[1] - x[0] * x[0]
    return np.array([-2.0 * (1.0 - x[0]) - 400.0 * x[0] * a, 200.0 * a])


class QuadraticOracle(Oracle):
    """``f(x) = x'Ax/2 - <b, x> + c`` with symmetric PSD ``A``."""

    class_tag = ClassTag.CONVEX_QUADRATIC
    convex = True

    def __init__(self, A, b, c: float = 0.0, id: str = "quadratic"):
        A = np.array(A, dtype=float)
        b = as_vector(b, "b")
        if A.shape != (b.shape[0], b.shape[0]):
            raise DimensionError(f"A has shape {A.shape}, b has dim {b.shape[0]}")
        if not np.allclose(A, A.T, rtol=0, atol=1e-12 * (1 + np.abs(A).max())):
            raise ValueError("A must be symmetric")
        if not np.all(np.isfinite(A)) or not np.isfinite(c):
            raise NonFiniteValue("quadratic data must be finite")
        super().__init__(b.shape[0])
        A.flags.writeable = False
        self.A = A
        self.b = b
        self.c = float(c)
        self.id = id

    def _eval(self, x):
        return float(0.5 * (x @ (self.A @ x)) - self.b @ x + self.c)

    def gradient(self, x) -> np.ndarray:
        x = self._check(x)
        return self.A @ x - self.b

    def _subdiff(self, x):
        return Singleton(self.A @ x - self.b)

    def ray(self, x, u):
        return Ray(c1=float((self.A @ x - self.b) @ u), c2=float(u @ (self.A @ u)))


class MaxAffineOracle(Oracle):
    """``f(x) = max_i(<a_i, x> + b_i) + (weight/2) |x|^2``."""

    class_tag = ClassTag.MAX_OF_SMOOTH
    convex = True

    def __init__(self, slopes, offsets, weight: float = 0.0, id: str = "max_affine"):
        a = np.atleast_2d(np.array(slopes, dtype=float))
        b = np.atleast_1d(np.array(offsets, dtype=float))
        if a.size == 0 or a.shape[0] == 0:
            raise EmptyPieces("max_affine needs at least one piece")
        if b.shape != (a.shape[0],):
            raise DimensionError("one offset per slope is required")
        if weight < 0:
            raise ValueError("quadratic weight must be >= 0")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.isfinite(weight)):
            raise NonFiniteValue("max_affine data must be finite")
        super().__init__(a.shape[1])
        a.flags.writeable = False
        b.flags.writeable = False
        self.slopes = a
        self.offsets = b
        self.weight = float(weight)
        self.id = id

    def pieces(self, x) -> np.ndarray:
        return self.slopes @ x + self.offsets

    def active(self, x) -> np.ndarray:
        g = self.pieces(x)
        top = g.max()
        return np.flatnonzero(top - g <= ACTIVITY_RTOL * (1.0 + abs(top)))

    def _eval(self, x):
        return float(self.pieces(x).max() + 0.5 * self.weight * (x @ x))

    def _subdiff(self, x):
        act = self.active(x)
        return FiniteHull(self.slopes[act] + self.weight * x)

    def ray(self, x, u):
        return Ray(
            c1=self.weight * float(x @ u),
            c2=self.weight * float(u @ u),
            p=self.pieces(x),
            q=self.slopes @ u,
        )


class L1CompositeOracle(Oracle):
    """``f(x) = lam |x|_1 + x'Ax/2 - <b, x>`` with symmetric PSD ``A``."""

    class_tag = ClassTag.L1_COMPOSITE
    convex = True

    def __init__(self, lam: float, A, b, id: str = "l1_composite"):
        if not lam > 0:
            raise ValueError("lambda must be > 0")
        self.quad = QuadraticOracle(A, b, 0.0)
        super().__init__(self.quad.dim)
        self.lam = float(lam)
        self.A = self.quad.A
        self.b = self.quad.b
        self.id = id

    def kinked(self, x) -> np.ndarray:
        return np.abs(x) <= KINK_RTOL * (1.0 + np.abs(x).max())

    def _eval(self, x):
        return float(self.lam * np.abs(x).sum() + self.quad._eval(x))

    def _subdiff(self, x):
        kink = self.kinked(x)
        sign = np.sign(x) * self.lam
        lo = np.where(kink, -self.lam, sign)
        hi = np.where(kink, self.lam, sign)
        return BoxProduct(self.A @ x - self.b, lo, hi)

    def ray(self, x, u):
        base = self.quad.ray(x, u)
        return Ray(c1=base.c1, c2=base.c2, w=self.lam, r=np.asarray(x, dtype=float), s=np.asarray(u, dtype=float))


# module-level forms of the oracle operations


def evaluate(oracle: Oracle, x) -> float:
    return oracle.eval(x)


def prox_subdifferential(oracle: Oracle, x) -> Descriptor:
    return oracle.prox_subdifferential(x)


def l2_quadratic(y, id: str = "l2_quadratic") -> QuadraticOracle:
    """``|x|^2/2 - <x, y> + 3``: a finite truncation of the l2 example objective."""
    y = as_vector(y, "y")
    return QuadraticOracle(np.eye(y.shape[0]), y, 3.0, id=id)


def abs_value() -> MaxAffineOracle:
    return MaxAffineOracle([[1.0], [-1.0]], [0.0, 0.0], 0.0, id="abs")


def smooth(f: Callable, grad: Callable, dim: int, convex: bool = False, id: str = "smooth") -> SmoothOracle:
    return SmoothOracle(f, grad, dim, convex=convex, id=id)


def stack_pieces(pieces: Sequence) -> tuple:
    """Split ``[(a_i, b_i), ...]`` into slope matrix and offset vector."""
    if not pieces:
        raise EmptyPieces("max_affine needs at least one piece")
    slopes = np.array([np.atleast_1d(np.asarray(a, dtype=float)) for a, _ in pieces])
    offsets = np.array([float(b) for _, b in pieces])
    return slopes, offsets
