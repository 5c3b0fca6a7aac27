"""Vector helpers and the shared data model (traces, certificates, errors).

Vectors are plain 1-D ``float64`` numpy arrays. Every public entry point
passes its inputs through :func:`as_vector`, which rejects NaN/Inf so a
single bad value can never leak into line-search bracketing.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np


class ProxDescentError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(ProxDescentError, ValueError):
    pass


class NonFiniteValue(ProxDescentError, ValueError):
    pass


class NonUnitDirection(ProxDescentError, ValueError):
    pass


class EmptyHullError(ProxDescentError, ValueError):
    pass


class EmptyPieces(ProxDescentError, ValueError):
    pass


class NotSmooth(ProxDescentError, TypeError):
    pass


class NotSmoothAt(ProxDescentError, ValueError):
    def __init__(self, x):
        self.x = np.array(x, dtype=float)
        super().__init__(f"oracle is not differentiable at x={self.x.tolist()}")


class NotQuadratic(ProxDescentError, TypeError):
    pass


class SingularMatrix(ProxDescentError, ValueError):
    pass


class InvalidStart(ProxDescentError, ValueError):
    pass


class InsufficientTrace(ProxDescentError, ValueError):
    pass


def as_vector(values, name: str = "x") -> np.ndarray:
    """Return ``values`` as a fresh, read-only, finite 1-D float64 array."""
    arr = np.array(values, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError(f"{name} must be a non-empty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"{name} has non-finite entries")
    arr.flags.writeable = False
    return arr


def check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")


def dot(a, b) -> float:
    a = as_vector(a, "a")
    b = as_vector(b, "b")
    check_same_dim(a, b)
    return float(a @ b)


def norm(a) -> float:
    a = as_vector(a, "a")
    # hypot rescales, so tiny or huge entries neither underflow nor overflow
    return math.hypot(*a)


def axpy(alpha: float, x, y) -> np.ndarray:
    """``alpha * x + y`` componentwise."""
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    check_same_dim(x, y)
    if not math.isfinite(alpha):
        raise NonFiniteValue("alpha must be finite")
    return as_vector(alpha * x + y)


class Status(str, enum.Enum):
    CONTINUED = "Continued"
    TERMINATED_ZERO_SUBGRADIENT = "TerminatedZeroSubgradient"
    TERMINATED_TOLERANCE = "TerminatedTolerance"
    LINE_SEARCH_STALL = "LineSearchStall"
    MAX_ITERATIONS = "MaxIterations"

    @property
    def terminal(self) -> bool:
        return self is not Status.CONTINUED

    @property
    def converged(self) -> bool:
        return self in (Status.TERMINATED_ZERO_SUBGRADIENT, Status.TERMINATED_TOLERANCE)


@dataclass(frozen=True)
class IterationRecord:
    """State at iterate ``n``: ``step_length`` is the step taken *from* x_n."""

    n: int
    x: Optional[np.ndarray]
    f_value: float
    subgrad_norm: float
    step_length: float
    oracle_evals: int
    status: Status = Status.CONTINUED

    def __post_init__(self):
        if self.n < 0 or self.oracle_evals < 0:
            raise ValueError("n and oracle_evals must be non-negative")
        if self.subgrad_norm < 0 or self.step_length < 0:
            raise ValueError("subgrad_norm and step_length must be non-negative")

    def same_as(self, other: "IterationRecord") -> bool:
        if (self.x is None) != (other.x is None):
            return False
        same_x = self.x is None or np.array_equal(self.x, other.x)
        return same_x and (
            self.n,
            self.f_value,
            self.subgrad_norm,
            self.step_length,
            self.oracle_evals,
            self.status,
        ) == (
            other.n,
            other.f_value,
            other.subgrad_norm,
            other.step_length,
            other.oracle_evals,
            other.status,
        )


@dataclass(frozen=True)
class RunTrace:
    records: tuple
    x_final: np.ndarray
    wall_time: float = 0.0

    def __post_init__(self):
        if not self.records:
            raise ValueError("a trace needs at least one record")
        for i, rec in enumerate(self.records):
            if rec.n != i:
                raise ValueError("record indices must be consecutive from 0")
            last = i == len(self.records) - 1
            if rec.status.terminal != last:
                raise ValueError("only the last record may carry a terminal status")

    @property
    def termination(self) -> Status:
        return self.records[-1].status

    @property
    def iterations(self) -> int:
        return len(self.records) - 1

    @property
    def final(self) -> IterationRecord:
        return self.records[-1]

    def f_values(self) -> np.ndarray:
        return np.array([r.f_value for r in self.records])

    def subgrad_norms(self) -> np.ndarray:
        return np.array([r.subgrad_norm for r in self.records])


class CertificateKind(str, enum.Enum):
    PROX_SUBGRADIENT_MEMBERSHIP = "ProxSubgradientMembership"
    PROX_REGULARITY = "ProxRegularity"
    SUBDIFF_LIPSCHITZ = "SubdiffLipschitz"
    HESSIAN_BOUNDS = "HessianBounds"
    DESCENT_BOUND = "DescentBound"
    GRADIENT_CHECK = "GradientCheck"


@dataclass(frozen=True)
class Violation:
    """A counterexample: the inequality ``lhs <= rhs`` fails by ``gap > 0``."""

    witness: dict
    lhs: float
    rhs: float
    gap: float

    def to_dict(self) -> dict:
        return {
            "witness": {k: _jsonable(v) for k, v in self.witness.items()},
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
        }


@dataclass(frozen=True)
class Certificate:
    """Outcome of a sampled check.

    Sampling is one-sided: a failure is a proof (the witness reproduces it),
    a pass is only evidence. ``violations`` keeps at most a capped number of
    witnesses; ``violation_count`` is the full tally.
    """

    kind: CertificateKind
    samples_tested: int
    estimated_constants: dict = field(default_factory=dict)
    violations: tuple = ()
    violation_count: int = 0
    one_sided: bool = True

    @property
    def passed(self) -> bool:
        return self.violation_count == 0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "passed": self.passed,
            "one_sided": self.one_sided,
            "samples_tested": self.samples_tested,
            "estimated_constants": {k: _jsonable(v) for k, v in self.estimated_constants.items()},
            "violation_count": self.violation_count,
            "violations": [v.to_dict() for v in self.violations],
        }


class ViolationLog:
    """Collects violations, keeping the first ``cap`` witnesses."""

    def __init__(self, cap: int = 20):
        self.cap = cap
        self.kept: list = []
        self.count = 0

    def add(self, witness: dict, lhs: float, rhs: float) -> None:
        self.count += 1
        if len(self.kept) < self.cap:
            self.kept.append(Violation(witness, float(lhs), float(rhs), float(lhs - rhs)))

    def certificate(self, kind, samples, constants) -> Certificate:
        return Certificate(
            kind=kind,
            samples_tested=samples,
            estimated_constants=dict(constants),
            violations=tuple(self.kept),
            violation_count=self.count,
        )


def _jsonable(value: Any):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value
