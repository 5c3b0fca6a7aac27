"""Exact line search: minimize ``t -> f(x + t u)`` over ``[0, t_max]``.

The minimum over ``t >= 0`` is approximated by geometric bracketing (factor
2 from ``t = 1``) followed by golden-section refinement to ``tol_t`` on the
t-axis. Golden section needs no derivatives, so kinked rays are fine. For
smooth nonconvex objectives a 64-point log-spaced pre-scan picks the best
cell first, so a local dip near 0 cannot hide a deeper ray minimum.

Built-in oracles hand the kernel a closed-form ray restriction, evaluated as
``f(x + t u) - f(x)`` without forming ``f(x)``; this keeps descent detectable
when the decrease is below the rounding level of ``f`` itself.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import backend
from ._pykernel import _bracket, _Counter, _golden, minimize_1d
from .core import NonFiniteValue, NonUnitDirection, as_vector, check_same_dim
from .oracle import Oracle

DEFAULT_T_MAX = 1e3
DEFAULT_TOL_T = 1e-10


class LineSearchStatus(str, enum.Enum):
    INTERIOR = "Interior"
    AT_ZERO = "AtZero"
    AT_BRACKET_CAP = "AtBracketCap"


_STATUS = {
    backend.INTERIOR: LineSearchStatus.INTERIOR,
    backend.AT_ZERO: LineSearchStatus.AT_ZERO,
    backend.AT_CAP: LineSearchStatus.AT_BRACKET_CAP,
}


@dataclass(frozen=True)
class LineSearchResult:
    t_star: float
    f_at_t_star: float
    evaluations: int
    status: LineSearchStatus


def bracket_minimum(phi, t_max: float) -> tuple:
    """Return ``(lo, hi)`` within ``[0, t_max]`` holding a local minimizer of ``phi``."""
    if not t_max > 0:
        raise ValueError("t_max must be > 0")
    phi = _Counter(phi)
    lo, hi, _, _, _ = _bracket(phi, float(t_max), phi(0.0))
    return lo, hi


def golden_section(phi, lo: float, hi: float, tol_t: float, f_lo=None, f_hi=None) -> float:
    """Golden-section minimizer of ``phi`` on ``[lo, hi]``.

    Endpoint values are evaluated unless supplied; the returned point is the
    best one seen, so it never does worse than either endpoint.
    """
    if not lo < hi:
        raise ValueError("golden_section needs lo < hi")
    if f_lo is None:
        f_lo = phi(lo)
    if f_hi is None:
        f_hi = phi(hi)
    t, _ = _golden(phi, float(lo), float(hi), float(tol_t), f_lo, f_hi)
    return t


def exact_line_search(
    oracle: Oracle,
    x,
    u,
    t_max: float = DEFAULT_T_MAX,
    tol_t: float = DEFAULT_TOL_T,
) -> LineSearchResult:
    x = oracle._check(x)
    u = as_vector(u, "u")
    check_same_dim(x, u)
    if abs(float(np.linalg.norm(u)) - 1.0) > 1e-12:
        raise NonUnitDirection(f"|u| = {float(np.linalg.norm(u))!r}, expected 1")
    if not (t_max > 0 and tol_t > 0):
        raise ValueError("t_max and tol_t must be > 0")

    f0 = oracle.eval(x)
    ray = oracle.ray(x, u)
    if ray is not None:
        t, _, evals, code = backend.ray_minimize(ray, float(t_max), float(tol_t), oracle.needs_prescan)
        if code == backend.NONFINITE:
            raise NonFiniteValue(f"{oracle.id}: non-finite objective along the ray")
    else:

        def delta(t):
            return oracle.eval(x + t * u) - f0

        t, _, evals, code = minimize_1d(delta, float(t_max), float(tol_t), oracle.needs_prescan)

    if code == backend.AT_ZERO:
        return LineSearchResult(0.0, f0, evals + 1, LineSearchStatus.AT_ZERO)
    f_new = oracle.eval(x + t * u)
    if not math.isfinite(f_new):
        raise NonFiniteValue(f"{oracle.id}: non-finite objective at t={t}")
    return LineSearchResult(float(t), f_new, evals + 2, _STATUS[code])
