"""Pure-Python line-search kernel.

This is the reference implementation and the import-time fallback for the
compiled ``_kernels`` extension. Both evaluate a :class:`~proxdescent.oracle.Ray`
with the same operation order, so they agree to the last bit on IEEE
hardware; ``tests/test_backends.py`` holds them to that.

Status codes returned by :func:`ray_minimize`: 0 interior minimum,
1 no descent (t = 0), 2 minimum at the bracket cap, 3 non-finite value.
"""
from __future__ import annotations

import math

from .core import NonFiniteValue

INTERIOR, AT_ZERO, AT_CAP, NONFINITE = 0, 1, 2, 3

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
GRID_POINTS = 64
MAX_GOLDEN_ITERS = 300
MAX_BRACKET_ITERS = 2000
# near a flat minimum golden-section values differ only by rounding; the
# closed-form polish point wins ties within a few ulps of the best value
POLISH_ULPS = 16.0 * 2.220446049250313e-16


class _Counter:
    __slots__ = ("phi", "n")

    def __init__(self, phi):
        self.phi = phi
        self.n = 0

    def __call__(self, t):
        self.n += 1
        v = self.phi(t)
        if not math.isfinite(v):
            raise NonFiniteValue(f"non-finite value {v} at t={t}")
        return v


def _bracket(phi, t_max, f0):
    """Geometric expansion from t = min(1, t_max).

    Returns ``(lo, hi, f_lo, f_hi, capped)``.
    """
    t_prev, f_prev = 0.0, f0
    t1 = min(1.0, t_max)
    f1 = phi(t1)
    if f1 >= f0:
        return 0.0, t1, f0, f1, False
    for _ in range(MAX_BRACKET_ITERS):
        if t1 >= t_max:
            return t_prev, t_max, f_prev, f1, True
        t2 = min(2.0 * t1, t_max)
        f2 = phi(t2)
        if f2 >= f1:
            return t_prev, t2, f_prev, f2, False
        t_prev, f_prev, t1, f1 = t1, f1, t2, f2
    return t_prev, t1, f_prev, f1, True


def _golden(phi, lo, hi, tol, f_lo, f_hi):
    """Golden-section search on [lo, hi]; returns the best point seen."""
    if f_lo <= f_hi:
        best_t, best_f = lo, f_lo
    else:
        best_t, best_f = hi, f_hi
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc = phi(c)
    fd = phi(d)
    if fc < best_f:
        best_t, best_f = c, fc
    if fd < best_f:
        best_t, best_f = d, fd
    it = 0
    while b - a > tol and it < MAX_GOLDEN_ITERS:
        it += 1
        if fc < fd:
            b = d
            d, fd = c, fc
            c = b - INV_PHI * (b - a)
            fc = phi(c)
            if fc < best_f:
                best_t, best_f = c, fc
        else:
            a = c
            c, fc = d, fd
            d = a + INV_PHI * (b - a)
            fd = phi(d)
            if fd < best_f:
                best_t, best_f = d, fd
    return best_t, best_f


def _grid(t_max, tol):
    lower = max(tol, 1e-12 * t_max)
    if not lower < t_max:
        return [0.0, t_max]
    step = math.log(t_max / lower) / (GRID_POINTS - 2)
    pts = [0.0]
    for i in range(GRID_POINTS - 2):
        pts.append(lower * math.exp(i * step))
    pts.append(t_max)
    return pts


def minimize_1d(phi, t_max, tol, prescan=False, breakpoints=None, polish=None):
    """Minimize ``phi`` over [0, t_max] given ``phi(0) == 0``.

    ``polish(t)`` may propose the exact minimizer of the smooth piece
    containing ``t``; ``breakpoints(t, radius)`` lists nearby kinks. Both are
    accepted only when they do at least as well as the golden-section point
    (the polish point up to ``POLISH_ULPS`` relative rounding).
    Returns ``(t, value, evaluations, status)``.
    """
    phi = _Counter(phi)
    if prescan:
        pts = _grid(t_max, tol)
        vals = [0.0] + [phi(t) for t in pts[1:]]
        k = 0
        for i in range(1, len(pts)):
            if vals[i] < vals[k]:
                k = i
        last = len(pts) - 1
        lo = pts[k - 1] if k > 0 else 0.0
        f_lo = vals[k - 1] if k > 0 else 0.0
        hi = pts[k + 1] if k < last else t_max
        f_hi = vals[k + 1] if k < last else vals[last]
        capped = k == last
        best_t, best_f = _golden(phi, lo, hi, tol, f_lo, f_hi)
        if vals[k] < best_f:
            best_t, best_f = pts[k], vals[k]
    else:
        lo, hi, f_lo, f_hi, capped = _bracket(phi, t_max, 0.0)
        best_t, best_f = _golden(phi, lo, hi, tol, f_lo, f_hi)

    if polish is not None:
        t = polish(best_t)
        if t is not None and lo <= t <= hi and 0.0 < t <= t_max:
            v = phi(t)
            if v <= best_f + POLISH_ULPS * (1.0 + abs(best_f)):
                best_t, best_f = t, v

    if breakpoints is not None:
        for t in breakpoints(best_t, 4.0 * tol):
            if 0.0 < t <= t_max:
                v = phi(t)
                if v <= best_f:
                    best_t, best_f = t, v

    if not best_f < 0.0:
        return 0.0, 0.0, phi.n, AT_ZERO
    if capped and t_max - best_t <= 4.0 * tol:
        return best_t, best_f, phi.n, AT_CAP
    return best_t, best_f, phi.n, INTERIOR


# ---------------------------------------------------------------------------
# ray restriction


class _RayFn:
    """Callable ``t -> f(x + t u) - f(x)`` for a :class:`Ray`."""

    def __init__(self, ray):
        self.c1 = float(ray.c1)
        self.c2 = float(ray.c2)
        self.p = [float(v) for v in ray.p]
        self.q = [float(v) for v in ray.q]
        self.w = float(ray.w)
        self.r = [float(v) for v in ray.r]
        self.s = [float(v) for v in ray.s]
        self.m0 = max(self.p) if self.p else 0.0
        self.rosen = len(ray.rosen_x) == 2
        if self.rosen:
            self.x0, self.x1 = float(ray.rosen_x[0]), float(ray.rosen_x[1])
            self.u0, self.u1 = float(ray.rosen_u[0]), float(ray.rosen_u[1])
            self.f_rosen = _rosen(self.x0, self.x1)

    def __call__(self, t):
        val = t * (self.c1 + 0.5 * self.c2 * t)
        if self.p:
            m = self.p[0] + self.q[0] * t
            for i in range(1, len(self.p)):
                v = self.p[i] + self.q[i] * t
                if v > m:
                    m = v
            val += m - self.m0
        if self.r:
            acc = 0.0
            for j in range(len(self.r)):
                acc += abs(self.r[j] + self.s[j] * t) - abs(self.r[j])
            val += self.w * acc
        if self.rosen:
            val += _rosen(self.x0 + t * self.u0, self.x1 + t * self.u1) - self.f_rosen
        return val

    def polish(self, t):
        """Stationary point of the quadratic piece active at ``t``, if any."""
        if self.rosen or not self.c2 > 0.0:
            return None
        slope = self.c1
        if self.p:
            k = 0
            m = self.p[0] + self.q[0] * t
            for i in range(1, len(self.p)):
                v = self.p[i] + self.q[i] * t
                if v > m:
                    m = v
                    k = i
            slope += self.q[k]
        if self.r:
            acc = 0.0
            for j in range(len(self.r)):
                z = self.r[j] + self.s[j] * t
                if z > 0.0:
                    acc += self.s[j]
                elif z < 0.0:
                    acc -= self.s[j]
                elif self.s[j] != 0.0:
                    return None
            slope += self.w * acc
        return -slope / self.c2

    def breakpoints(self, t, radius):
        """Kinks of the ray restriction within ``radius`` of ``t``, sorted."""
        out = []
        n = len(self.p)
        for i in range(n):
            for j in range(i + 1, n):
                dq = self.q[j] - self.q[i]
                if dq != 0.0:
                    tk = (self.p[i] - self.p[j]) / dq
                    if abs(tk - t) <= radius:
                        out.append(tk)
        for j in range(len(self.r)):
            if self.s[j] != 0.0:
                tk = -self.r[j] / self.s[j]
                if abs(tk - t) <= radius:
                    out.append(tk)
        out.sort()
        return out


def _rosen(a, b):
    d = 1.0 - a
    e = b - a * a
    return d * d + 100.0 * (e * e)


def ray_delta(ray, t):
    return _RayFn(ray)(float(t))


def ray_minimize(ray, t_max, tol, prescan):
    """Returns ``(t, delta, evaluations, status)``; never raises."""
    fn = _RayFn(ray)
    try:
        return minimize_1d(fn, float(t_max), float(tol), bool(prescan), fn.breakpoints, fn.polish)
    except NonFiniteValue:
        return 0.0, 0.0, 0, NONFINITE
