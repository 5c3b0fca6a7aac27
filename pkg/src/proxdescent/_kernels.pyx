# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled line-search kernel.

Same algorithm and floating-point operation order as ``_pykernel``; the ray
restriction is evaluated in C so the golden-section loop never re-enters
the interpreter.
"""
from libc.math cimport exp, log, fabs, isfinite, sqrt

import numpy as np

cdef double INV_PHI = (sqrt(5.0) - 1.0) / 2.0
cdef int GRID_POINTS = 64
cdef int MAX_GOLDEN_ITERS = 300
cdef int MAX_BRACKET_ITERS = 2000
cdef double POLISH_ULPS = 16.0 * 2.220446049250313e-16

cdef enum:
    INTERIOR = 0
    AT_ZERO = 1
    AT_CAP = 2
    NONFINITE = 3


cdef inline double _rosen(double a, double b) nogil:
    cdef double d = 1.0 - a
    cdef double e = b - a * a
    return d * d + 100.0 * (e * e)


cdef class _RayFn:
    cdef double c1, c2, w, m0, f_rosen
    cdef double x0, x1, u0, u1
    cdef bint rosen
    cdef const double[::1] p, q, r, s
    cdef Py_ssize_t np_, nr
    cdef public long n
    cdef public bint bad

    def __init__(self, ray):
        cdef Py_ssize_t i
        self.c1 = float(ray.c1)
        self.c2 = float(ray.c2)
        self.w = float(ray.w)
        self.p = np.ascontiguousarray(ray.p, dtype=np.float64)
        self.q = np.ascontiguousarray(ray.q, dtype=np.float64)
        self.r = np.ascontiguousarray(ray.r, dtype=np.float64)
        self.s = np.ascontiguousarray(ray.s, dtype=np.float64)
        self.np_ = self.p.shape[0]
        self.nr = self.r.shape[0]
        self.m0 = 0.0
        if self.np_ > 0:
            self.m0 = self.p[0]
            for i in range(1, self.np_):
                if self.p[i] > self.m0:
                    self.m0 = self.p[i]
        self.rosen = len(ray.rosen_x) == 2
        if self.rosen:
            self.x0 = float(ray.rosen_x[0])
            self.x1 = float(ray.rosen_x[1])
            self.u0 = float(ray.rosen_u[0])
            self.u1 = float(ray.rosen_u[1])
            self.f_rosen = _rosen(self.x0, self.x1)
        self.n = 0
        self.bad = False

    cdef double value(self, double t):
        cdef double val = t * (self.c1 + 0.5 * self.c2 * t)
        cdef double m, v, acc
        cdef Py_ssize_t i, j
        if self.np_ > 0:
            m = self.p[0] + self.q[0] * t
            for i in range(1, self.np_):
                v = self.p[i] + self.q[i] * t
                if v > m:
                    m = v
            val += m - self.m0
        if self.nr > 0:
            acc = 0.0
            for j in range(self.nr):
                acc += fabs(self.r[j] + self.s[j] * t) - fabs(self.r[j])
            val += self.w * acc
        if self.rosen:
            val += _rosen(self.x0 + t * self.u0, self.x1 + t * self.u1) - self.f_rosen
        return val

    cdef double phi(self, double t):
        cdef double v = self.value(t)
        self.n += 1
        if not isfinite(v):
            self.bad = True
        return v

    def __call__(self, double t):
        return self.value(t)

    cdef bint polish(self, double t, double* out):
        cdef double slope, m, v, acc, z
        cdef Py_ssize_t i, j, k
        if self.rosen or not self.c2 > 0.0:
            return False
        slope = self.c1
        if self.np_ > 0:
            k = 0
            m = self.p[0] + self.q[0] * t
            for i in range(1, self.np_):
                v = self.p[i] + self.q[i] * t
                if v > m:
                    m = v
                    k = i
            slope += self.q[k]
        if self.nr > 0:
            acc = 0.0
            for j in range(self.nr):
                z = self.r[j] + self.s[j] * t
                if z > 0.0:
                    acc += self.s[j]
                elif z < 0.0:
                    acc -= self.s[j]
                elif self.s[j] != 0.0:
                    return False
            slope += self.w * acc
        out[0] = -slope / self.c2
        return True

    def breakpoints(self, double t, double radius):
        cdef list out = []
        cdef Py_ssize_t i, j
        cdef double dq, tk
        for i in range(self.np_):
            for j in range(i + 1, self.np_):
                dq = self.q[j] - self.q[i]
                if dq != 0.0:
                    tk = (self.p[i] - self.p[j]) / dq
                    if fabs(tk - t) <= radius:
                        out.append(tk)
        for j in range(self.nr):
            if self.s[j] != 0.0:
                tk = -self.r[j] / self.s[j]
                if fabs(tk - t) <= radius:
                    out.append(tk)
        out.sort()
        return out


cdef int _bracket(_RayFn fn, double t_max, double* lo, double* hi,
                  double* f_lo, double* f_hi, bint* capped):
    cdef double t_prev = 0.0, f_prev = 0.0
    cdef double t1 = 1.0 if 1.0 < t_max else t_max
    cdef double t2, f2
    cdef double f1 = fn.phi(t1)
    cdef int k
    if fn.bad:
        return -1
    if f1 >= 0.0:
        lo[0] = 0.0; hi[0] = t1; f_lo[0] = 0.0; f_hi[0] = f1; capped[0] = False
        return 0
    for k in range(MAX_BRACKET_ITERS):
        if t1 >= t_max:
            lo[0] = t_prev; hi[0] = t_max; f_lo[0] = f_prev; f_hi[0] = f1; capped[0] = True
            return 0
        t2 = 2.0 * t1
        if t2 > t_max:
            t2 = t_max
        f2 = fn.phi(t2)
        if fn.bad:
            return -1
        if f2 >= f1:
            lo[0] = t_prev; hi[0] = t2; f_lo[0] = f_prev; f_hi[0] = f2; capped[0] = False
            return 0
        t_prev = t1; f_prev = f1; t1 = t2; f1 = f2
    lo[0] = t_prev; hi[0] = t1; f_lo[0] = f_prev; f_hi[0] = f1; capped[0] = True
    return 0


cdef int _golden(_RayFn fn, double lo, double hi, double tol, double f_lo,
                 double f_hi, double* out_t, double* out_f):
    cdef double best_t, best_f, a, b, c, d, fc, fd
    cdef int it = 0
    if f_lo <= f_hi:
        best_t = lo; best_f = f_lo
    else:
        best_t = hi; best_f = f_hi
    a = lo
    b = hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc = fn.phi(c)
    fd = fn.phi(d)
    if fn.bad:
        return -1
    if fc < best_f:
        best_t = c; best_f = fc
    if fd < best_f:
        best_t = d; best_f = fd
    while b - a > tol and it < MAX_GOLDEN_ITERS:
        it += 1
        if fc < fd:
            b = d
            d = c; fd = fc
            c = b - INV_PHI * (b - a)
            fc = fn.phi(c)
            if fc < best_f:
                best_t = c; best_f = fc
        else:
            a = c
            c = d; fc = fd
            d = a + INV_PHI * (b - a)
            fd = fn.phi(d)
            if fd < best_f:
                best_t = d; best_f = fd
        if fn.bad:
            return -1
    out_t[0] = best_t
    out_f[0] = best_f
    return 0


def ray_delta(ray, double t):
    return _RayFn(ray).value(t)


def ray_minimize(ray, double t_max, double tol, bint prescan):
    """Returns ``(t, delta, evaluations, status)``; never raises."""
    cdef _RayFn fn = _RayFn(ray)
    cdef double lo = 0.0, hi = 0.0, f_lo = 0.0, f_hi = 0.0
    cdef double best_t = 0.0, best_f = 0.0, lower, step, v, tk
    cdef bint capped = False
    cdef int i, k, last, npts
    cdef double pts[64]
    cdef double vals[64]

    if prescan:
        lower = tol if tol > 1e-12 * t_max else 1e-12 * t_max
        pts[0] = 0.0
        vals[0] = 0.0
        if not lower < t_max:
            npts = 2
            pts[1] = t_max
        else:
            npts = GRID_POINTS
            step = log(t_max / lower) / (GRID_POINTS - 2)
            for i in range(GRID_POINTS - 2):
                pts[i + 1] = lower * exp(i * step)
            pts[GRID_POINTS - 1] = t_max
        for i in range(1, npts):
            vals[i] = fn.phi(pts[i])
        if fn.bad:
            return 0.0, 0.0, 0, NONFINITE
        k = 0
        for i in range(1, npts):
            if vals[i] < vals[k]:
                k = i
        last = npts - 1
        if k > 0:
            lo = pts[k - 1]; f_lo = vals[k - 1]
        else:
            lo = 0.0; f_lo = 0.0
        if k < last:
            hi = pts[k + 1]; f_hi = vals[k + 1]
        else:
            hi = t_max; f_hi = vals[last]
        capped = k == last
        if _golden(fn, lo, hi, tol, f_lo, f_hi, &best_t, &best_f) < 0:
            return 0.0, 0.0, 0, NONFINITE
        if vals[k] < best_f:
            best_t = pts[k]; best_f = vals[k]
    else:
        if _bracket(fn, t_max, &lo, &hi, &f_lo, &f_hi, &capped) < 0:
            return 0.0, 0.0, 0, NONFINITE
        if _golden(fn, lo, hi, tol, f_lo, f_hi, &best_t, &best_f) < 0:
            return 0.0, 0.0, 0, NONFINITE

    if fn.polish(best_t, &tk):
        if lo <= tk <= hi and 0.0 < tk <= t_max:
            v = fn.phi(tk)
            if fn.bad:
                return 0.0, 0.0, 0, NONFINITE
            if v <= best_f + POLISH_ULPS * (1.0 + fabs(best_f)):
                best_t = tk; best_f = v

    for tk in fn.breakpoints(best_t, 4.0 * tol):
        if 0.0 < tk <= t_max:
            v = fn.phi(tk)
            if fn.bad:
                return 0.0, 0.0, 0, NONFINITE
            if v <= best_f:
                best_t = tk; best_f = v

    if not best_f < 0.0:
        return 0.0, 0.0, fn.n, AT_ZERO
    if capped and t_max - best_t <= 4.0 * tol:
        return best_t, best_f, fn.n, AT_CAP
    return best_t, best_f, fn.n, INTERIOR
