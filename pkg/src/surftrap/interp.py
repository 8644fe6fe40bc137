"""Bicubic spline surfaces with fast point evaluation.

Coefficients come from FITPACK (``RectBivariateSpline`` with ``s=0``); the
evaluation of values and first/second partials is done here in numba so
that Newton iterations and trajectory integration can call it per point.
"""

import numpy as np
from numba import njit
from scipy.interpolate import RectBivariateSpline


@njit(cache=True)
def _find_span(t, x):
    n = t.shape[0] - 4  # number of coefficients
    if x >= t[n]:
        return n - 1
    if x <= t[3]:
        return 3
    lo, hi = 3, n
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if x < t[mid]:
            hi = mid
        else:
            lo = mid
    return lo


@njit(cache=True)
def _ders_basis(t, span, x, out):
    """Cubic B-spline basis values and two derivatives (Piegl & Tiller A2.3)."""
    p = 3
    ndu = np.zeros((4, 4))
    left = np.zeros(4)
    right = np.zeros(4)
    ndu[0, 0] = 1.0
    for j in range(1, p + 1):
        left[j] = x - t[span + 1 - j]
        right[j] = t[span + j] - x
        saved = 0.0
        for r in range(j):
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r]
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved
    for j in range(p + 1):
        out[0, j] = ndu[j, p]
    a = np.zeros((2, 4))
    for r in range(p + 1):
        s1, s2 = 0, 1
        a[0, 0] = 1.0
        for k in range(1, 3):
            dval = 0.0
            rk = r - k
            pk = p - k
            if r >= k:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                dval = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                dval += a[s2, j] * ndu[rk + j, pk]
            if r <= pk:
                a[s2, k] = -a[s1, k - 1] / ndu[pk + 1, r]
                dval += a[s2, k] * ndu[r, pk]
            out[k, r] = dval
            s1, s2 = s2, s1
    out[1, :] *= p
    out[2, :] *= p * (p - 1)


@njit(cache=True)
def spline_eval(tx, ty, c, x, y, out):
    """Fill ``out`` with [f, fx, fy, fxx, fxy, fyy] at (x, y)."""
    sx = _find_span(tx, x)
    sy = _find_span(ty, y)
    bx = np.zeros((3, 4))
    by = np.zeros((3, 4))
    _ders_basis(tx, sx, x, bx)
    _ders_basis(ty, sy, y, by)
    for k in range(6):
        out[k] = 0.0
    for i in range(4):
        for j in range(4):
            cij = c[sx - 3 + i, sy - 3 + j]
            out[0] += bx[0, i] * by[0, j] * cij
            out[1] += bx[1, i] * by[0, j] * cij
            out[2] += bx[0, i] * by[1, j] * cij
            out[3] += bx[2, i] * by[0, j] * cij
            out[4] += bx[1, i] * by[1, j] * cij
            out[5] += bx[0, i] * by[2, j] * cij


class BicubicSurface:
    """Interpolating bicubic spline of ``values[i, j]`` sampled at ``(xs[i], ys[j])``."""

    def __init__(self, xs, ys, values):
        self.xs = np.asarray(xs, float)
        self.ys = np.asarray(ys, float)
        spl = RectBivariateSpline(self.xs, self.ys, np.asarray(values, float), s=0)
        tx, ty, c = spl.tck
        self.tx, self.ty = np.asarray(tx), np.asarray(ty)
        self.c = np.ascontiguousarray(c.reshape(len(tx) - 4, len(ty) - 4))
        self._buf = np.zeros(6)

    @property
    def extent(self):
        return self.xs[0], self.xs[-1], self.ys[0], self.ys[-1]

    def inside(self, x, y):
        return self.xs[0] <= x <= self.xs[-1] and self.ys[0] <= y <= self.ys[-1]

    def derivatives(self, x, y):
        """Return array [f, fx, fy, fxx, fxy, fyy]."""
        spline_eval(self.tx, self.ty, self.c, float(x), float(y), self._buf)
        return self._buf.copy()

    def __call__(self, x, y):
        return self.derivatives(x, y)[0]

    def gradient(self, x, y):
        v = self.derivatives(x, y)
        return np.array([v[1], v[2]])

    def hessian(self, x, y):
        v = self.derivatives(x, y)
        return np.array([[v[3], v[4]], [v[4], v[5]]])
