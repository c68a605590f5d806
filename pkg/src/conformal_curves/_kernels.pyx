# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled winding-number / trace-distance kernel."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def winding_and_distance(const double[:, ::1] points, const double[:, ::1] poly):
    """Integer winding number of the closed polygon ``poly`` around each point
    and the distance from each point to the polygon's trace."""
    cdef Py_ssize_t npts = points.shape[0]
    cdef Py_ssize_t nv = poly.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] wind = np.zeros(npts, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist = np.empty(npts, dtype=np.float64)
    cdef cnp.int64_t[::1] w_view = wind
    cdef double[::1] d_view = dist
    cdef Py_ssize_t i, j, jn
    cdef double px, py, x0, y0, x1, y1, ex, ey, cross, len2, u, dx, dy, d2, best
    cdef cnp.int64_t w
    with nogil:
        for i in range(npts):
            px = points[i, 0]
            py = points[i, 1]
            w = 0
            best = 1e300
            for j in range(nv):
                jn = j + 1
                if jn == nv:
                    jn = 0
                x0 = poly[j, 0]
                y0 = poly[j, 1]
                x1 = poly[jn, 0]
                y1 = poly[jn, 1]
                ex = x1 - x0
                ey = y1 - y0
                cross = ex * (py - y0) - (px - x0) * ey
                if y0 <= py:
                    if y1 > py and cross > 0:
                        w += 1
                else:
                    if y1 <= py and cross < 0:
                        w -= 1
                len2 = ex * ex + ey * ey
                u = 0.0
                if len2 > 0:
                    u = ((px - x0) * ex + (py - y0) * ey) / len2
                    if u < 0:
                        u = 0.0
                    elif u > 1:
                        u = 1.0
                dx = x0 + u * ex - px
                dy = y0 + u * ey - py
                d2 = dx * dx + dy * dy
                if d2 < best:
                    best = d2
            w_view[i] = w
            d_view[i] = sqrt(best)
    return wind, dist
