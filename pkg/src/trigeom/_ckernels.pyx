# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled polygon kernels; mirrors ``_pykernels`` operation for operation."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, hypot, fmin, fmax

cnp.import_array()

NAME = "cython"


cdef inline int orient_band(double ax, double ay, double bx, double by,
                            double px, double py, double eps) noexcept nogil:
    cdef double cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    if fabs(cross) <= eps * hypot(bx - ax, by - ay):
        return 0
    return 1 if cross > 0 else -1


cdef inline bint on_segment(double ax, double ay, double bx, double by,
                            double px, double py, double eps) noexcept nogil:
    return (fmin(ax, bx) - eps <= px and px <= fmax(ax, bx) + eps
            and fmin(ay, by) - eps <= py and py <= fmax(ay, by) + eps)


cdef bint edges_meet(const double[:, ::1] xy, Py_ssize_t n, Py_ssize_t i,
                     Py_ssize_t j, double eps) noexcept nogil:
    cdef Py_ssize_t i1 = (i + 1) % n, j1 = (j + 1) % n
    cdef double ax = xy[i, 0], ay = xy[i, 1], bx = xy[i1, 0], by = xy[i1, 1]
    cdef double cx = xy[j, 0], cy = xy[j, 1], dx = xy[j1, 0], dy = xy[j1, 1]
    cdef int o1 = orient_band(ax, ay, bx, by, cx, cy, eps)
    cdef int o2 = orient_band(ax, ay, bx, by, dx, dy, eps)
    cdef int o3, o4
    if j == i + 1:
        return o2 == 0 and (dx - bx) * (ax - bx) + (dy - by) * (ay - by) > 0
    if i == 0 and j == n - 1:
        return o1 == 0 and (cx - ax) * (bx - ax) + (cy - ay) * (by - ay) > 0
    o3 = orient_band(cx, cy, dx, dy, ax, ay, eps)
    o4 = orient_band(cx, cy, dx, dy, bx, by, eps)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and on_segment(ax, ay, bx, by, cx, cy, eps):
        return True
    if o2 == 0 and on_segment(ax, ay, bx, by, dx, dy, eps):
        return True
    if o3 == 0 and on_segment(cx, cy, dx, dy, ax, ay, eps):
        return True
    if o4 == 0 and on_segment(cx, cy, dx, dy, bx, by, eps):
        return True
    return False


def first_crossing(const double[:, ::1] xy, double eps):
    cdef Py_ssize_t n = xy.shape[0], i, j
    with nogil:
        for i in range(n - 1):
            for j in range(i + 1, n):
                if edges_meet(xy, n, i, j, eps):
                    with gil:
                        return int(i), int(j)
    return -1, -1


cdef bint is_ear(const double[:, ::1] xy, const long[::1] prv, const long[::1] nxt,
                 long start, long v, double eps) noexcept nogil:
    cdef long a = prv[v], b = nxt[v], p
    cdef double ax = xy[a, 0], ay = xy[a, 1]
    cdef double vx = xy[v, 0], vy = xy[v, 1]
    cdef double bx = xy[b, 0], by = xy[b, 1]
    cdef double px, py
    cdef double cross = (vx - ax) * (by - ay) - (vy - ay) * (bx - ax)
    cdef double longest = fmax(fmax(hypot(vx - ax, vy - ay), hypot(bx - vx, by - vy)),
                               hypot(bx - ax, by - ay))
    if cross <= eps * longest:
        return False
    p = nxt[b]
    while p != a:
        px = xy[p, 0]
        py = xy[p, 1]
        if (orient_band(ax, ay, vx, vy, px, py, eps) >= 0
                and orient_band(vx, vy, bx, by, px, py, eps) >= 0
                and orient_band(bx, by, ax, ay, px, py, eps) >= 0):
            return False
        p = nxt[p]
    return True


def ear_flags(const double[:, ::1] xy, double eps):
    cdef Py_ssize_t n = xy.shape[0]
    cdef long v
    cdef cnp.ndarray[long, ndim=1] prv = np.roll(np.arange(n, dtype=np.int_), 1)
    cdef cnp.ndarray[long, ndim=1] nxt = np.roll(np.arange(n, dtype=np.int_), -1)
    out = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    cdef const long[::1] pv = prv, nv = nxt
    with nogil:
        for v in range(n):
            o[v] = is_ear(xy, pv, nv, 0, v, eps)
    return out


def earclip(const double[:, ::1] xy, double eps):
    cdef Py_ssize_t n = xy.shape[0]
    prv_a = np.roll(np.arange(n, dtype=np.int_), 1)
    nxt_a = np.roll(np.arange(n, dtype=np.int_), -1)
    cdef long[::1] prv = prv_a, nxt = nxt_a
    cdef unsigned char[::1] alive = np.ones(n, dtype=np.uint8)
    cdef unsigned char[::1] ear = ear_flags(xy, eps)
    tris_a = np.empty((max(n - 2, 0), 3), dtype=np.int64)
    diags_a = np.empty((max(n - 3, 0), 2), dtype=np.int64)
    cdef long long[:, ::1] tris = tris_a, diags = diags_a
    cdef Py_ssize_t step, u
    cdef long v, a, b
    cdef bint found
    for step in range(n - 3):
        v = -1
        for u in range(n):
            if alive[u] and ear[u]:
                v = u
                break
        if v < 0:
            for u in range(n):
                if alive[u]:
                    ear[u] = is_ear(xy, prv, nxt, 0, u, eps)
            for u in range(n):
                if alive[u] and ear[u]:
                    v = u
                    break
            if v < 0:
                raise ValueError(f"no ear found with {n - step} vertices left")
        a = prv[v]
        b = nxt[v]
        tris[step, 0] = a
        tris[step, 1] = v
        tris[step, 2] = b
        diags[step, 0] = a if a < b else b
        diags[step, 1] = b if a < b else a
        alive[v] = 0
        nxt[a] = b
        prv[b] = a
        ear[a] = is_ear(xy, prv, nxt, 0, a, eps)
        ear[b] = is_ear(xy, prv, nxt, 0, b, eps)
    for u in range(n):
        if alive[u]:
            tris[n - 3, 0] = prv[u]
            tris[n - 3, 1] = u
            tris[n - 3, 2] = nxt[u]
            break
    return tris_a, diags_a
