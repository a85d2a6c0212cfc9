# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled ball-sum backend.

Mirrors the fallback loop structure exactly: offsets ascend (rows outer
for 2-D) and every output cell receives the same sequence of float64
adds, so results are bit-identical across backends.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def ball_sum_1d(object u_obj, Py_ssize_t k):
    u_arr = np.ascontiguousarray(u_obj, dtype=np.float64)
    cdef double[::1] u = u_arr
    cdef Py_ssize_t n = u.shape[0]
    out_arr = np.zeros(n, dtype=np.float64)
    ext_arr = np.empty(n + 2 * k, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[::1] ext = ext_arr
    cdef Py_ssize_t j, off, i, src
    for j in range(n + 2 * k):
        src = (j - k) % n
        if src < 0:
            src += n
        ext[j] = u[src]
    for off in range(2 * k + 1):
        for i in range(n):
            out[i] += ext[off + i]
    return out_arr


def ball_sum_2d(object u_obj, object kx_obj):
    u_arr = np.ascontiguousarray(u_obj, dtype=np.float64)
    kx_arr = np.ascontiguousarray(kx_obj, dtype=np.int64)
    cdef double[:, ::1] u = u_arr
    cdef long long[::1] kx = kx_arr
    cdef Py_ssize_t K = kx.shape[0] - 1
    cdef Py_ssize_t Kx = <Py_ssize_t> kx[0]
    cdef Py_ssize_t ny = u.shape[0]
    cdef Py_ssize_t nx = u.shape[1]
    out_arr = np.zeros((ny, nx), dtype=np.float64)
    ext_arr = np.empty((ny + 2 * K, nx + 2 * Kx), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[:, ::1] ext = ext_arr
    cdef Py_ssize_t jy, jx, sy, sx, dy, dx, iy, ix, w, ady
    for jy in range(ny + 2 * K):
        sy = (jy - K) % ny
        if sy < 0:
            sy += ny
        for jx in range(nx + 2 * Kx):
            sx = (jx - Kx) % nx
            if sx < 0:
                sx += nx
            ext[jy, jx] = u[sy, sx]
    for dy in range(-K, K + 1):
        ady = dy if dy >= 0 else -dy
        w = <Py_ssize_t> kx[ady]
        for dx in range(-w, w + 1):
            for iy in range(ny):
                for ix in range(nx):
                    out[iy, ix] += ext[K + dy + iy, Kx + dx + ix]
    return out_arr
