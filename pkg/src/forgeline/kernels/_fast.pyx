# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for mask rasterization, RLE, pixel counting, and LCS."""

import numpy as np

cimport numpy as cnp
from libc.math cimport ceil

cnp.import_array()


def fill_polygon(xs, ys, int width, int height):
    """Scanline even-odd fill sampled at pixel centers; see kernels.pure."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vx = np.ascontiguousarray(xs, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vy = np.ascontiguousarray(ys, dtype=np.float64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.zeros((height, width), dtype=np.uint8)
    cdef Py_ssize_t n = vx.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cross = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i, e, k, m, lo, hi, j
    cdef double py, y1, y2, x1, x2, t, ymin, ymax

    ymin = vy[0]
    ymax = vy[0]
    for e in range(n):
        if vy[e] < ymin:
            ymin = vy[e]
        if vy[e] > ymax:
            ymax = vy[e]

    for i in range(height):
        py = i + 0.5
        if py < ymin or py > ymax:
            continue
        m = 0
        for e in range(n):
            y1 = vy[e]
            y2 = vy[(e + 1) % n]
            if (y1 > py) != (y2 > py):
                x1 = vx[e]
                x2 = vx[(e + 1) % n]
                t = (py - y1) / (y2 - y1)
                cross[m] = x1 + t * (x2 - x1)
                m += 1
        if m < 2:
            continue
        cross[:m].sort()
        for k in range(0, m - 1, 2):
            lo = <Py_ssize_t>ceil(cross[k] - 0.5)
            hi = <Py_ssize_t>ceil(cross[k + 1] - 0.5)
            if lo < 0:
                lo = 0
            if hi > width:
                hi = width
            for j in range(lo, hi):
                out[i, j] = 1
    return out


def rle_encode(bits):
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] flat = np.ascontiguousarray(bits, dtype=np.uint8).ravel()
    cdef Py_ssize_t n = flat.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    runs_list = []
    cdef cnp.uint8_t cur = 0
    cdef long long count = 0
    cdef Py_ssize_t i
    for i in range(n):
        if flat[i] == cur:
            count += 1
        else:
            runs_list.append(count)
            cur = flat[i]
            count = 1
    runs_list.append(count)
    return np.asarray(runs_list, dtype=np.int64)


def rle_decode(runs, Py_ssize_t n):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] r = np.ascontiguousarray(runs, dtype=np.int64)
    cdef long long total = 0
    cdef Py_ssize_t i, k, pos = 0
    for i in range(r.shape[0]):
        if r[i] < 0:
            raise ValueError("run lengths must be non-negative")
        total += r[i]
    if total != n:
        raise ValueError(f"run lengths sum to {total}, expected {n}")
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out = np.empty(n, dtype=np.uint8)
    cdef cnp.uint8_t val = 0
    for i in range(r.shape[0]):
        for k in range(r[i]):
            out[pos] = val
            pos += 1
        val = 1 - val
    return out


def confusion_counts(pred, gt):
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] p = np.ascontiguousarray(pred, dtype=np.uint8).ravel()
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] g = np.ascontiguousarray(gt, dtype=np.uint8).ravel()
    cdef long long tp = 0, fp = 0, fn = 0, tn = 0
    cdef Py_ssize_t i
    for i in range(p.shape[0]):
        if p[i]:
            if g[i]:
                tp += 1
            else:
                fp += 1
        else:
            if g[i]:
                fn += 1
            else:
                tn += 1
    return tp, fp, fn, tn


def lcs_length(a, b):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] s = np.ascontiguousarray(a, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] t = np.ascontiguousarray(b, dtype=np.int64)
    cdef Py_ssize_t n = s.shape[0], m = t.shape[0]
    if n == 0 or m == 0:
        return 0
    cdef cnp.ndarray[cnp.int64_t, ndim=1] prev = np.zeros(m + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cur = np.zeros(m + 1, dtype=np.int64)
    cdef Py_ssize_t i, j
    cdef long long best
    for i in range(n):
        cur[0] = 0
        for j in range(1, m + 1):
            if s[i] == t[j - 1]:
                best = prev[j - 1] + 1
            else:
                best = 0
            if prev[j] > best:
                best = prev[j]
            if cur[j - 1] > best:
                best = cur[j - 1]
            cur[j] = best
        prev, cur = cur, prev
    return int(prev[m])
