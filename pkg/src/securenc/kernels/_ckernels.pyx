# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled inner loops for table-driven finite-field linear algebra.

Every field element is an integer code in [0, q). Arithmetic goes through
precomputed q-by-q tables, so the same loops serve GF(p) and GF(p^e).
"""
from libc.stdint cimport int64_t
import numpy as np


def rref(int64_t[:, ::1] a,
         const int64_t[:, ::1] add,
         const int64_t[:, ::1] sub,
         const int64_t[:, ::1] mul,
         const int64_t[::1] inv):
    """Reduce ``a`` to reduced row-echelon form in place; return pivot columns."""
    cdef Py_ssize_t rows = a.shape[0]
    cdef Py_ssize_t cols = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef int64_t f, s, t
    pivots = []
    for c in range(cols):
        if r >= rows:
            break
        piv = -1
        for i in range(r, rows):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(cols):
                t = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = t
        s = inv[a[r, c]]
        if s != 1:
            for j in range(c, cols):
                a[r, j] = mul[s, a[r, j]]
        for i in range(rows):
            if i == r:
                continue
            f = a[i, c]
            if f == 0:
                continue
            for j in range(c, cols):
                if a[r, j] != 0:
                    a[i, j] = sub[a[i, j], mul[f, a[r, j]]]
        pivots.append(c)
        r += 1
    return pivots


def matmul(const int64_t[:, ::1] a,
           const int64_t[:, ::1] b,
           const int64_t[:, ::1] add,
           const int64_t[:, ::1] mul):
    """Field matrix product ``a @ b``."""
    cdef Py_ssize_t n = a.shape[0], inner = a.shape[1], p = b.shape[1]
    cdef Py_ssize_t i, k, j
    cdef int64_t x
    out = np.zeros((n, p), dtype=np.int64)
    cdef int64_t[:, ::1] c = out
    for i in range(n):
        for k in range(inner):
            x = a[i, k]
            if x == 0:
                continue
            for j in range(p):
                if b[k, j] != 0:
                    c[i, j] = add[c[i, j], mul[x, b[k, j]]]
    return out


def max_pair_collisions(const int64_t[:, ::1] images):
    """Largest number of rows on which two distinct columns agree.

    ``images[f, x]`` is the image of input ``x`` under family member ``f``.
    Returns ``(max_count, pairs_checked)``.
    """
    cdef Py_ssize_t nf = images.shape[0], nx = images.shape[1]
    cdef Py_ssize_t x1, x2, f
    cdef long long cnt, best = 0, pairs = 0
    for x1 in range(nx):
        for x2 in range(x1 + 1, nx):
            cnt = 0
            for f in range(nf):
                if images[f, x1] == images[f, x2]:
                    cnt += 1
            if cnt > best:
                best = cnt
            pairs += 1
    return best, pairs
