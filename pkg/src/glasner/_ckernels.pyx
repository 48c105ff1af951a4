# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``."""

import numpy as np

from libc.math cimport cos, sin, sqrt, M_PI
from libc.stdint cimport int64_t

MAX_MODULUS = 3_037_000_499


cdef inline int64_t _gcd(int64_t a, int64_t b) nogil:
    cdef int64_t t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef inline int64_t _mod(int64_t a, int64_t m) nogil:
    cdef int64_t r = a % m
    if r < 0:
        r += m
    return r


def sieve_primes(limit):
    cdef Py_ssize_t n = int(limit)
    if n < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=np.uint8)
    cdef unsigned char[:] f = flags
    cdef Py_ssize_t i, j
    f[0] = 0
    f[1] = 0
    with nogil:
        j = 4
        while j <= n:
            f[j] = 0
            j += 2
        i = 3
        while i * i <= n:
            if f[i]:
                j = i * i
                while j <= n:
                    f[j] = 0
                    j += 2 * i
            i += 2
    return np.flatnonzero(flags).astype(np.int64)


def poly_residues(coeffs, xs, modulus):
    cdef int64_t mod = int(modulus)
    c_arr = np.mod(np.asarray(coeffs, dtype=np.int64), mod)
    x_arr = np.asarray(xs, dtype=np.int64)
    cdef const int64_t[:] c = c_arr
    cdef const int64_t[:] x = x_arr
    out = np.empty(x_arr.shape[0], dtype=np.int64)
    cdef int64_t[:] o = out
    cdef Py_ssize_t i, j, nc = c.shape[0]
    cdef int64_t acc, xv
    with nogil:
        for i in range(x.shape[0]):
            xv = _mod(x[i], mod)
            acc = 0
            for j in range(nc - 1, -1, -1):
                acc = (acc * xv) % mod
                acc = (acc + c[j]) % mod
            o[i] = acc
    return out


def phase_sum(residues, modulus, w):
    cdef int64_t mod = int(modulus)
    cdef int64_t wm = int(w) % int(modulus)
    r_arr = np.asarray(residues, dtype=np.int64)
    cdef const int64_t[:] r = r_arr
    cdef double re = 0.0, im = 0.0, ang
    cdef Py_ssize_t i
    cdef double inv = 1.0 / <double>mod
    with nogil:
        for i in range(r.shape[0]):
            ang = 2.0 * M_PI * (<double>((_mod(r[i], mod) * wm) % mod) / <double>mod)
            re += cos(ang)
            im += sin(ang)
    return complex(re, im)


def circle_radius(coords):
    x_arr = np.sort(np.asarray(coords, dtype=np.float64))
    cdef const double[:] x = x_arr
    cdef Py_ssize_t n = x.shape[0], i, best_i = n - 1
    cdef double best = x[0] + 1.0 - x[n - 1], g
    with nogil:
        for i in range(n - 1):
            g = x[i + 1] - x[i]
            if g > best or (g == best and i < best_i):
                best = g
                best_i = i
    mid = x[best_i] + best / 2.0
    if mid >= 1.0:
        mid -= 1.0
    return best / 2.0, mid


def grid_max_min_dist(points, G, euclidean):
    pts_arr = np.ascontiguousarray(points, dtype=np.float64)
    cdef const double[:, :] pts = pts_arr
    cdef Py_ssize_t k = pts.shape[0], d = pts.shape[1]
    cdef int64_t g = int(G)
    cdef int64_t total = int(G) ** int(d)
    cdef bint euc = bool(euclidean)
    counter_arr = np.zeros(d, dtype=np.int64)
    cdef int64_t[:] counter = counter_arr
    cell_arr = np.zeros(d, dtype=np.float64)
    cdef double[:] cell = cell_arr
    cdef double best = -1.0, mn, dist, diff, acc
    cdef int64_t best_idx = 0, idx
    cdef Py_ssize_t p, ax
    with nogil:
        for idx in range(total):
            mn = 1e300
            for p in range(k):
                acc = 0.0
                for ax in range(d):
                    diff = cell[ax] - pts[p, ax]
                    if diff < 0:
                        diff = -diff
                    if 1.0 - diff < diff:
                        diff = 1.0 - diff
                    if euc:
                        acc += diff * diff
                    elif diff > acc:
                        acc = diff
                dist = sqrt(acc) if euc else acc
                if dist < mn:
                    mn = dist
                    if mn <= best:
                        break
            if mn > best:
                best = mn
                best_idx = idx
            # odometer increment, last axis fastest (C order)
            ax = d - 1
            while ax >= 0:
                counter[ax] += 1
                if counter[ax] < g:
                    cell[ax] = <double>counter[ax] / <double>g
                    break
                counter[ax] = 0
                cell[ax] = 0.0
                ax -= 1
    return best, best_idx


def pair_denominators(A, D):
    A_arr = np.ascontiguousarray(A, dtype=np.int64)
    D_arr = np.ascontiguousarray(D, dtype=np.int64)
    cdef const int64_t[:, :] a = A_arr
    cdef const int64_t[:] den = D_arr
    cdef Py_ssize_t k = a.shape[0], m = a.shape[1], i, j, c, pos = 0
    out = np.empty(k * (k - 1) // 2, dtype=np.int64)
    cdef int64_t[:] o = out
    cdef int64_t L, gg
    with nogil:
        for i in range(k):
            for j in range(i + 1, k):
                L = den[i] * den[j]
                gg = L
                for c in range(m):
                    gg = _gcd(gg, a[i, c] * den[j] - a[j, c] * den[i])
                o[pos] = L // gg
                pos += 1
    return out


def image_residues(M, A, D):
    M_arr = np.ascontiguousarray(M, dtype=np.int64)
    A_arr = np.ascontiguousarray(A, dtype=np.int64)
    D_arr = np.ascontiguousarray(D, dtype=np.int64)
    cdef const int64_t[:, :] mat = M_arr
    cdef const int64_t[:, :] a = A_arr
    cdef const int64_t[:] den = D_arr
    cdef Py_ssize_t n = mat.shape[0], m = mat.shape[1], k = a.shape[0]
    cdef Py_ssize_t p, i, j
    out = np.empty((k, n), dtype=np.int64)
    cdef int64_t[:, :] o = out
    cdef int64_t acc, dk
    with nogil:
        for p in range(k):
            dk = den[p]
            for i in range(n):
                acc = 0
                for j in range(m):
                    acc = (acc + (_mod(mat[i, j], dk) * a[p, j]) % dk) % dk
                o[p, i] = acc
    return out
