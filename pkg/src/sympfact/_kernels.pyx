# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels for dense matrices over Q(i).

Same algorithm and signatures as :mod:`sympfact._kernels_py`; entries are
Python integers (arbitrary precision), so the gain comes from removing
interpreter dispatch in the triple loop.
"""

from math import gcd

from .ring import Scalar


cdef tuple _scaled(list entries):
    cdef object den = 1
    cdef object d
    cdef Py_ssize_t idx, size = len(entries)
    cdef list re = [None] * size
    cdef list im = [None] * size
    for idx in range(size):
        d = entries[idx]._d
        if d != 1 and den % d:
            den = den // gcd(den, d) * d
    for idx in range(size):
        s = entries[idx]
        d = s._d
        if d == 1:
            re[idx] = s._a * den
            im[idx] = s._b * den
        else:
            f = den // d
            re[idx] = s._a * f
            im[idx] = s._b * f
    return den, re, im


def gauss_matmul(list A, list B, Py_ssize_t m, Py_ssize_t k, Py_ssize_t n):
    """Product of an m x k and a k x n matrix (flat lists of Scalar)."""
    cdef object da, db, den, sr, si, xr, xi, yr, yi
    cdef list ar, ai, br, bi, out, idx_list, xr_list, xi_list
    cdef Py_ssize_t i, j, t, p, q, cnt
    da, ar, ai = _scaled(A)
    db, br, bi = _scaled(B)
    den = da * db
    make = Scalar._make
    out = [None] * (m * n)
    for i in range(m):
        idx_list = []
        xr_list = []
        xi_list = []
        for t in range(k):
            p = i * k + t
            if ar[p] or ai[p]:
                idx_list.append(t)
                xr_list.append(ar[p])
                xi_list.append(ai[p])
        cnt = len(idx_list)
        for j in range(n):
            sr = 0
            si = 0
            for q in range(cnt):
                t = idx_list[q]
                xr = xr_list[q]
                xi = xi_list[q]
                p = t * n + j
                yr = br[p]
                yi = bi[p]
                if yr:
                    sr += xr * yr
                    si += xi * yr
                if yi:
                    sr -= xi * yi
                    si += xr * yi
            out[i * n + j] = make(sr, si, den)
    return out


def gauss_is_identity(list A, Py_ssize_t n):
    """True iff the flat n x n list A is the identity."""
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(n):
            s = A[i * n + j]
            if i == j:
                if not (s._a == 1 and s._b == 0 and s._d == 1):
                    return False
            elif s._a or s._b:
                return False
    return True
