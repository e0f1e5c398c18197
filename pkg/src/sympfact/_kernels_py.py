"""Pure-Python kernels for dense matrices over Q(i).

Matrices are passed as flat row-major lists of :class:`~sympfact.ring.Scalar`.
Each operand is rescaled to a common denominator so the inner loops are plain
integer multiply-adds; one gcd per output entry restores canonical form.
"""

from math import gcd

from .ring import Scalar


def _scaled(entries):
    den = 1
    for s in entries:
        d = s._d
        if d != 1 and den % d:
            den = den // gcd(den, d) * d
    re = []
    im = []
    for s in entries:
        f = den // s._d if s._d != 1 else den
        re.append(s._a * f)
        im.append(s._b * f)
    return den, re, im


def gauss_matmul(A, B, m, k, n):
    """Product of an m x k and a k x n matrix (flat lists of Scalar)."""
    da, ar, ai = _scaled(A)
    db, br, bi = _scaled(B)
    den = da * db
    make = Scalar._make
    # sparse rows of A: list of (t, re, im)
    rows = []
    for i in range(m):
        base = i * k
        rows.append([(t, ar[base + t], ai[base + t]) for t in range(k)
                     if ar[base + t] or ai[base + t]])
    out = []
    for i in range(m):
        row = rows[i]
        for j in range(n):
            sr = 0
            si = 0
            for t, xr, xi in row:
                p = t * n + j
                yr = br[p]
                yi = bi[p]
                if yr:
                    sr += xr * yr
                    si += xi * yr
                if yi:
                    sr -= xi * yi
                    si += xr * yi
            out.append(make(sr, si, den))
    return out


def gauss_is_identity(A, n):
    """True iff the flat n x n list A is the identity."""
    for i in range(n):
        for j in range(n):
            s = A[i * n + j]
            if i == j:
                if not (s._a == 1 and s._b == 0 and s._d == 1):
                    return False
            elif s._a or s._b:
                return False
    return True
