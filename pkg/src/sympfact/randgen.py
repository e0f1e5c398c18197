"""Seeded random inputs shared by the self-test, the test suite and the benchmark."""

from __future__ import annotations

import random
from fractions import Fraction

from .matrix import Matrix, mat_inverse
from .ring import QI, Poly, PolyRing, Scalar
from .sl2fact import L, U
from .sympgen import GenToken, GenWord, eval_word

SP_TOKEN_KINDS = ("sp_short", "sp_long", "sp_levi", "sp_short_lower", "sp_long_lower")


def rng_of(seed=None) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def rand_rational(rng, bound: int = 5, den: int = 4) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, den))


def rand_scalar(rng, bound: int = 5, den: int = 4, nonzero: bool = False) -> Scalar:
    while True:
        s = Scalar(rand_rational(rng, bound, den), rand_rational(rng, bound, den))
        if not (nonzero and s.is_zero()):
            return s


def rand_sl2(rng, bound: int = 10 ** 6) -> Matrix:
    """Random SL2(Q(i)) matrix: a, b, c with numerators and denominators up to ``bound``, d from det = 1."""
    a = rand_scalar(rng, bound, bound, nonzero=True)
    b = rand_scalar(rng, bound, bound)
    c = rand_scalar(rng, bound, bound)
    d = (QI.one + b * c) / a
    return Matrix([[a, b], [c, d]], QI)


def rand_sp_token(rng, n: int, side: str | None = None) -> GenToken:
    while True:
        kind = rng.choice(SP_TOKEN_KINDS)
        if kind in ("sp_long", "sp_long_lower"):
            t = GenToken(kind, rng.randint(1, n), None, rand_scalar(rng))
        elif n < 2:
            continue
        else:
            i, j = rng.sample(range(1, n + 1), 2)
            if kind != "sp_levi" and i > j:
                i, j = j, i
            t = GenToken(kind, i, j, rand_scalar(rng))
        if side is None or t.side == side:
            return t


def rand_sp_word(rng, n: int, length: int = 10, side: str | None = None) -> GenWord:
    return GenWord(n, "sp", tuple(rand_sp_token(rng, n, side) for _ in range(length)))


def rand_sp(rng, n: int, length: int = 10) -> Matrix:
    return eval_word(rand_sp_word(rng, n, length), QI)


def rand_unitri(rng, size: int, side: str) -> Matrix:
    """Dense unitriangular matrix on the given side."""
    e = []
    for i in range(size):
        for j in range(size):
            if i == j:
                e.append(QI.one)
            elif (i < j) == (side == "upper"):
                e.append(rand_scalar(rng))
            else:
                e.append(QI.zero)
    return Matrix.from_flat(size, size, e, QI)


def rand_invertible(rng, size: int) -> Matrix:
    return rand_unitri(rng, size, "lower") @ rand_unitri(rng, size, "upper")


def rand_nilpotent(rng, size: int) -> Matrix:
    """``P S P^-1`` with S strictly upper triangular."""
    S = rand_unitri(rng, size, "upper") - Matrix.identity(size, QI)
    P = rand_invertible(rng, size)
    return P @ S @ mat_inverse(P)


def rand_unipotent(rng, size: int) -> Matrix:
    return Matrix.identity(size, QI) + rand_nilpotent(rng, size)


def rand_chain(rng, t: int, size: int = 3, symplectic: bool = False, start: str = "lower"):
    """``t`` alternating unitriangular factors as (side, matrix) pairs.

    Symplectic chains (size = 2n) use words of same-side tokens, judged in
    the J~ basis.
    """
    sides = [("lower", "upper")[(k + (start == "upper")) % 2] for k in range(t)]
    out = []
    for s in sides:
        if symplectic:
            n = size // 2
            out.append((s, eval_word(rand_sp_word(rng, n, 3, side=s), QI)))
        else:
            out.append((s, rand_unitri(rng, size, s)))
    return out


def rand_poly(rng, degree: int = 3, vars=("z",), bound: int = 5) -> Poly:
    """Univariate polynomial with rational coefficients and degree at most ``degree``."""
    terms = {(k,): Scalar(rand_rational(rng, bound, 3)) for k in range(rng.randint(0, degree) + 1)}
    return Poly(terms, vars)


def rand_poly_sl2_word(rng, max_len: int = 8, degree: int = 3) -> Matrix:
    ring = PolyRing(("z",))
    M = Matrix.identity(2, ring)
    for _ in range(rng.randint(1, max_len)):
        p = rand_poly(rng, degree)
        M = M @ (L(p, ring) if rng.random() < 0.5 else U(p, ring))
    return M


def rand_symmetric(rng, n: int, density: float = 1.0) -> Matrix:
    e = [[QI.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            if rng.random() < density:
                x = rand_scalar(rng, nonzero=True)
                e[i][j] = e[j][i] = x
    return Matrix(e, QI)
