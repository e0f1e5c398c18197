"""Exponential factorizations built from unitriangular ones.

For a unipotent ``U = I + N`` the logarithm and exponential are finite sums,
so everything here is exact over any ring containing Q.  Grouping folds an
alternating product ``U_1 U_2 ... U_t`` into ``floor(t/2) + 1`` unipotent
pieces, each a same-side product or a conjugate of one::

    U1 U2 U3       = (U1 U2 U1^-1) (U1 U3)
    U1 U2 U3 U4 U5 = (U1 U2 U1^-1) (U1 U3 U4 U3^-1 U1^-1) (U1 U3 U5)

and takes the logarithm of each piece.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import ParseError, PreconditionError
from .matrix import (Matrix, det, is_sp_lie_algebra, is_symplectic, mat_inverse,
                     matrix_from_json, matrix_to_json, nullspace)
from .ring import QI, RatFnField, Scalar
from .sl2fact import UnitriFactorization


def _coef(ring, q: Fraction):
    return ring.coerce(Scalar(q))


def _nil_part(U: Matrix) -> Matrix:
    if not U.is_square():
        raise PreconditionError(f"expected a square matrix, got {U.shape}")
    return U - Matrix.identity(U.rows, U.ring)


def _powers(N: Matrix):
    """``[N, N^2, ...]`` up to the last nonzero power; raises if N is not nilpotent."""
    out = []
    P = N
    for _ in range(N.rows):
        if P.is_zero():
            return out
        out.append(P)
        P = P @ N
    if not P.is_zero():
        raise PreconditionError("matrix is not nilpotent")
    return out


def is_nilpotent(N: Matrix) -> bool:
    try:
        _powers(N)
    except PreconditionError:
        return False
    return True


def nilpotent_log(U: Matrix) -> Matrix:
    """``log U = sum_k (-1)^(k+1) N^k / k`` with ``N = U - I`` nilpotent."""
    N = _nil_part(U)
    try:
        pw = _powers(N)
    except PreconditionError:
        raise PreconditionError("matrix is not unipotent") from None
    out = Matrix.zeros(U.rows, U.rows, U.ring)
    for k, P in enumerate(pw, 1):
        out = out + P.scale(_coef(U.ring, Fraction((-1) ** (k + 1), k)))
    return out


def nilpotent_exp(N: Matrix) -> Matrix:
    if not N.is_square():
        raise PreconditionError(f"expected a square matrix, got {N.shape}")
    out = Matrix.identity(N.rows, N.ring)
    fact = 1
    for k, P in enumerate(_powers(N), 1):
        fact *= k
        out = out + P.scale(_coef(N.ring, Fraction(1, fact)))
    return out


def unipotent_inverse(U: Matrix) -> Matrix:
    """``(I + N)^-1 = sum_k (-N)^k``; valid over any ring."""
    N = _nil_part(U)
    out = Matrix.identity(U.rows, U.ring)
    for k, P in enumerate(_powers(N), 1):
        out = out + (P if k % 2 == 0 else -P)
    return out


def conjugate_exponent(B: Matrix, N: Matrix) -> Matrix:
    """``B N B^-1``, the exponent of ``B exp(N) B^-1``."""
    if not is_nilpotent(N):
        raise PreconditionError("exponent is not nilpotent")
    return B @ N @ mat_inverse(B)


# --------------------------------------------------------------------------
# grouping
# --------------------------------------------------------------------------


@dataclass
class ExpFactorization:
    """``target == exp(exponents[0]) @ exp(exponents[1]) @ ...``."""

    exponents: list
    target: Matrix

    @property
    def count(self) -> int:
        return len(self.exponents)

    def product(self) -> Matrix:
        P = Matrix.identity(self.target.rows, self.target.ring)
        for N in self.exponents:
            P = P @ nilpotent_exp(N)
        return P

    def checks(self, symplectic: bool | None = None) -> dict:
        out = {
            "nilpotent": all(is_nilpotent(N) for N in self.exponents),
        }
        out["product"] = out["nilpotent"] and self.product() == self.target
        if symplectic is None:
            sq = self.target.rows % 2 == 0 and self.target.rows > 0
            symplectic = sq and is_symplectic(self.target)
        if symplectic:
            out["sp_lie_algebra"] = all(is_sp_lie_algebra(N) for N in self.exponents)
        return out

    def verify(self, symplectic: bool | None = None) -> bool:
        return all(self.checks(symplectic).values())


def group_exponentials(fact: UnitriFactorization, trim: bool = False) -> ExpFactorization:
    """``floor(t/2) + 1`` exponents (one for t = 1) whose exponentials multiply to the factors.

    Odd-position factors accumulate in a prefix P; each even-position factor
    U contributes ``log(P U P^-1)`` and the final P contributes ``log P``.
    With ``trim=True`` zero exponents are dropped.
    """
    Us = fact.matrices
    if not Us:
        raise PreconditionError("need at least one factor")
    sides = fact.sides
    if any(a == b for a, b in zip(sides, sides[1:])):
        raise PreconditionError("factors do not alternate between lower and upper")
    ring = Us[0].ring
    P = Us[0]
    Pinv = unipotent_inverse(P)
    exps = []
    for k in range(1, len(Us)):
        U = Us[k]
        if k % 2 == 1:
            exps.append(P @ nilpotent_log(U) @ Pinv)
        else:
            P = P @ U
            Pinv = unipotent_inverse(U) @ Pinv
    exps.append(nilpotent_log(P))
    if trim:
        exps = [N for N in exps if not N.is_zero()]
    target = fact.target if fact.target is not None else fact.product()
    if target.ring != ring:
        target = fact.product()
    return ExpFactorization(exps, target)


def exp_factor_sp(M: Matrix, trim: bool = False) -> ExpFactorization:
    """Three exponents in sp(2n) (before trimming) with ``exp A1 exp A2 exp A3 == M``."""
    from .spfact import unitriangular_factor_sp

    if not is_symplectic(M):
        raise PreconditionError("matrix is not symplectic")
    return group_exponentials(unitriangular_factor_sp(M), trim=trim)


# --------------------------------------------------------------------------
# GL -> SL and the commutant lemma
# --------------------------------------------------------------------------


def gaussian_root(x: Scalar, n: int):
    """An exact n-th root of x in Q(i), or None.  Candidates come from mpmath."""
    if n < 1:
        raise ValueError("root order must be positive")
    if x.is_zero():
        return x
    bits = x.bitsize() + 64
    with mpmath.workdps(max(30, bits // 3 + 10)):
        z = mpmath.mpc(mpmath.mpf(x.re.numerator) / x.re.denominator,
                       mpmath.mpf(x.im.numerator) / x.im.denominator)
        r = mpmath.root(z, n)
        w = mpmath.exp(2j * mpmath.pi / n)
        for k in range(n):
            c = r * w ** k
            # the denominator of a root divides that of x
            bound = x._d
            re = Fraction(str(mpmath.nstr(c.real, mpmath.mp.dps))).limit_denominator(bound)
            im = Fraction(str(mpmath.nstr(c.imag, mpmath.mp.dps))).limit_denominator(bound)
            cand = Scalar(re, im)
            if cand ** n == x:
                return cand
    return None


def gl_to_sl_reduce(M: Matrix, g=None):
    """``(lam, M / lam)`` with ``lam^n == det M``, so ``det(M / lam) == 1``.

    ``g`` is the caller's choice of root; without it one is searched in Q(i).
    """
    if not M.is_square():
        raise PreconditionError(f"expected a square matrix, got {M.shape}")
    if M.ring != QI:
        raise PreconditionError("gl_to_sl_reduce works over Q(i)")
    n = M.rows
    d = det(M)
    if d.is_zero():
        raise PreconditionError("matrix is singular")
    if g is None:
        lam = gaussian_root(d, n)
        if lam is None:
            raise PreconditionError(
                f"det = {QI.format(d)} has no {n}-th root in Q(i); the reduction needs a field extension")
    else:
        lam = QI.coerce(g)
        if lam ** n != d:
            raise PreconditionError(f"{QI.format(lam)}^{n} != det = {QI.format(d)}")
    return lam, M.scale(lam.inverse())


def commutant_blocks(n: int, M_scalar) -> list:
    """Basis of ``{S : S T_n = T_n S}`` over Q(i)(g), ``T_n = diag(M I_{n-2}, [[g, 1], [0, 1]])``.

    Every basis element is checked to be block diagonal (zero n-2 x 2 and
    2 x n-2 corners); the dimension is ``(n-2)^2 + 2``.
    """
    if n < 3:
        raise PreconditionError("commutant_blocks needs n >= 3")
    c = QI.coerce(M_scalar)
    if c.is_zero() or c == QI.one:
        raise PreconditionError("M must differ from 0 and 1")
    F = RatFnField(("g",))
    g = F.parse("g")
    T = Matrix.identity(n, F).scale(F.coerce(c))
    e = list(T.entries)
    e[(n - 2) * n + n - 2] = g
    e[(n - 2) * n + n - 1] = F.one
    e[(n - 1) * n + n - 1] = F.one
    T = Matrix._raw(n, n, F, e)
    # (S T - T S)_{ij} = sum_k S_ik T_kj - T_ik S_kj, unknown S_ab at column a*n + b
    rows = []
    for i in range(n):
        for j in range(n):
            r = [F.zero] * (n * n)
            for k in range(n):
                r[i * n + k] = r[i * n + k] + T[k, j]
                r[k * n + j] = r[k * n + j] - T[i, k]
            rows.append(r)
    basis = [Matrix.from_flat(n, n, v, F) for v in nullspace(Matrix(rows, F))]
    for S in basis:
        if not offdiag_blocks_vanish(S, n - 2):
            raise AssertionError("commutant element with nonzero corner blocks")
    return basis


def offdiag_blocks_vanish(S: Matrix, k: int) -> bool:
    """True iff the k x (n-k) and (n-k) x k corners of S are zero."""
    n = S.rows
    head, tail = list(range(k)), list(range(k, n))
    return S.submatrix(head, tail).is_zero() and S.submatrix(tail, head).is_zero()


# --------------------------------------------------------------------------
# JSON
# --------------------------------------------------------------------------


def exp_to_json(f: ExpFactorization, verified: bool | None = None) -> dict:
    out = {
        "exponents": [matrix_to_json(N) for N in f.exponents],
        "count": f.count,
        "target": matrix_to_json(f.target),
    }
    if verified is not None:
        out["verified"] = verified
    return out


def exp_from_json(obj) -> ExpFactorization:
    try:
        return ExpFactorization([matrix_from_json(N) for N in obj["exponents"]],
                                matrix_from_json(obj["target"]))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed exponential factorization: {exc!r}") from None
