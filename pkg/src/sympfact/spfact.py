"""Symplectic factorization engine.

Pipeline for ``M`` in Sp(2n) over a field::

    symplectic_gauss        M  -> word of elementary symplectic tokens
    to_fundamental_word        -> word of root elements x_a(r), a in +-Pi
    tavgen_absorb              -> four alternating unitriangular factors

By default the first step runs piece by piece: M is split into a short
alternating product of elements of E(Delta_1) and E(Delta_l), and each piece is
eliminated inside its own subsystem (see :func:`piecewise_fundamental_word`).

Roots of C_n live in Z^n: ``+-e_i +- e_j`` (short) and ``+-2e_i`` (long), with
simple roots ``a_k = e_k - e_{k+1}`` (k < n) and ``a_n = 2e_n``.  Roots of
A_{m-1} are ``e_i - e_j`` in Z^m.  Array index p of a 2n x 2n matrix has weight
``e_{p+1}`` for p < n and ``-e_{p-n+1}`` otherwise, so the nilpotent part of
``x_a(r)`` sits exactly at positions (p, q) with ``wt(p) - wt(q) = a``.

Absorption keeps a state ``V1 V2 V3 V4`` (lower, upper, lower, upper) and
multiplies generators in from the left.  A run of generators lying in a
rank-(l-1) subsystem Delta is absorbed by splitting every factor as
``V_k = D_k S_k`` (D_k in the Delta block, S_k in the unipotent radical),
moving all D_k to the left (the radical is normalized by E(Delta)), solving
the smaller problem for ``g D1 D2 D3 D4`` recursively, and conjugating the
radical parts back into place.  The smaller problem is solved by
:func:`direct_split4`, which depends on its input only; history-dependent
refactoring makes coefficient sizes compound from one step to the next.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product as _iproduct

from .errors import (ConsistencyError, DimensionError, PreconditionError,
                     UnsupportedRingError)
from .matrix import (Matrix, det, is_symplectic, is_unitriangular, mat_inverse,
                     symplectic_inverse)
from .ring import QI
from .sl2fact import L, U, UnitriFactorization, sl2_params_field
from .sympgen import (GenToken, GenWord, apply_token_left, basis_change_to_Jtilde, eval_token,
                      expand_type_i_to_elementary, expand_type_ii_to_elementary,
                      sl_transvection, sp_levi, sp_long, sp_long_lower, sp_short,
                      sp_short_lower)

SIDES = ("lower", "upper", "lower", "upper")


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _neg(a):
    return tuple(-x for x in a)


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


# --------------------------------------------------------------------------
# root systems
# --------------------------------------------------------------------------


class _RootSystem:
    """Shared machinery; subclasses fill in roots, weights and realizations."""

    kind = ""
    rank = 0
    size = 0
    roots: list
    fundamental: list
    weights: list

    def coeff(self, root) -> tuple:
        raise NotImplementedError

    def token(self, root, r) -> GenToken:
        raise NotImplementedError

    def root_of_token(self, t: GenToken):
        raise NotImplementedError

    def subsystem(self, r: int) -> "_Sub":
        raise NotImplementedError

    # derived --------------------------------------------------------------

    def k(self, root, i: int) -> int:
        """Coefficient of the simple root a_i (1-based) in ``root``."""
        return self.coeff(root)[i - 1]

    def is_positive(self, root) -> bool:
        return any(c > 0 for c in self.coeff(root))

    def height(self, root) -> int:
        return sum(self.coeff(root))

    def pairing(self, beta, alpha) -> int:
        """``<beta, alpha^vee> = 2 (beta . alpha) / (alpha . alpha)``."""
        return 2 * _dot(beta, alpha) // _dot(alpha, alpha)

    def reflect(self, beta, alpha):
        c = self.pairing(beta, alpha)
        return tuple(b - c * a for b, a in zip(beta, alpha))

    @cached_property
    def positive(self):
        return [a for a in self.roots if self.is_positive(a)]

    @cached_property
    def _fund_set(self):
        return set(self.fundamental) | {_neg(a) for a in self.fundamental}

    def is_fundamental(self, root) -> bool:
        """True for roots in +-Pi."""
        return tuple(root) in self._fund_set

    def delta(self, r: int):
        """Roots with k_r = 0."""
        return [a for a in self.roots if self.k(a, r) == 0]

    def sigma(self, r: int, sign: int = 1):
        return [a for a in self.roots
                if self.k(a, r) != 0 and self.is_positive(a) == (sign > 0)]

    def element(self, root, r, ring=QI) -> Matrix:
        return eval_token(self.token(root, r), self.n_tok, ring)

    def nilpotent(self, root, ring=QI) -> Matrix:
        I = Matrix.identity(self.size, ring)
        return self.element(root, 1, ring) - I

    def support(self, M: Matrix):
        """Root labels of the nonzero off-diagonal entries; None on a non-root position."""
        out = set()
        w = self.weights
        n = self.size
        roots = self._root_set
        for p in range(n):
            for q in range(n):
                if p != q and not M.entries[p * n + q].is_zero():
                    d = _sub(w[p], w[q])
                    if d not in roots:
                        return None
                    out.add(d)
        return out

    @cached_property
    def _root_set(self):
        return set(self.roots)

    def choose_subsystem(self, root) -> int:
        """Rank-1-smaller subsystem containing ``root``: Delta_l unless that fails."""
        if self.k(root, self.rank) == 0:
            return self.rank
        if self.k(root, 1) == 0:
            return 1
        raise PreconditionError(f"root {root} lies in neither Delta_1 nor Delta_{self.rank}")


class RootSystemCn(_RootSystem):
    """Root datum of C_n realized in Sp(2n) with the J form."""

    kind = "C"

    def __init__(self, n: int):
        if n < 1:
            raise PreconditionError("C_n needs n >= 1")
        self.rank = self.n = self.n_tok = n
        self.size = 2 * n
        roots = []
        for i in range(n):
            e = [0] * n
            e[i] = 2
            roots += [tuple(e), _neg(tuple(e))]
        for i in range(n):
            for j in range(i + 1, n):
                for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                    e = [0] * n
                    e[i], e[j] = si, sj
                    roots.append(tuple(e))
        self.roots = roots
        fund = []
        for k in range(n - 1):
            e = [0] * n
            e[k], e[k + 1] = 1, -1
            fund.append(tuple(e))
        e = [0] * n
        e[n - 1] = 2
        fund.append(tuple(e))
        self.fundamental = fund
        self.weights = []
        for p in range(2 * n):
            e = [0] * n
            if p < n:
                e[p] = 1
            else:
                e[p - n] = -1
            self.weights.append(tuple(e))

    def __repr__(self):
        return f"RootSystemCn({self.n})"

    def coeff(self, root):
        n = self.n
        out, s = [], 0
        for i in range(n):
            s += root[i]
            out.append(s)
        out[-1] //= 2
        return tuple(out)

    def token(self, root, r) -> GenToken:
        nz = [(i, x) for i, x in enumerate(root) if x]
        if len(nz) == 1:
            (i, x), = nz
            return sp_long(i + 1, r) if x > 0 else sp_long_lower(i + 1, r)
        (i, x), (j, y) = nz
        if x > 0 and y < 0:
            return sp_levi(i + 1, j + 1, r)
        if x < 0 and y > 0:
            return sp_levi(j + 1, i + 1, r)
        if x > 0:
            return sp_short(i + 1, j + 1, r)
        return sp_short_lower(i + 1, j + 1, r)

    def root_of_token(self, t: GenToken):
        n = self.n
        for idx in (t.i, t.j):
            if idx is not None and not 1 <= idx <= n:
                raise PreconditionError(f"token index {idx} outside 1..{n}")
        e = [0] * n
        i = t.i - 1
        j = None if t.j is None else t.j - 1
        if t.kind == "sp_long":
            e[i] = 2
        elif t.kind == "sp_long_lower":
            e[i] = -2
        elif t.kind == "sp_levi":
            e[i], e[j] = 1, -1
        elif t.kind == "sp_short":
            e[i], e[j] = 1, 1
        elif t.kind == "sp_short_lower":
            e[i], e[j] = -1, -1
        else:
            raise PreconditionError(f"{t.kind} is not a root element of C_{n}")
        return tuple(e)

    def subsystem(self, r):
        n = self.n
        if n < 2:
            raise PreconditionError("C_1 has no proper subsystem")
        if r == n:
            return _Sub(self, r, RootSystemA(n), list(range(n)), gl_block=True,
                        drop=None)
        if r == 1:
            idx = list(range(1, n)) + list(range(n + 1, 2 * n))
            return _Sub(self, r, RootSystemCn(n - 1), idx, drop=0)
        raise PreconditionError("only Delta_1 and Delta_n are used")


class RootSystemA(_RootSystem):
    """Root datum of A_{m-1} realized in SL(m)."""

    kind = "A"

    def __init__(self, m: int):
        if m < 2:
            raise PreconditionError("A_{m-1} needs m >= 2")
        self.m = self.size = self.n_tok = m
        self.rank = m - 1
        roots = []
        for i in range(m):
            for j in range(m):
                if i != j:
                    e = [0] * m
                    e[i], e[j] = 1, -1
                    roots.append(tuple(e))
        self.roots = roots
        fund = []
        for k in range(m - 1):
            e = [0] * m
            e[k], e[k + 1] = 1, -1
            fund.append(tuple(e))
        self.fundamental = fund
        self.weights = [tuple(1 if q == p else 0 for q in range(m)) for p in range(m)]

    def __repr__(self):
        return f"RootSystemA({self.m - 1})"

    def coeff(self, root):
        out, s = [], 0
        for i in range(self.m - 1):
            s += root[i]
            out.append(s)
        return tuple(out)

    def token(self, root, r):
        i = next(k for k, x in enumerate(root) if x > 0)
        j = next(k for k, x in enumerate(root) if x < 0)
        return sl_transvection(i + 1, j + 1, r)

    def root_of_token(self, t):
        if t.kind != "sl_transvection":
            raise PreconditionError(f"{t.kind} is not a root element of A_{self.rank}")
        e = [0] * self.m
        e[t.i - 1], e[t.j - 1] = 1, -1
        return tuple(e)

    def subsystem(self, r):
        m = self.m
        if m < 3:
            raise PreconditionError("A_1 has no proper subsystem")
        if r == m - 1:
            return _Sub(self, r, RootSystemA(m - 1), list(range(m - 1)), drop=m - 1)
        if r == 1:
            return _Sub(self, r, RootSystemA(m - 1), list(range(1, m)), drop=0)
        raise PreconditionError("only Delta_1 and Delta_l are used")


def build_Cn(n: int) -> RootSystemCn:
    return RootSystemCn(n)


@dataclass
class _Sub:
    """A rank-1-smaller subsystem Delta_r and its block embedding."""

    parent: _RootSystem
    r: int
    child: _RootSystem
    idx: list
    drop: int | None = None
    gl_block: bool = False

    def restrict(self, M: Matrix) -> Matrix:
        return M.submatrix(self.idx, self.idx)

    def embed(self, A: Matrix) -> Matrix:
        if self.gl_block:
            n = A.rows
            O = Matrix.zeros(n, n, A.ring)
            return Matrix.block([[A, O], [O, mat_inverse(A).T]], A.ring)
        return A.embed(self.parent.size, self.idx)

    def root_down(self, root):
        if self.drop is None:
            return tuple(root)
        return tuple(x for k, x in enumerate(root) if k != self.drop)

    def root_up(self, root):
        if self.drop is None:
            return tuple(root)
        out = list(root)
        out.insert(self.drop, 0)
        return tuple(out)


# --------------------------------------------------------------------------
# root elements and fundamental words
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RootElement:
    root: tuple
    param: object
    rs: _RootSystem = field(compare=False, repr=False, default=None)

    @property
    def token(self) -> GenToken:
        return self.rs.token(self.root, self.param)

    def realization(self, ring=QI) -> Matrix:
        return self.rs.element(self.root, self.param, ring)


def _weyl(alpha):
    """Token list for ``n_a = x_a(1) x_{-a}(-1) x_a(1)`` and its inverse."""
    na = [(alpha, 1), (_neg(alpha), -1), (alpha, 1)]
    na_inv = [(alpha, -1), (_neg(alpha), 1), (alpha, -1)]
    return na, na_inv


class _Rewriter:
    """Weyl-conjugation rewriting of x_b(r) into fundamental root elements."""

    def __init__(self, rs: _RootSystem):
        self.rs = rs
        self.cache = {}

    def step(self, beta):
        """(alpha, beta', c) with ``n_a X_{beta'} n_a^-1 = c X_beta``."""
        if beta in self.cache:
            return self.cache[beta]
        rs = self.rs
        pos = rs.is_positive(beta)
        best = None
        for a in rs.fundamental:
            p = rs.pairing(beta, a)
            if (p > 0) if pos else (p < 0):
                b2 = rs.reflect(beta, a)
                if best is None or abs(rs.height(b2)) < abs(rs.height(best[1])):
                    best = (a, b2)
        if best is None:
            raise ConsistencyError(f"no simple reflection shortens {beta}")
        a, b2 = best
        na, na_inv = _weyl(a)
        n_mat = _eval_pairs(rs, na)
        n_inv = _eval_pairs(rs, na_inv)
        lhs = n_mat @ rs.nilpotent(b2) @ n_inv
        X = rs.nilpotent(beta)
        c = None
        for x, y in zip(lhs.entries, X.entries):
            if not y.is_zero():
                c = x / y
                break
        if c is None or lhs != X.scale(c):
            raise ConsistencyError(f"Weyl conjugate of root {b2} is not a multiple of {beta}")
        self.cache[beta] = (a, b2, c)
        return self.cache[beta]

    def rewrite(self, beta, r):
        if self.rs.is_fundamental(beta):
            return [(beta, r)]
        a, b2, c = self.step(beta)
        na, na_inv = _weyl(a)
        return na + self.rewrite(b2, r / c if not isinstance(r, int) else QI.coerce(r) / c) + na_inv


def _eval_pairs(rs, pairs, ring=QI) -> Matrix:
    size = rs.size
    e = list(Matrix.identity(size, ring).entries)
    for root, r in reversed(pairs):
        apply_token_left(e, size, rs.token(root, r), rs.n_tok, ring)
    return Matrix._raw(size, size, ring, e)


def merge_pairs(pairs):
    """Combine adjacent equal roots, dropping zero parameters (cascading)."""
    out = []
    for root, r in pairs:
        if _is_zero(r):
            continue
        if out and out[-1][0] == root:
            s = out[-1][1] + r
            out.pop()
            if not _is_zero(s):
                out.append((root, s))
        else:
            out.append((root, r))
    return out


def _is_zero(r):
    return r == 0 if isinstance(r, int) else r.is_zero()


def to_fundamental_word(w: GenWord, rs: _RootSystem | None = None) -> list:
    """Root-element word over +-Pi with the same evaluation as ``w``."""
    if rs is None:
        rs = build_Cn(w.n) if w.group == "sp" else RootSystemA(w.n)
    if rs.n_tok != w.n:
        raise DimensionError(f"word has n={w.n}, root system has rank data n={rs.n_tok}")
    rw = _Rewriter(rs)
    pairs = []
    for t in w.tokens:
        pairs += rw.rewrite(rs.root_of_token(t), t.r)
    return [RootElement(root, r, rs) for root, r in merge_pairs(pairs)]


def eval_root_word(word, rs=None, ring=QI) -> Matrix:
    if rs is None:
        if not word:
            raise PreconditionError("empty word needs an explicit root system")
        rs = word[0].rs
    return _eval_pairs(rs, [(e.root, e.param) for e in word], ring)


# --------------------------------------------------------------------------
# elimination over a field
# --------------------------------------------------------------------------


def sl_elementary_word(A: Matrix) -> GenWord:
    """Transvection word for A in SL(n) over a field (row reduction plus 2x2 diagonal pieces)."""
    n = A.rows
    ring = A.ring
    if not ring.is_field:
        raise UnsupportedRingError("transvection elimination needs a field")
    if det(A) != ring.one:
        raise PreconditionError("matrix is not in SL(n)")
    e = [list(A.row(i)) for i in range(n)]
    ops = []    # left multiplications in order of application

    def addrow(i, j, c):       # row i += c * row j
        ops.append(sl_transvection(i + 1, j + 1, c))
        e[i] = [x + c * y for x, y in zip(e[i], e[j])]

    for j in range(n):
        if e[j][j].is_zero():
            i = next(i for i in range(j + 1, n) if not e[i][j].is_zero())
            addrow(j, i, ring.one)
        piv = e[j][j]
        for i in range(n):
            if i != j and not e[i][j].is_zero():
                addrow(i, j, -(e[i][j] / piv))
    toks = [t.inverse() for t in ops]
    # diag(d_1..d_n) = prod_k diag_(k,k+1)(c_k, 1/c_k), c_k = d_1...d_k
    c = ring.one
    for k in range(n - 1):
        c = c * e[k][k]
        if c == ring.one:
            continue
        g = sl2_params_field(Matrix([[c, 0], [0, c.inverse()]], ring))
        for side, x in zip(SIDES, g):
            if not x.is_zero():
                toks.append(sl_transvection(k + 2, k + 1, x) if side == "lower"
                            else sl_transvection(k + 1, k + 2, x))
    return GenWord(n, "sl", tuple(toks))


def _find_transversal(A: Matrix, C: Matrix):
    """A 0/1 diagonal Y with ``A + Y C`` invertible (exists for symplectic [[A, B], [C, D]])."""
    n = A.rows
    ring = A.ring
    for k in range(n + 1):
        for eps in _iproduct((0, 1), repeat=n):
            if sum(eps) != k:
                continue
            Y = Matrix.diag([ring.one if x else ring.zero for x in eps], ring)
            Ap = A + Y @ C
            if not det(Ap).is_zero():
                return Y, Ap
    raise ConsistencyError("no transversal diagonal found; input is not symplectic")


def gl_block_word(A: Matrix) -> list:
    """Tokens for ``diag(A, A^-T)`` with A in GL(n)."""
    n = A.rows
    ring = A.ring
    d = det(A)
    toks = []
    if d != ring.one:
        scale = [ring.one] * (n - 1) + [d.inverse()]
        A1 = A @ Matrix.diag(scale, ring)
    else:
        A1 = A
    toks += [sp_levi(t.i, t.j, t.r) for t in sl_elementary_word(A1).tokens]
    if d != ring.one:
        g = sl2_params_field(Matrix([[d, 0], [0, d.inverse()]], ring))
        for side, x in zip(SIDES, g):
            if not x.is_zero():
                toks.append(sp_long_lower(n, x) if side == "lower" else sp_long(n, x))
    return toks


def symplectic_gauss(M: Matrix, F=None) -> GenWord:
    """Elementary symplectic word with ``eval_word(w) == M``.

    With ``Y`` a 0/1 diagonal making ``A' = A + Y C`` invertible::

        M = [[I, -Y], [0, I]] [[I, 0], [C A'^-1, I]] diag(A', A'^-T) [[I, A'^-1 B'], [0, I]]

    The outer blocks expand into sp_long/sp_short tokens, the middle one into
    sp_levi tokens plus one long-root SL2 piece for ``det A'``.
    """
    if not M.ring.is_field:
        raise UnsupportedRingError("symplectic_gauss needs a field")
    if M.rows != M.cols or M.rows % 2:
        raise DimensionError(f"need a 2n x 2n matrix, got {M.shape}")
    if not is_symplectic(M, F):
        raise PreconditionError("matrix is not symplectic")
    n = M.rows // 2
    if M.is_identity():
        return GenWord(n, "sp", ())
    h, t = list(range(n)), list(range(n, 2 * n))
    A, B = M.submatrix(h, h), M.submatrix(h, t)
    C, D = M.submatrix(t, h), M.submatrix(t, t)
    Y, Ap = _find_transversal(A, C)
    Bp = B + Y @ D
    Apinv = mat_inverse(Ap)
    X = C @ Apinv
    Z = Apinv @ Bp
    if not (X.is_symmetric() and Z.is_symmetric()):
        raise ConsistencyError("Gauss blocks are not symmetric")
    toks = list(expand_type_i_to_elementary(-Y).tokens)
    toks += expand_type_ii_to_elementary(X).tokens
    toks += gl_block_word(Ap)
    toks += expand_type_i_to_elementary(Z).tokens
    return GenWord(n, "sp", tuple(toks))


# --------------------------------------------------------------------------
# Levi split and absorption
# --------------------------------------------------------------------------


def _inverse(rs, M):
    return symplectic_inverse(M) if rs.kind == "C" else mat_inverse(M)


def _support_ok(rs, M, allowed: set) -> bool:
    n = rs.size
    w = rs.weights
    one = M.ring.one
    e = M.entries
    for p in range(n):
        for q in range(n):
            x = e[p * n + q]
            if p == q:
                if x != one:
                    return False
            elif not x.is_zero() and _sub(w[p], w[q]) not in allowed:
                return False
    return True


def levi_split(V: Matrix, r: int, rs: _RootSystem, sign: int | None = None, check: bool = True):
    """``V = V_D V_S`` with V_D in the Delta_r block and V_S in E(Sigma_r^+-)."""
    sub = rs.subsystem(r)
    VD = sub.embed(sub.restrict(V))
    VS = _inverse(rs, VD) @ V
    if check:
        if sign is None:
            sup = rs.support(V)
            if sup is None:
                raise ConsistencyError("input is not supported on roots")
            signs = {rs.is_positive(a) for a in sup}
            if len(signs) > 1:
                raise ConsistencyError("input mixes positive and negative roots")
            sign = 1 if not signs or signs.pop() else -1
        if not _support_ok(rs, VS, _sigma_set(rs, r, sign)):
            raise ConsistencyError(f"radical part escapes Sigma_{r}")
    return VD, VS


_SIGMA_CACHE = {}


def _sigma_set(rs, r, sign):
    key = (rs.kind, rs.size, r, sign)
    if key not in _SIGMA_CACHE:
        _SIGMA_CACHE[key] = set(rs.sigma(r, sign))
    return _SIGMA_CACHE[key]


@dataclass
class AbsorptionState:
    """Four unipotent factors (lower, upper, lower, upper) and their running product."""

    rs: _RootSystem
    factors: list
    sides: tuple = SIDES

    @classmethod
    def identity(cls, rs, ring=QI):
        I = Matrix.identity(rs.size, ring)
        return cls(rs, [I] * len(SIDES))

    def product(self) -> Matrix:
        P = self.factors[0]
        for V in self.factors[1:]:
            P = P @ V
        return P

    def supports_ok(self) -> bool:
        pos = set(self.rs.positive)
        neg = set(self.rs.roots) - pos
        return all(_support_ok(self.rs, V, neg if s == "lower" else pos)
                   for s, V in zip(self.sides, self.factors))

    def bitsize(self) -> int:
        return max(V.bitsize() for V in self.factors)


# --------------------------------------------------------------------------
# short alternating decompositions  h = p_1 p_2 ... p_k,  p_i in E(Delta_{r_i})
# --------------------------------------------------------------------------


def _vec_to_e1(v, ring):
    """G in SL(k), k >= 2, with ``G v = e_1`` for a nonzero vector v."""
    k = len(v)
    G = [list(Matrix.identity(k, ring).row(i)) for i in range(k)]
    w = list(v)

    def addrow(i, j, c):
        G[i] = [a + c * b for a, b in zip(G[i], G[j])]
        w[i] = w[i] + c * w[j]

    if w[0].is_zero():
        p = next(i for i in range(1, k) if not w[i].is_zero())
        addrow(0, p, ring.one)
    for j in range(1, k):
        if not w[j].is_zero():
            addrow(j, 0, -(w[j] / w[0]))
    d = w[0]
    if d != ring.one:
        G[0] = [a / d for a in G[0]]
        G[1] = [a * d for a in G[1]]
    return Matrix(G, ring)


def _sp_vec_to(v, target, ring):
    """G in Sp(2k) with ``G v = e_target`` (target 0: first top, k: first bottom)."""
    k = len(v) // 2
    size = 2 * k
    G = [list(Matrix.identity(size, ring).row(i)) for i in range(size)]
    w = list(v)

    def addrow(i, j, c):
        G[i] = [a + c * b for a, b in zip(G[i], G[j])]
        w[i] = w[i] + c * w[j]

    if all(w[i].is_zero() for i in range(k)):
        j = next(j for j in range(k) if not w[k + j].is_zero())
        addrow(j, k + j, ring.one)                 # x_{2e_j}(1)
    for j in range(k):
        if w[k + j].is_zero():
            continue
        if w[j].is_zero():
            addrow(j, k + j, ring.one)
        addrow(k + j, j, -(w[k + j] / w[j]))       # x_{-2e_j}
    top = Matrix(G, ring)
    x = w[:k]
    A = _vec_to_e1(x, ring) if k >= 2 else Matrix([[x[0].inverse()]], ring)
    O = Matrix.zeros(k, k, ring)
    Gm = Matrix.block([[A, O], [O, mat_inverse(A).T]], ring) @ top
    if target == k:
        # e_1 -> e_{-1} on the (1, -1) plane
        Wl = Matrix.identity(size, ring).entries
        Wl = list(Wl)
        Wl[0], Wl[k] = ring.zero, -ring.one
        Wl[k * size], Wl[k * size + k] = ring.one, ring.zero
        Gm = Matrix._raw(size, size, ring, Wl) @ Gm
    return Gm


def _levi(A, ring):
    n = A.rows
    O = Matrix.zeros(n, n, ring)
    return Matrix.block([[A, O], [O, mat_inverse(A).T]], ring)


def _pieces_A(rs, h):
    m, ring = rs.size, h.ring
    F = list(range(1, m))          # Delta_1
    Lx = list(range(m - 1))        # Delta_{m-1}
    rF, rL = 1, m - 1
    left, right = [], []
    col = h.col(0)
    w = col[1:]
    if any(not x.is_zero() for x in w):
        g = _vec_to_e1(w, ring).embed(m, F)
        left.append((rF, g))
        h = g @ h
    col = h.col(0)
    g = _vec_to_e1(col[:m - 1], ring).embed(m, Lx)
    left.append((rL, g))
    h = g @ h
    u = h.row(0)[1:]
    if any(not x.is_zero() for x in u):
        g = _vec_to_e1(u, ring).T.embed(m, F)
        right.append((rF, g))
        h = h @ g
    c = h[0, 1]
    if not c.is_zero():
        g = Matrix.identity(m, ring)
        e = list(g.entries)
        e[1] = -c
        g = Matrix._raw(m, m, ring, e)
        right.append((rL, g))
        h = h @ g
    return left, (rF, h), right


def _pieces_C(rs, h):
    n, ring = rs.n, h.ring
    size = 2 * n
    F = list(range(1, n)) + list(range(n + 1, size))
    k = n - 1
    rF, rL = 1, n
    I_n = Matrix.identity(n, ring)
    left, right = [], []

    def rest_of(vec):
        return [vec[i] for i in F]

    def nonzero(vec):
        return any(not x.is_zero() for x in vec)

    def lmul(r, g):
        nonlocal h
        left.append((r, g))
        h = g @ h

    def rmul(r, g):
        nonlocal h
        right.append((r, g))
        h = h @ g

    def tv(i, j, c):          # I + c E_ij in GL(n)
        e = list(I_n.entries)
        e[i * n + j] = e[i * n + j] + c
        return Matrix._raw(n, n, ring, e)

    # column e_1 -----------------------------------------------------------
    v = h.col(0)
    if not v[n].is_zero():
        if all(v[n + j].is_zero() for j in range(1, n)):
            if nonzero(rest_of(v)):
                lmul(rF, _sp_vec_to(rest_of(v), k, ring).embed(size, F))
            else:
                lmul(rL, _levi(tv(0, 1, -ring.one), ring))    # y_2 += y_1
            v = h.col(0)
        c = -(v[n] / v[n + 1])
        lmul(rL, _levi(tv(1, 0, -c), ring))                   # y_1 += c y_2
        v = h.col(0)
    if nonzero(rest_of(v)):
        lmul(rF, _sp_vec_to(rest_of(v), 0, ring).embed(size, F))
        v = h.col(0)
    lmul(rL, _levi(_vec_to_e1(v[:n], ring), ring))
    # row e_1 ---------------------------------------------------------------
    r = h.row(0)
    if not r[n].is_zero():
        if all(r[n + j].is_zero() for j in range(1, n)):
            if not nonzero(rest_of(r)):
                rmul(rL, _levi(tv(0, 1, ring.one), ring))
                r = h.row(0)
            rmul(rF, _sp_vec_to(rest_of(r), k, ring).T.embed(size, F))
            r = h.row(0)
        j = next(j for j in range(1, n) if not r[n + j].is_zero())
        rmul(rL, _levi(tv(0, j, r[n] / r[n + j]), ring))
        r = h.row(0)
    if nonzero(rest_of(r)):
        rmul(rF, _sp_vec_to(rest_of(r), 0, ring).T.embed(size, F))
        r = h.row(0)
    A = list(I_n.entries)
    for j in range(1, n):
        A[j] = -r[j]
    if any(not x.is_zero() for x in A[1:n]):
        rmul(rL, _levi(Matrix._raw(n, n, ring, A), ring))
    return left, (rF, h), right


def _null_basis(v, ring):
    """Basis of ``{u : v . u = 0}``."""
    k = len(v)
    p = next((i for i in range(k) if not v[i].is_zero()), None)
    if p is None:
        return [[ring.one if i == j else ring.zero for i in range(k)] for j in range(k)]
    out = []
    for j in range(k):
        if j != p:
            u = [ring.zero] * k
            u[j] = ring.one
            u[p] = -(v[j] / v[p])
            out.append(u)
    return out


def _dotv(a, b):
    s = None
    for x, y in zip(a, b):
        s = x * y if s is None else s + x * y
    return s


def _frame(x, y, ring):
    """K in SL(k) with ``K e_1 = x`` and ``y^T K = e_1^T`` (needs ``y . x = 1``)."""
    k = len(x)
    cols = [list(x)] + _null_basis(y, ring)
    K = Matrix([[cols[j][i] for j in range(k)] for i in range(k)], ring)
    d = det(K)
    if d != ring.one:
        e = list(K.entries)
        for i in range(k):
            e[i * k + k - 1] = e[i * k + k - 1] / d
        K = Matrix._raw(k, k, ring, e)
    return K


def _generic_A(rs, h):
    """``h = a b c`` with a, c in Delta_{m-1} and b in Delta_1, or None if degenerate."""
    m, ring = rs.size, h.ring
    k = m - 1
    E = list(range(k))
    rho = h.row(m - 1)[:k]
    kap = [h[i, m - 1] for i in range(k)]
    for u in _null_basis(rho, ring):
        hu = [_dotv(h.row(i)[:k], u) for i in range(k)]
        for w in _null_basis(kap, ring):
            t = _dotv(w, hu)
            if t.is_zero():
                continue
            u = [x / t for x in u]
            x = [v / t for v in hu]
            y = [_dotv(w, h.col(j)[:k]) for j in range(k)]
            a = _frame(x, w, ring).embed(m, E)
            cinv = _frame(u, y, ring).embed(m, E)
            b = mat_inverse(a) @ h @ cinv
            return [(m - 1, a), (1, b), (m - 1, mat_inverse(cinv))]
    return None


def _generic_C(rs, h):
    """``h = F1 Lv(G) F2 Lv(H)`` with F_i in Delta_1 and Lv in Delta_n, or None."""
    n, ring = rs.n, h.ring
    size = 2 * n
    k = n - 1
    Fidx = list(range(1, n)) + list(range(n + 1, size))
    c1 = h.row(n)[:n]
    b1 = h.row(0)[n:]
    for u in _null_basis(c1, ring):
        for up in _null_basis(b1, ring):
            t = _dotv(u, up)
            if t.is_zero():
                continue
            u = [x / t for x in u]
            Mu = [_dotv(h.row(i)[:n], u) for i in range(size)]
            Mup = [_dotv(h.row(i)[n:], up) for i in range(size)]
            s = ring.one - Mu[0] * Mup[n]
            if s.is_zero():
                continue
            K = _frame(u, up, ring)
            LvHinv = _levi(K, ring)
            a = [Mu[i] for i in Fidx]
            b = [Mup[i] for i in Fidx]
            Q = _sp_vec_to(a, 0, ring)
            bh = list((Q @ Matrix([[x] for x in b], ring)).entries)
            # kill top_j (j >= 2) with sp_short(1, j), then top_1 with sp_long(1)
            R = Matrix.identity(2 * k, ring)
            for j in range(1, k):
                r = -(bh[j] / s)
                if r.is_zero():
                    continue
                T = eval_token(sp_short(1, j + 1, r), k, ring)
                R = T @ R
                bh = list((T @ Matrix([[x] for x in bh], ring)).entries)
            if not bh[0].is_zero():
                T = eval_token(sp_long(1, -(bh[0] / s)), k, ring)
                R = T @ R
            F1inv = (R @ Q).embed(size, Fidx)
            N = F1inv @ h @ LvHinv
            x = N.col(0)[:n]
            y = N.col(n)[n:]
            G = _levi(_frame(x, y, ring), ring)
            F2 = symplectic_inverse(G) @ N
            return [(1, symplectic_inverse(F1inv)), (n, G), (1, F2), (n, symplectic_inverse(LvHinv))]
    return None


def alternating_pieces(rs: _RootSystem, h: Matrix):
    """``[(r_1, p_1), ...]`` with ``p_i`` in E(Delta_{r_i}) and product h.

    Column 1 is reduced by left multiplication and row 1 by right
    multiplication, alternating between Delta_1 and Delta_l, until the
    remainder lies in Delta_1.  At most a handful of pieces result.
    """
    if rs.rank < 2:
        raise PreconditionError("rank-1 systems have no proper subsystem")
    seq = (_generic_C if rs.kind == "C" else _generic_A)(rs, h)
    if seq is None:
        left, mid, right = (_pieces_C if rs.kind == "C" else _pieces_A)(rs, h)
        seq = [(r, _inverse(rs, g)) for r, g in left]
        seq.append(mid)
        seq += [(r, _inverse(rs, g)) for r, g in reversed(right)]
    for r, g in seq:
        sub = rs.subsystem(r)
        if sub.embed(sub.restrict(g)) != g:
            raise ConsistencyError(f"piece is not in the Delta_{r} block")
    out = []
    for r, g in seq:
        if g.is_identity():
            continue
        if out and out[-1][0] == r:
            out[-1] = (r, out[-1][1] @ g)
        else:
            out.append((r, g))
    return out


# --------------------------------------------------------------------------
# absorption
# --------------------------------------------------------------------------


def _base4(h, base):
    ring = h.ring
    g = base(h)
    return [L(g[0], ring), U(g[1], ring), L(g[2], ring), U(g[3], ring)]


def _factor4(rs, h, base, check):
    """Four-factor decomposition of h in the group of ``rs`` (fresh state)."""
    if rs.rank == 1:
        return _base4(h, base)
    out = direct_split4(rs, h, base, check)
    if out is not None:
        return out
    ring = h.ring
    I = Matrix.identity(rs.size, ring)
    state = [I] * 4
    for r, p in reversed(alternating_pieces(rs, h)):
        state = _absorb_piece(rs, state, r, p, base, check)
    return state


def _split_C(h):
    """``h = Lv(G) L(X1) U(Z1) L(I) U(Z2)`` (block notation), or None if A is singular."""
    n = h.rows // 2
    ring = h.ring
    top, bot = list(range(n)), list(range(n, 2 * n))
    A = h.submatrix(top, top)
    dA = det(A)
    if dA.is_zero():
        return None
    I = Matrix.identity(n, ring)
    O = Matrix.zeros(n, n, ring)
    s = [ring.one] * (n - 1) + [dA]
    Sinv = Matrix.diag([x.inverse() for x in s], ring)
    G = A @ Sinv
    Ginv = mat_inverse(G)
    Bp = Ginv @ h.submatrix(top, bot)
    Cp = G.T @ h.submatrix(bot, top)
    X1 = (Cp - I) @ Sinv
    Z1 = Matrix.diag(s, ring) - I
    Z2 = Sinv @ Bp - I + Sinv

    def low(X):
        return Matrix.block([[I, O], [X, I]], ring)

    def up(Z):
        return Matrix.block([[I, Z], [O, I]], ring)

    return G, [low(X1), up(Z1), low(I), up(Z2)]


def _split_A(h):
    """Same shape in SL(m): blocks of sizes (m-1, 1), radicals on row/column m."""
    m = h.rows
    ring = h.ring
    k = m - 1
    head = list(range(k))
    A = h.submatrix(head, head)
    dA = det(A)
    if dA.is_zero():
        return None
    inv = dA.inverse()
    G = A.submatrix(head, head)
    G = Matrix._raw(k, k, ring, tuple(x * inv if j % k == 0 else x
                                       for j, x in enumerate(G.entries)))
    bp = mat_inverse(G) @ h.submatrix(head, [k])
    c = h.row(k)[:k]

    def mk(pos, vals):
        e = list(Matrix.identity(m, ring).entries)
        for (p, q), v in zip(pos, vals):
            e[p * m + q] = v
        return Matrix._raw(m, m, ring, e)

    z1 = [dA - ring.one] + [ring.zero] * (k - 1)
    z2 = [bp[0, 0] * inv - z1[0] * inv] + [bp[i, 0] for i in range(1, k)]
    x1 = [(c[0] - ring.one) * inv] + list(c[1:])
    col = [(i, k) for i in range(k)]
    row = [(k, j) for j in range(k)]
    T = [mk(row, x1), mk(col, z1), mk(row, [ring.one] + [ring.zero] * (k - 1)), mk(col, z2)]
    return G, T


def direct_split4(rs, h, base=sl2_params_field, check=False):
    """Four factors of h from ``Y = E(Delta_l) E(Sigma^-) E(Sigma) E(Sigma^-) E(Sigma)``.

    The Delta_l part G is refactored recursively and the radical parts are
    conjugated past it.  Every output is a function of h alone, which keeps
    coefficient growth bounded by the recursion depth.  Returns None when the
    leading block at some level is singular.
    """
    if rs.rank == 1:
        return _base4(h, base)
    split = (_split_C if rs.kind == "C" else _split_A)(h)
    if split is None:
        return None
    G, T = split
    sub = rs.subsystem(rs.rank)
    child = direct_split4(sub.child, G, base, check)
    if child is None:
        return None
    Dn = [sub.embed(c) for c in child]
    out = []
    P = Matrix.identity(rs.size, h.ring)
    for k in (3, 2, 1, 0):
        out.append(Dn[k] @ P @ T[k] @ _inverse(rs, P))
        P = Dn[k] @ P
    out.reverse()
    if check:
        prod = out[0] @ out[1] @ out[2] @ out[3]
        if prod != h:
            raise ConsistencyError(f"direct split does not reproduce the element in {rs!r}")
    return out


def _absorb_piece(rs, state, r, p, base, check):
    """Factors with product ``p @ prod(state)`` for p in E(Delta_r)."""
    sub = rs.subsystem(r)
    ring = p.ring
    child_state = [sub.restrict(V) for V in state]
    h = sub.restrict(p)
    for V in child_state:
        h = h @ V
    new_child = _factor4(sub.child, h, base, check)
    Dn = [sub.embed(c) for c in new_child]
    if all(V.is_identity() for V in state):
        return Dn
    D = [sub.embed(c) for c in child_state]
    S = []
    for side, V, Dk in zip(SIDES, state, D):
        Sk = _inverse(rs, Dk) @ V
        if check and not _support_ok(rs, Sk, _sigma_set(rs, r, -1 if side == "lower" else 1)):
            raise ConsistencyError(f"radical part escapes Sigma_{r} in {rs!r}")
        S.append(Sk)
    # P_k = D_{k+1}...D_4 and P'_k likewise; V'_k = D'_k Q_k S_k Q_k^-1 with Q_k = P'_k P_k^-1
    I = Matrix.identity(rs.size, ring)
    P, Pn = [I] * 4, [I] * 4
    for k in (2, 1, 0):
        P[k] = D[k + 1] @ P[k + 1]
        Pn[k] = Dn[k + 1] @ Pn[k + 1]
    out = []
    for k in range(4):
        if k == 3:
            out.append(Dn[3] @ S[3])
            continue
        Q = Pn[k] @ _inverse(rs, P[k])
        out.append(Dn[k] @ Q @ S[k] @ _inverse(rs, Q))
    return out


def _runs(rs, pairs):
    """Maximal runs, right to left, each inside one subsystem: [(r, start, end)]."""
    out = []
    end = len(pairs)
    while end > 0:
        r = rs.choose_subsystem(pairs[end - 1][0])
        start = end - 1
        while start > 0 and rs.k(pairs[start - 1][0], r) == 0:
            start -= 1
        out.append((r, start, end))
        end = start
    return out


DEFAULT_MAX_RUNS = 6


def tavgen_absorb(fundword, rs: _RootSystem, base=sl2_params_field, target: Matrix | None = None,
                  check: bool = False, ring=None,
                  max_runs: int | None = DEFAULT_MAX_RUNS) -> UnitriFactorization:
    """Four alternating unitriangular factors (lower first) whose product evaluates ``fundword``.

    ``fundword`` is a list of :class:`RootElement` (or ``(root, param)`` pairs)
    applied left to right.  Generators are taken right to left in maximal runs
    lying in one subsystem (Delta_l unless the generator is +-a_l, then
    Delta_1); each run's product is absorbed into the state and the collected
    Delta element is refactored recursively.  With ``check=True`` the running
    product and support conditions are verified after every run.  The bit size
    of the state after each run is recorded in ``metrics``.

    Coefficients grow geometrically with the number of runs (each run feeds
    the previous state into the next refactoring).  A word with more than
    ``max_runs`` runs is therefore replaced by the piecewise word of its
    evaluation (same product, at most a handful of runs); ``max_runs=None``
    absorbs the given word literally.
    """
    pairs = [(e.root, e.param) if isinstance(e, RootElement) else (tuple(e[0]), e[1])
             for e in fundword]
    if ring is None:
        ring = target.ring if target is not None else QI
    if not ring.is_field:
        raise UnsupportedRingError("absorption needs field coefficients")
    pairs = [(a, ring.coerce(x)) for a, x in pairs]
    for a, _ in pairs:
        if a not in rs._root_set:
            raise PreconditionError(f"{a} is not a root of {rs!r}")
    I = Matrix.identity(rs.size, ring)
    factors = [I] * 4
    metrics = []
    regrouped = False
    if rs.rank > 1 and max_runs is not None and len(_runs(rs, pairs)) > max_runs:
        whole = _eval_pairs(rs, pairs, ring)
        if target is None:
            target = whole
        pairs = [(e.root, e.param) for e in piecewise_fundamental_word(whole, rs)]
        regrouped = True
    if rs.rank == 1:
        factors = _base4(_eval_pairs(rs, pairs, ring), base)
        metrics.append({"step": 1, "tokens": len(pairs), "subsystem": None,
                        "bits": max(V.bitsize() for V in factors)})
    else:
        prefix = I
        for step, (r, start, end) in enumerate(_runs(rs, pairs), 1):
            p = _eval_pairs(rs, pairs[start:end], ring)
            factors = _absorb_piece(rs, factors, r, p, base, check)
            metrics.append({"step": step, "tokens": end - start, "subsystem": r,
                            "bits": max(V.bitsize() for V in factors), "regrouped": regrouped})
            if check:
                prefix = p @ prefix
                st = AbsorptionState(rs, factors)
                if st.product() != prefix or not st.supports_ok():
                    raise ConsistencyError(f"absorption invariant broken at step {step}")
    if target is None:
        target = _eval_pairs(rs, pairs, ring)
    basis = "Jtilde" if rs.kind == "C" else "standard"
    return UnitriFactorization(tuple(zip(SIDES, factors)), target, True, basis, metrics=metrics)


def piecewise_fundamental_word(M: Matrix, rs: _RootSystem) -> list:
    """Fundamental word for M built piece by piece.

    M is first split into a short alternating product of elements of
    E(Delta_1) and E(Delta_l); each piece gets its own elimination word
    (symplectic Gauss or transvection elimination inside the subsystem), which
    is rewritten over the subsystem's simple roots and lifted back.  The result
    has one run per piece, so absorption does few, shallow steps.
    """
    if rs.rank == 1:
        w = symplectic_gauss(M) if rs.kind == "C" else sl_elementary_word(M)
        return to_fundamental_word(w, rs)
    out = []
    for r, g in alternating_pieces(rs, M):
        sub = rs.subsystem(r)
        h = sub.restrict(g)
        child = sub.child
        w = symplectic_gauss(h) if child.kind == "C" else sl_elementary_word(h)
        for e in to_fundamental_word(w, child):
            out.append(RootElement(sub.root_up(e.root), e.param, rs))
    return out


def unitriangular_factor_sp(M: Matrix, check: bool = False, word: str = "pieces") -> UnitriFactorization:
    """Four alternating unitriangular symplectic factors with exact product M.

    ``word`` picks the generator word fed to the absorption: ``"pieces"``
    (default) runs symplectic Gauss on each piece of a short alternating
    decomposition, ``"gauss"`` runs it on M itself and absorbs that word
    literally.  Both give valid results; the second has many more runs and its
    coefficients grow geometrically with them, so it is only practical for
    short words.
    """
    if word not in ("pieces", "gauss"):
        raise ValueError(f"unknown word strategy {word!r}")
    if M.rows != M.cols or M.rows % 2:
        raise DimensionError(f"need a 2n x 2n matrix, got {M.shape}")
    if not M.ring.is_field:
        raise UnsupportedRingError("unitriangular_factor_sp needs a field")
    if not is_symplectic(M):
        raise PreconditionError("matrix is not symplectic")
    rs = build_Cn(M.rows // 2)
    Mt = basis_change_to_Jtilde(M)
    for k, side in ((1, "upper"), (0, "lower")):
        if is_unitriangular(Mt, side):
            # already one factor: place it and pad with identities
            I = Matrix.identity(M.rows, M.ring)
            mats = [I] * 4
            mats[k] = M
            return UnitriFactorization(tuple(zip(SIDES, mats)), M, True, "Jtilde")
    if word == "gauss":
        fw = to_fundamental_word(symplectic_gauss(M), rs)
    else:
        fw = piecewise_fundamental_word(M, rs)
    literal = None if word == "gauss" else DEFAULT_MAX_RUNS
    fact = tavgen_absorb(fw, rs, target=M, check=check, ring=M.ring, max_runs=literal)
    if fact.product() != M:
        raise ConsistencyError("absorbed factors do not reproduce the matrix")
    return fact


def unitriangular_factor_sl(A: Matrix, check: bool = False) -> UnitriFactorization:
    """SL(m) analogue over the A_{m-1} recursion."""
    if not A.ring.is_field:
        raise UnsupportedRingError("unitriangular_factor_sl needs a field")
    if det(A) != A.ring.one:
        raise PreconditionError("matrix is not in SL(m)")
    rs = RootSystemA(A.rows)
    fw = piecewise_fundamental_word(A, rs)
    fact = tavgen_absorb(fw, rs, target=A, check=check, ring=A.ring)
    if fact.product() != A:
        raise ConsistencyError("absorbed factors do not reproduce the matrix")
    return fact
