"""Elementary SL and symplectic generators, words over them, and block factors.

Token kinds (labels i, j run over 1..n, ``E_{-i,-j}`` refers to the second
half of the basis):

=================  ===========================================  ========
kind               matrix                                       side
=================  ===========================================  ========
sl_transvection    ``I + r E_ij``  (n x n)                      i<j: upper
sp_short           ``I + r (E_{i,-j} + E_{j,-i})``               upper
sp_long            ``I + r E_{i,-i}``                            upper
sp_levi            ``I + r (E_ij - E_{-j,-i})``                  i<j: upper
sp_short_lower     transpose of sp_short                         lower
sp_long_lower      transpose of sp_long                          lower
=================  ===========================================  ========

"Upper"/"lower" for the symplectic kinds refers to the ordering in which the
last n basis vectors are reversed (the J~ basis); see :func:`basis_change_to_Jtilde`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DimensionError, NotInvertibleError, ParseError, PreconditionError
from .matrix import Matrix, jtilde_permutation, mat_inverse, det
from .ring import QI, ring_from_descriptor, ring_of

SL_KINDS = ("sl_transvection",)
SP_KINDS = ("sp_short", "sp_long", "sp_levi", "sp_short_lower", "sp_long_lower")
TWO_INDEX = ("sl_transvection", "sp_short", "sp_levi", "sp_short_lower")


@dataclass(frozen=True)
class GenToken:
    kind: str
    i: int
    j: int | None
    r: object

    def __post_init__(self):
        if self.kind not in SL_KINDS + SP_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind in TWO_INDEX:
            if self.j is None or self.i == self.j:
                raise ValueError(f"{self.kind} needs two distinct indices")
        elif self.j is not None:
            raise ValueError(f"{self.kind} takes a single index")

    @property
    def group(self):
        return "sl" if self.kind in SL_KINDS else "sp"

    def inverse(self) -> "GenToken":
        return GenToken(self.kind, self.i, self.j, -self.r)

    @property
    def side(self) -> str:
        if self.kind in ("sp_short", "sp_long"):
            return "upper"
        if self.kind in ("sp_short_lower", "sp_long_lower"):
            return "lower"
        return "upper" if self.i < self.j else "lower"


def sl_transvection(i, j, r):
    return GenToken("sl_transvection", i, j, r)


def sp_short(i, j, r):
    return GenToken("sp_short", i, j, r)


def sp_long(i, r):
    return GenToken("sp_long", i, None, r)


def sp_levi(i, j, r):
    return GenToken("sp_levi", i, j, r)


def sp_short_lower(i, j, r):
    return GenToken("sp_short_lower", i, j, r)


def sp_long_lower(i, r):
    return GenToken("sp_long_lower", i, None, r)


def _units(t: GenToken, n: int):
    """(row, col, sign) positions of the nilpotent part of a token, 0-based."""
    for idx in (t.i, t.j):
        if idx is not None and not 1 <= idx <= n:
            raise IndexError(f"index {idx} out of range 1..{n} in {t.kind}")
    i, j = t.i - 1, (t.j - 1 if t.j is not None else None)
    if t.kind == "sl_transvection":
        return ((i, j, 1),)
    if t.kind == "sp_short":
        return ((i, n + j, 1), (j, n + i, 1))
    if t.kind == "sp_long":
        return ((i, n + i, 1),)
    if t.kind == "sp_levi":
        return ((i, j, 1), (n + j, n + i, -1))
    if t.kind == "sp_short_lower":
        return ((n + j, i, 1), (n + i, j, 1))
    return ((n + i, i, 1),)


def token_size(t: GenToken, n: int) -> int:
    return n if t.kind in SL_KINDS else 2 * n


def eval_token(t: GenToken, n: int, ring=None) -> Matrix:
    """Matrix of a generator: n x n for sl_transvection, 2n x 2n otherwise."""
    ring = ring_of(t.r) if ring is None else ring
    r = ring.coerce(t.r)
    size = token_size(t, n)
    e = list(Matrix.identity(size, ring).entries)
    for a, b, s in _units(t, n):
        e[a * size + b] = e[a * size + b] + (r if s > 0 else -r)
    return Matrix._raw(size, size, ring, e)


def apply_token_right(entries: list, size: int, t: GenToken, n: int, ring):
    """In place ``M <- M @ eval_token(t)`` on a flat row-major list."""
    r = ring.coerce(t.r)
    if r.is_zero():
        return
    for a, b, s in _units(t, n):
        c = r if s > 0 else -r
        # column b += c * column a
        for row in range(size):
            x = entries[row * size + a]
            if not x.is_zero():
                entries[row * size + b] = entries[row * size + b] + x * c


def apply_token_left(entries: list, size: int, t: GenToken, n: int, ring):
    """In place ``M <- eval_token(t) @ M`` on a flat row-major list."""
    r = ring.coerce(t.r)
    if r.is_zero():
        return
    for a, b, s in _units(t, n):
        c = r if s > 0 else -r
        # row a += c * row b
        for col in range(size):
            x = entries[b * size + col]
            if not x.is_zero():
                entries[a * size + col] = entries[a * size + col] + c * x


@dataclass(frozen=True)
class GenWord:
    n: int
    group: str = "sp"
    tokens: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.group not in ("sl", "sp"):
            raise ValueError("group must be 'sl' or 'sp'")
        object.__setattr__(self, "tokens", tuple(self.tokens))
        for t in self.tokens:
            if t.group != self.group:
                raise ValueError(f"{t.kind} token in a {self.group} word")

    @property
    def size(self):
        return self.n if self.group == "sl" else 2 * self.n

    def __len__(self):
        return len(self.tokens)

    def __add__(self, other):
        if (self.n, self.group) != (other.n, other.group):
            raise DimensionError("cannot concatenate words of different groups")
        return GenWord(self.n, self.group, self.tokens + other.tokens)

    def inverse(self) -> "GenWord":
        return GenWord(self.n, self.group, tuple(t.inverse() for t in reversed(self.tokens)))


def _word_ring(w: GenWord, ring):
    if ring is not None:
        return ring
    for t in w.tokens:
        if not isinstance(t.r, int):
            return ring_of(t.r)
    return QI


def eval_word(w: GenWord, ring=None) -> Matrix:
    """Left-to-right product of the token matrices (identity for the empty word)."""
    ring = _word_ring(w, ring)
    size = w.size
    e = list(Matrix.identity(size, ring).entries)
    for t in w.tokens:
        apply_token_right(e, size, t, w.n, ring)
    return Matrix._raw(size, size, ring, e)


# --------------------------------------------------------------------------
# block factors of types (i), (ii), (iii)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SympFactor:
    kind: str      # "type_i" | "type_ii" | "type_iii"
    block: Matrix

    def __post_init__(self):
        if self.kind not in ("type_i", "type_ii", "type_iii"):
            raise ValueError(f"unknown factor kind {self.kind!r}")
        if not self.block.is_square():
            raise DimensionError("factor block must be square")


def type_i(B):
    return SympFactor("type_i", B if isinstance(B, Matrix) else Matrix(B))


def type_ii(C):
    return SympFactor("type_ii", C if isinstance(C, Matrix) else Matrix(C))


def type_iii(A):
    return SympFactor("type_iii", A if isinstance(A, Matrix) else Matrix(A))


def make_factor(f: SympFactor, n: int | None = None) -> Matrix:
    """``[[I, B], [0, I]]``, ``[[I, 0], [C, I]]`` or ``diag(A, A^-T)``."""
    X = f.block
    if n is not None and X.rows != n:
        raise DimensionError(f"block is {X.rows}x{X.rows}, expected {n}x{n}")
    n = X.rows
    ring = X.ring
    I = Matrix.identity(n, ring)
    O = Matrix.zeros(n, n, ring)
    if f.kind == "type_iii":
        try:
            Ainv = mat_inverse(X)
        except NotInvertibleError as exc:
            raise PreconditionError(f"type (iii) block is singular (det {exc.det})") from None
        return Matrix.block([[X, O], [O, Ainv.T]], ring)
    if X != X.T:
        raise PreconditionError(f"{f.kind} block must be symmetric")
    if f.kind == "type_i":
        return Matrix.block([[I, X], [O, I]], ring)
    return Matrix.block([[I, O], [X, I]], ring)


def expand_type_i_to_elementary(B: Matrix) -> GenWord:
    """Word of sp_long / sp_short tokens whose product is ``[[I, B], [0, I]]``.

    Diagonal tokens come first (ascending i), then off-diagonal ones in
    lexicographic (i, j) order; zero entries produce no token, so the length
    is at most n(n+1)/2.
    """
    return _expand(B, sp_long, sp_short)


def expand_type_ii_to_elementary(C: Matrix) -> GenWord:
    """Transpose analogue of :func:`expand_type_i_to_elementary`."""
    return _expand(C, sp_long_lower, sp_short_lower)


def _expand(B, long_, short_):
    if not isinstance(B, Matrix):
        B = Matrix(B)
    if B != B.T:
        raise PreconditionError("block must be symmetric")
    n = B.rows
    toks = [long_(i + 1, B[i, i]) for i in range(n) if not B[i, i].is_zero()]
    toks += [short_(i + 1, j + 1, B[i, j])
             for i in range(n) for j in range(i + 1, n) if not B[i, j].is_zero()]
    return GenWord(n, "sp", tuple(toks))


def basis_change_to_Jtilde(M: Matrix, n: int | None = None) -> Matrix:
    """``P M P^-1`` with P reversing the order of the last n basis vectors."""
    if M.rows != M.cols or M.rows % 2:
        raise DimensionError(f"need a 2n x 2n matrix, got {M.shape}")
    if n is not None and 2 * n != M.rows:
        raise DimensionError(f"matrix is {M.shape}, expected {2 * n}x{2 * n}")
    return M.permute(jtilde_permutation(M.rows // 2))


def homotopy_scale(f: SympFactor, t) -> SympFactor:
    """Scale the off-diagonal block by t (t = 0: identity, t = 1: unchanged)."""
    if f.kind == "type_iii":
        raise PreconditionError("the scaling homotopy applies to type (i)/(ii) factors only")
    return SympFactor(f.kind, f.block.scale(t))


def sl_word_det_check(w: GenWord, ring=None) -> bool:
    """Every SL word evaluates to a determinant-one matrix; used as a cross-check."""
    return det(eval_word(w, ring)) == _word_ring(w, ring).one


# --------------------------------------------------------------------------
# JSON
# --------------------------------------------------------------------------


def word_to_json(w: GenWord, ring=None) -> dict:
    ring = _word_ring(w, ring)
    toks = []
    for t in w.tokens:
        d = {"kind": t.kind, "i": t.i}
        if t.j is not None:
            d["j"] = t.j
        d["r"] = ring.format(ring.coerce(t.r))
        toks.append(d)
    out = {"n": w.n, "group": w.group, "tokens": toks}
    if ring != QI:
        out["ring"] = ring.descriptor()
    return out


def word_from_json(obj) -> GenWord:
    try:
        ring = ring_from_descriptor(obj.get("ring", {"kind": "gaussian"}))
        toks = []
        for d in obj["tokens"]:
            r = d.get("r", "0")
            r = ring.parse(r) if isinstance(r, str) else ring.coerce(r)
            toks.append(GenToken(d["kind"], int(d["i"]),
                                 int(d["j"]) if d.get("j") is not None else None, r))
        return GenWord(int(obj["n"]), obj.get("group", "sp"), tuple(toks))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed generator word: {exc}") from None
