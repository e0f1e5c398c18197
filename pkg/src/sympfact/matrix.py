"""Dense exact matrices over the rings of :mod:`sympfact.ring`.

Matrices are immutable.  Products over Q(i) go through the kernels of
:mod:`sympfact.kernels`; every other ring uses the generic loops below.

Indexing convention for symplectic matrices of size 2n: the labels
``1..n`` map to array indices ``0..n-1`` and the labels ``-1..-n`` map to
``n..2n-1``.  :func:`label_index` converts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import kernels
from .errors import DimensionError, NotInvertibleError, ParseError
from .ring import QI, GaussianField, ring_from_descriptor, ring_of

__all__ = [
    "Matrix", "SymplecticForm", "symplectic_form",
    "mat_mul", "mat_inverse", "det",
    "is_symplectic", "is_unitriangular", "is_sp_lie_algebra",
    "symplectic_inverse", "label_index", "jtilde_permutation",
    "nullspace", "solve_linear",
    "matrix_to_json", "matrix_from_json",
]


class Matrix:
    """Row-major matrix whose entries all belong to one ring."""

    __slots__ = ("rows", "cols", "ring", "entries")

    def __init__(self, data, ring=None):
        data = [list(r) for r in data]
        rows = len(data)
        cols = len(data[0]) if rows else 0
        if any(len(r) != cols for r in data):
            raise DimensionError("ragged rows")
        if ring is None:
            ring = _infer_ring(data)
        self.rows = rows
        self.cols = cols
        self.ring = ring
        self.entries = tuple(ring.coerce(x) for r in data for x in r)

    @classmethod
    def _raw(cls, rows, cols, ring, entries):
        m = object.__new__(cls)
        m.rows = rows
        m.cols = cols
        m.ring = ring
        m.entries = tuple(entries)
        return m

    @classmethod
    def identity(cls, n, ring=QI):
        z, o = ring.zero, ring.one
        return cls._raw(n, n, ring, [o if i == j else z for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, rows, cols=None, ring=QI):
        cols = rows if cols is None else cols
        return cls._raw(rows, cols, ring, [ring.zero] * (rows * cols))

    @classmethod
    def from_flat(cls, rows, cols, entries, ring=QI):
        entries = [ring.coerce(x) for x in entries]
        if len(entries) != rows * cols:
            raise DimensionError("entry count does not match shape")
        return cls._raw(rows, cols, ring, entries)

    @classmethod
    def unit(cls, n, i, j, value=None, ring=QI):
        """The matrix unit E_ij (0-based), optionally scaled."""
        e = [ring.zero] * (n * n)
        e[i * n + j] = ring.one if value is None else ring.coerce(value)
        return cls._raw(n, n, ring, e)

    @classmethod
    def diag(cls, values, ring=None):
        values = list(values)
        if ring is None:
            ring = _infer_ring([values])
        n = len(values)
        e = [ring.zero] * (n * n)
        for k, v in enumerate(values):
            e[k * n + k] = ring.coerce(v)
        return cls._raw(n, n, ring, e)

    @classmethod
    def block(cls, blocks, ring=None):
        """Assemble ``[[A, B], [C, D]]``-style nested lists of matrices."""
        first = blocks[0][0]
        ring = first.ring if ring is None else ring
        out = []
        for brow in blocks:
            h = brow[0].rows
            for r in range(h):
                row = []
                for b in brow:
                    if b.rows != h:
                        raise DimensionError("block heights differ")
                    row.extend(b.entries[r * b.cols:(r + 1) * b.cols])
                out.append(row)
        return cls(out, ring)

    # access ----------------------------------------------------------------

    @property
    def shape(self):
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j):
        return self.entries[j::self.cols]

    def tolist(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def submatrix(self, row_idx, col_idx):
        c = self.cols
        e = self.entries
        return Matrix._raw(len(row_idx), len(col_idx), self.ring,
                           [e[i * c + j] for i in row_idx for j in col_idx])

    def permute(self, perm):
        """``P M P^-1`` for the permutation with ``new[i][j] = old[perm[i]][perm[j]]``."""
        return self.submatrix(perm, perm)

    def embed(self, size, idx):
        """Place this square matrix on the index set ``idx`` of a ``size`` identity."""
        if self.rows != self.cols or len(idx) != self.rows:
            raise DimensionError("embed needs a square matrix matching the index set")
        e = list(Matrix.identity(size, self.ring).entries)
        k = self.cols
        for a, i in enumerate(idx):
            for b, j in enumerate(idx):
                e[i * size + j] = self.entries[a * k + b]
        return Matrix._raw(size, size, self.ring, e)

    def map(self, f, ring=None):
        ring = self.ring if ring is None else ring
        return Matrix._raw(self.rows, self.cols, ring, [ring.coerce(f(x)) for x in self.entries])

    @property
    def T(self):
        r, c = self.rows, self.cols
        e = self.entries
        return Matrix._raw(c, r, self.ring, [e[i * c + j] for j in range(c) for i in range(r)])

    transpose = T

    # predicates ------------------------------------------------------------

    def is_square(self):
        return self.rows == self.cols

    def is_zero(self):
        return all(x.is_zero() for x in self.entries)

    def is_identity(self):
        if self.rows != self.cols:
            return False
        if isinstance(self.ring, GaussianField):
            return kernels.gauss_is_identity(list(self.entries), self.rows)
        n = self.cols
        one = self.ring.one
        for k, x in enumerate(self.entries):
            i, j = divmod(k, n)
            if i == j:
                if x != one:
                    return False
            elif not x.is_zero():
                return False
        return True

    def is_symmetric(self):
        return self.rows == self.cols and self == self.T

    def bitsize(self):
        return max((x.bitsize() for x in self.entries), default=0)

    # arithmetic ------------------------------------------------------------

    def _check_same(self, other):
        if not isinstance(other, Matrix):
            raise TypeError("matrix operand expected")
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        if self.ring != other.ring:
            raise DimensionError(f"ring mismatch {self.ring} vs {other.ring}")

    def __add__(self, other):
        self._check_same(other)
        return Matrix._raw(self.rows, self.cols, self.ring,
                           [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._check_same(other)
        return Matrix._raw(self.rows, self.cols, self.ring,
                           [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self):
        return Matrix._raw(self.rows, self.cols, self.ring, [-a for a in self.entries])

    def scale(self, c):
        c = self.ring.coerce(c)
        return Matrix._raw(self.rows, self.cols, self.ring, [c * a for a in self.entries])

    def __matmul__(self, other):
        return mat_mul(self, other)

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return mat_inverse(self) ** (-k)
        result = Matrix.identity(self.rows, self.ring)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def trace(self):
        t = self.ring.zero
        for i in range(min(self.rows, self.cols)):
            t = t + self[i, i]
        return t

    def det(self):
        return det(self)

    def inverse(self):
        return mat_inverse(self)

    # comparison ------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.shape == other.shape and self.ring == other.ring
                and all(a == b for a, b in zip(self.entries, other.entries)))

    __hash__ = None

    def __repr__(self):
        fmt = self.ring.format
        rows = ", ".join("[" + ", ".join(fmt(x) for x in self.row(i)) + "]"
                         for i in range(self.rows))
        return f"Matrix([{rows}])"


def _infer_ring(data):
    for r in data:
        for x in r:
            if not isinstance(x, (int, str, Fraction)):
                return ring_of(x)
    return QI


# --------------------------------------------------------------------------
# core operations
# --------------------------------------------------------------------------


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    """Exact product ``A @ B``."""
    if A.cols != B.rows:
        raise DimensionError(f"cannot multiply {A.shape} by {B.shape}")
    if A.ring != B.ring:
        raise DimensionError(f"ring mismatch {A.ring} vs {B.ring}")
    m, k, n = A.rows, A.cols, B.cols
    if isinstance(A.ring, GaussianField):
        return Matrix._raw(m, n, A.ring,
                           kernels.gauss_matmul(list(A.entries), list(B.entries), m, k, n))
    zero = A.ring.zero
    a, b = A.entries, B.entries
    out = []
    for i in range(m):
        arow = [(t, a[i * k + t]) for t in range(k) if not a[i * k + t].is_zero()]
        for j in range(n):
            s = zero
            for t, x in arow:
                y = b[t * n + j]
                if not y.is_zero():
                    s = s + x * y
            out.append(s)
    return Matrix._raw(m, n, A.ring, out)


def det(A: Matrix):
    """Determinant by fraction-free (Bareiss) elimination with row pivoting."""
    if A.rows != A.cols:
        raise DimensionError(f"determinant of a non-square {A.shape} matrix")
    n = A.rows
    ring = A.ring
    if n == 0:
        return ring.one
    M = [list(A.row(i)) for i in range(n)]
    sign = 1
    prev = ring.one
    for k in range(n - 1):
        if M[k][k].is_zero():
            for i in range(k + 1, n):
                if not M[i][k].is_zero():
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return ring.zero
        pkk = M[k][k]
        for i in range(k + 1, n):
            mik = M[i][k]
            for j in range(k + 1, n):
                v = M[i][j] * pkk - mik * M[k][j]
                M[i][j] = ring.exact_div(v, prev) if not v.is_zero() else v
        prev = pkk
    d = M[n - 1][n - 1]
    return d if sign > 0 else -d


def mat_inverse(A: Matrix) -> Matrix:
    """Exact inverse.

    Over a field: Gauss-Jordan elimination.  Over a polynomial ring the
    determinant must be a nonzero constant and the adjugate is used.
    Raises :class:`NotInvertibleError` carrying the determinant otherwise.
    """
    if A.rows != A.cols:
        raise DimensionError(f"inverse of a non-square {A.shape} matrix")
    ring = A.ring
    n = A.rows
    if ring.is_field:
        M = [list(A.row(i)) + [ring.one if i == j else ring.zero for j in range(n)]
             for i in range(n)]
        for c in range(n):
            p = next((r for r in range(c, n) if not M[r][c].is_zero()), None)
            if p is None:
                raise NotInvertibleError("matrix is singular", det=ring.zero)
            M[c], M[p] = M[p], M[c]
            inv = ring.one / M[c][c]
            M[c] = [x * inv for x in M[c]]
            for r in range(n):
                if r != c and not M[r][c].is_zero():
                    f = M[r][c]
                    M[r] = [x - f * y for x, y in zip(M[r], M[c])]
        return Matrix._raw(n, n, ring, [x for row in M for x in row[n:]])
    d = det(A)
    if not ring.is_unit(d):
        raise NotInvertibleError(f"determinant {d} is not a unit of {ring}", det=d)
    dinv = d.constant_value().inverse()
    out = []
    for i in range(n):
        for j in range(n):
            # adjugate entry (i, j) is the (j, i) cofactor
            minor = A.submatrix([r for r in range(n) if r != j], [c for c in range(n) if c != i])
            cof = det(minor) if n > 1 else ring.one
            if (i + j) % 2:
                cof = -cof
            out.append(cof.scale(dinv) if hasattr(cof, "scale") else cof * dinv)
    return Matrix._raw(n, n, ring, out)


# --------------------------------------------------------------------------
# symplectic structure
# --------------------------------------------------------------------------


def label_index(label: int, n: int) -> int:
    """Array index of the row/column label ``1..n`` or ``-1..-n``."""
    if label == 0 or abs(label) > n:
        raise IndexError(f"label {label} out of range for n={n}")
    return label - 1 if label > 0 else n - label - 1


def jtilde_permutation(n: int):
    """Index permutation reversing the last n basis vectors."""
    return list(range(n)) + list(range(2 * n - 1, n - 1, -1))


@dataclass(frozen=True)
class SymplecticForm:
    n: int
    kind: str
    gram: Matrix


def symplectic_form(n: int, kind: str = "J", ring=QI) -> SymplecticForm:
    """``J = [[0, I], [-I, 0]]`` or ``J~ = [[0, L], [-L, 0]]`` with L the skew-diagonal."""
    if kind not in ("J", "Jtilde"):
        raise ValueError(f"unknown symplectic form {kind!r}")
    size = 2 * n
    e = [ring.zero] * (size * size)
    for k in range(n):
        col = n + k if kind == "J" else 2 * n - 1 - k
        e[k * size + col] = ring.one
        e[col * size + k] = -ring.one
    return SymplecticForm(n, kind, Matrix._raw(size, size, ring, e))


def _form_for(M: Matrix, F):
    if M.rows != M.cols or M.rows % 2:
        raise DimensionError(f"need a square matrix of even size, got {M.shape}")
    if F is None:
        return symplectic_form(M.rows // 2, "J", M.ring)
    if isinstance(F, str):
        return symplectic_form(M.rows // 2, F, M.ring)
    if 2 * F.n != M.rows:
        raise DimensionError(f"form of size {2 * F.n} for a {M.shape} matrix")
    if F.gram.ring != M.ring:
        return symplectic_form(F.n, F.kind, M.ring)
    return F


def is_symplectic(M: Matrix, F=None) -> bool:
    """True iff ``M G M^T == G`` exactly (G the Gramian, J by default)."""
    F = _form_for(M, F)
    G = F.gram
    return M @ G @ M.T == G


def is_sp_lie_algebra(N: Matrix, F=None) -> bool:
    """True iff ``N^T G + G N == 0`` exactly."""
    F = _form_for(N, F)
    G = F.gram
    return (N.T @ G + G @ N).is_zero()


def symplectic_inverse(M: Matrix) -> Matrix:
    """Inverse of a J-symplectic matrix: ``[[A, B], [C, D]]^-1 = [[D^T, -B^T], [-C^T, A^T]]``.

    The input is trusted to be symplectic; no check is made.
    """
    size = M.rows
    n = size // 2
    e = M.entries
    out = [None] * (size * size)
    for i in range(size):
        for j in range(size):
            # (M^-1)[i][j] = +/- M[j'][i'] with ' swapping the halves
            ii = i + n if i < n else i - n
            jj = j + n if j < n else j - n
            v = e[jj * size + ii]
            out[i * size + j] = v if (i < n) == (j < n) else -v
    return Matrix._raw(size, size, M.ring, out)


def is_unitriangular(M: Matrix, side: str = "upper") -> bool:
    """Unit diagonal and zeros strictly below (upper) or strictly above (lower)."""
    if side not in ("upper", "lower"):
        raise ValueError(f"side must be 'upper' or 'lower', not {side!r}")
    if M.rows != M.cols:
        return False
    n = M.rows
    one = M.ring.one
    for i in range(n):
        for j in range(n):
            x = M.entries[i * n + j]
            if i == j:
                if x != one:
                    return False
            elif (side == "upper" and i > j) or (side == "lower" and i < j):
                if not x.is_zero():
                    return False
    return True


# --------------------------------------------------------------------------
# linear systems over fields
# --------------------------------------------------------------------------


def _rref(rows, ncols, ring):
    """Reduced row echelon form in place; returns pivot columns."""
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if not rows[i][c].is_zero()), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = ring.one / rows[r][c]
        rows[r] = [x * inv if not x.is_zero() else x for x in rows[r]]
        for i in range(nrows):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y if not y.is_zero() else x for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return pivots


def nullspace(A: Matrix):
    """Basis (list of column vectors as lists) of ``{x : A x = 0}`` over a field."""
    ring = A.ring
    if not ring.is_field:
        raise DimensionError("nullspace requires a field")
    rows = [list(A.row(i)) for i in range(A.rows)]
    pivots = _rref(rows, A.cols, ring)
    free = [c for c in range(A.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [ring.zero] * A.cols
        v[f] = ring.one
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][f]
        basis.append(v)
    return basis


def solve_linear(A: Matrix, b):
    """One solution of ``A x = b`` over a field, or ``None`` if inconsistent."""
    ring = A.ring
    if not ring.is_field:
        raise DimensionError("solve_linear requires a field")
    b = [ring.coerce(x) for x in b]
    if len(b) != A.rows:
        raise DimensionError("right-hand side length mismatch")
    rows = [list(A.row(i)) + [b[i]] for i in range(A.rows)]
    pivots = _rref(rows, A.cols + 1, ring)
    if pivots and pivots[-1] == A.cols:
        return None
    x = [ring.zero] * A.cols
    for r, pc in enumerate(pivots):
        x[pc] = rows[r][A.cols]
    return x


# --------------------------------------------------------------------------
# JSON
# --------------------------------------------------------------------------


def matrix_to_json(M: Matrix) -> dict:
    fmt = M.ring.format
    return {
        "rows": M.rows,
        "cols": M.cols,
        "ring": M.ring.descriptor(),
        "entries": [[fmt(x) for x in M.row(i)] for i in range(M.rows)],
    }


def matrix_from_json(obj, ring=None) -> Matrix:
    """Inverse of :func:`matrix_to_json`.  A bare nested list is accepted too."""
    if isinstance(obj, list):
        obj = {"entries": obj}
    if not isinstance(obj, dict) or "entries" not in obj:
        raise ParseError("matrix JSON needs an 'entries' field")
    if ring is None:
        ring = ring_from_descriptor(obj.get("ring", {"kind": "gaussian"}))
    entries = obj["entries"]
    if not isinstance(entries, list) or not all(isinstance(r, list) for r in entries):
        raise ParseError("'entries' must be a list of rows")
    rows = obj.get("rows", len(entries))
    cols = obj.get("cols", len(entries[0]) if entries else 0)
    if len(entries) != rows or any(len(r) != cols for r in entries):
        raise ParseError(f"'entries' does not have shape {rows}x{cols}")
    data = []
    for r in entries:
        row = []
        for x in r:
            if isinstance(x, bool) or not isinstance(x, (str, int)):
                raise ParseError(f"matrix entry {x!r} must be a string or integer")
            row.append(ring.parse(x) if isinstance(x, str) else ring.coerce(x))
        data.append(row)
    return Matrix(data, ring)
