"""Unitriangular factorization of 2 x 2 determinant-one matrices.

Notation: ``L(x) = [[1, 0], [x, 1]]`` and ``U(x) = [[1, x], [0, 1]]``.  A
four-factor factorization is ``M = L(g1) U(g2) L(g3) U(g4)``.  Writing
``M = [[a, b], [c, d]]`` and moving the outer factors across gives

    a = 1 + g2*g3,   g4 = (b - g2)/a,   g1 = (c - g3)/a      (a != 0)

with g3 free (nonzero) when a is not 0 or 1.  For a = 0 the middle pair is
forced (g2 = b, g3 = c) and for a = 1 we take g2 = g3 = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (ConsistencyError, DimensionError, NotDivisibleError,
                     PreconditionError, UnsupportedRingError)
from .matrix import (Matrix, det, is_symplectic, is_unitriangular, matrix_from_json,
                     matrix_to_json)
from .ring import QI, Poly, PolyRing, poly_euclid_div


def L(x, ring=QI) -> Matrix:
    x = ring.coerce(x)
    return Matrix._raw(2, 2, ring, (ring.one, ring.zero, x, ring.one))


def U(x, ring=QI) -> Matrix:
    x = ring.coerce(x)
    return Matrix._raw(2, 2, ring, (ring.one, x, ring.zero, ring.one))


def phi4(z1, z2, z3, z4, ring=None) -> Matrix:
    """``L(z1) U(z2) L(z3) U(z4)``."""
    if ring is None:
        ring = next((_ring_of_value(z) for z in (z1, z2, z3, z4) if not isinstance(z, int)), QI)
    return L(z1, ring) @ U(z2, ring) @ L(z3, ring) @ U(z4, ring)


def _ring_of_value(z):
    from .ring import ring_of
    return ring_of(z)


@dataclass
class UnitriFactorization:
    """Alternating product of unitriangular factors equal to ``target``.

    ``basis`` says in which ordering the sides are judged: ``"standard"`` or
    ``"Jtilde"`` (symplectic factors, last n basis vectors reversed).
    """

    factors: tuple
    target: Matrix
    starts_lower: bool = True
    basis: str = "standard"
    params: tuple | None = None
    metrics: list = field(default_factory=list)

    def __post_init__(self):
        self.factors = tuple((s, m) for s, m in self.factors)
        if self.factors:
            self.starts_lower = self.factors[0][0] == "lower"

    def __len__(self):
        return len(self.factors)

    @property
    def count(self) -> int:
        return len(self.factors)

    @property
    def matrices(self):
        return [m for _, m in self.factors]

    @property
    def sides(self):
        return [s for s, _ in self.factors]

    def product(self) -> Matrix:
        P = Matrix.identity(self.target.rows, self.target.ring)
        for _, m in self.factors:
            P = P @ m
        return P

    def checks(self, symplectic: bool | None = None) -> dict:
        """Exact verification record: product, alternation, per-factor sides."""
        from .sympgen import basis_change_to_Jtilde

        sides = self.sides
        alternating = all(a != b for a, b in zip(sides, sides[1:]))
        side_ok = []
        for s, m in self.factors:
            mm = basis_change_to_Jtilde(m) if self.basis == "Jtilde" else m
            side_ok.append(is_unitriangular(mm, s))
        out = {
            "product": self.product() == self.target,
            "alternating": alternating,
            "sides": all(side_ok),
            "side_checks": side_ok,
        }
        if symplectic is None:
            symplectic = self.basis == "Jtilde"
        if symplectic:
            out["symplectic"] = all(is_symplectic(m) for m in self.matrices)
        return out

    def verify(self, symplectic: bool | None = None) -> bool:
        c = self.checks(symplectic)
        return all(v for k, v in c.items() if k != "side_checks")


# --------------------------------------------------------------------------
# four factors over a field
# --------------------------------------------------------------------------


def _entries(M):
    if M.shape != (2, 2):
        raise DimensionError(f"expected a 2x2 matrix, got {M.shape}")
    return M.entries


def _check_det_one(M):
    d = det(M)
    if d != M.ring.one:
        raise PreconditionError(f"determinant is {M.ring.format(d)}, not 1")


def sl2_params_field(M: Matrix, g3_choice=None):
    """Parameters (g1, g2, g3, g4) with ``phi4(g1, g2, g3, g4) == M`` over a field."""
    ring = M.ring
    if not ring.is_field:
        raise UnsupportedRingError(f"{ring} is not a field; use sl2_4factor_poly_try")
    a, b, c, d = _entries(M)
    _check_det_one(M)
    one, zero = ring.one, ring.zero
    if g3_choice is not None:
        g3_choice = ring.coerce(g3_choice)
        if g3_choice.is_zero():
            raise PreconditionError("g3_choice must be nonzero")
    if a.is_zero():
        # bc = -1, so c != 0
        g2, g3 = b, c
        g1 = zero
        g4 = (d - one) / c
    elif a == one:
        g2 = g3 = zero
        g1, g4 = c, b
    else:
        g3 = one if g3_choice is None else g3_choice
        g2 = (a - one) / g3
        g4 = (b - g2) / a
        g1 = (c - g3) / a
    return g1, g2, g3, g4


def sl2_4factor_field(M: Matrix, g3_choice=None) -> UnitriFactorization:
    """Exactly four factors ``L U L U`` with product M (M over Q(i) or a rational function field)."""
    ring = M.ring
    g = sl2_params_field(M, g3_choice)
    factors = (("lower", L(g[0], ring)), ("upper", U(g[1], ring)),
               ("lower", L(g[2], ring)), ("upper", U(g[3], ring)))
    fact = UnitriFactorization(factors, M, True, params=g)
    if fact.product() != M:
        raise ConsistencyError("four-factor solution does not reproduce the matrix")
    return fact


# --------------------------------------------------------------------------
# four factors over a polynomial ring (may fail)
# --------------------------------------------------------------------------


@dataclass
class DivisibilityFailure:
    """Why the polynomial four-factor ansatz failed for the chosen g3."""

    failed: str            # "b - g2 by a" | "c - g3 by a" | "a - 1 by g3"
    dividend: Poly
    divisor: Poly
    g3_choice: Poly

    def to_json(self):
        return {
            "ok": False,
            "failed_division": self.failed,
            "dividend": str(self.dividend),
            "divisor": str(self.divisor),
            "g3_choice": str(self.g3_choice),
        }


def sl2_4factor_poly_try(M: Matrix, g3_choice=1):
    """Four polynomial factors, or a :class:`DivisibilityFailure` naming the failed division."""
    ring = M.ring
    if not isinstance(ring, PolyRing):
        raise UnsupportedRingError("sl2_4factor_poly_try expects a polynomial matrix")
    a, b, c, d = _entries(M)
    _check_det_one(M)
    g3_choice = ring.coerce(g3_choice)
    if g3_choice.is_zero():
        raise PreconditionError("g3_choice must be nonzero")
    one, zero = ring.one, ring.zero

    def div(p, q, label):
        try:
            return p.exact_div(q)
        except NotDivisibleError:
            raise _Fail(DivisibilityFailure(label, p, q, g3_choice)) from None

    try:
        if a.is_zero():
            g2, g3, g1 = b, c, zero
            g4 = div(d - one, c, "d - 1 by c")
        elif a == one:
            g2 = g3 = zero
            g1, g4 = c, b
        else:
            g3 = g3_choice
            g2 = div(a - one, g3, "a - 1 by g3")
            g4 = div(b - g2, a, "b - g2 by a")
            g1 = div(c - g3, a, "c - g3 by a")
    except _Fail as f:
        return f.report
    g = (g1, g2, g3, g4)
    factors = (("lower", L(g1, ring)), ("upper", U(g2, ring)),
               ("lower", L(g3, ring)), ("upper", U(g4, ring)))
    fact = UnitriFactorization(factors, M, True, params=g)
    # the (2,2) equation is implied by det = 1; confirm it
    if fact.product() != M:
        raise ConsistencyError("polynomial four-factor solution does not reproduce the matrix")
    return fact


class _Fail(Exception):
    def __init__(self, report):
        super().__init__(report.failed)
        self.report = report


# --------------------------------------------------------------------------
# Euclidean fallback over Q(i)[z]
# --------------------------------------------------------------------------


def _merge(factors, ring):
    """Multiply adjacent same-side factors and drop identities."""
    out = []
    for side, x in factors:
        if x.is_zero():
            continue
        if out and out[-1][0] == side:
            y = out[-1][1] + x
            out.pop()
            if not y.is_zero():
                out.append((side, y))
        else:
            out.append((side, x))
    return out


def sl2_euclid_factor(M: Matrix, trace: list | None = None) -> UnitriFactorization:
    """Alternating factorization of any M in SL2(Q(i)[z]) by Euclidean reduction.

    Row operations reduce the first column to ``(a0, 0)`` with a0 a nonzero
    constant, the constant diagonal remnant is split by the field solver, and
    adjacent factors on the same side are merged.  The length is unbounded.
    If ``trace`` is a list, each reduction appends ``(entry, deg_before, deg_after)``.
    """
    ring = M.ring
    if not isinstance(ring, PolyRing) or len(ring.vars) != 1:
        raise UnsupportedRingError("sl2_euclid_factor expects a matrix over a univariate polynomial ring")
    _check_det_one(M)
    a, b, c, d = _entries(M)
    ops = []   # left multiplications, in order of application
    while not c.is_zero():
        if a.is_zero():
            a, b = a + c, b + d
            ops.append(("upper", ring.one))
        elif c.degree() >= a.degree():
            q, rem = poly_euclid_div(c, a)
            if trace is not None:
                trace.append(("c", c.degree(), rem.degree()))
            c, d = rem, d - q * b
            ops.append(("lower", -q))
        else:
            q, rem = poly_euclid_div(a, c)
            if trace is not None:
                trace.append(("a", a.degree(), rem.degree()))
            a, b = rem, b - q * d
            ops.append(("upper", -q))
    if not a.is_constant():
        raise ConsistencyError("Euclidean reduction left a non-constant pivot")
    a0 = a.constant_value()
    # remnant [[a0, b], [0, 1/a0]] = diag(a0, 1/a0) U(b/a0)
    g = sl2_params_field(Matrix([[a0, 0], [0, a0.inverse()]], QI))
    raw = [(s, -q) for s, q in ops]   # M = E_1^-1 ... E_k^-1 R
    raw += [("lower", ring.coerce(g[0])), ("upper", ring.coerce(g[1])),
            ("lower", ring.coerce(g[2])), ("upper", ring.coerce(g[3]))]
    raw.append(("upper", b.scale(a0.inverse())))
    merged = _merge(raw, ring)
    factors = [(s, L(x, ring) if s == "lower" else U(x, ring)) for s, x in merged]
    fact = UnitriFactorization(factors, M, params=tuple(x for _, x in merged))
    if fact.product() != M:
        raise ConsistencyError("Euclidean factorization does not reproduce the matrix")
    return fact


# --------------------------------------------------------------------------
# JSON
# --------------------------------------------------------------------------


def unitri_to_json(f: UnitriFactorization, verified: bool | None = None) -> dict:
    out = {
        "starts_lower": f.starts_lower,
        "factors": [{"side": s, "matrix": matrix_to_json(m)} for s, m in f.factors],
        "target": matrix_to_json(f.target),
    }
    if f.basis != "standard":
        out["basis"] = f.basis
    if verified is not None:
        out["verified"] = verified
    return out


def unitri_from_json(obj) -> UnitriFactorization:
    from .errors import ParseError

    try:
        target = matrix_from_json(obj["target"])
        factors = []
        for item in obj["factors"]:
            side = item["side"]
            if side not in ("lower", "upper"):
                raise ParseError(f"bad side {side!r}")
            factors.append((side, matrix_from_json(item["matrix"])))
        basis = obj.get("basis", "standard")
        if basis not in ("standard", "Jtilde"):
            raise ParseError(f"bad basis {basis!r}")
        return UnitriFactorization(tuple(factors), target,
                                   bool(obj.get("starts_lower", True)), basis)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed factorization: {exc!r}") from None
