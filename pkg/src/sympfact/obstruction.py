"""A holomorphic SL2 map with no continuous four-factor factorization.

The map is ``f(z, w) = [[a, b], [h1, h2]]`` with::

    a = (zw - 1)(zw - 2)
    b = (zw - 1) z + (zw - 2) z^2

and a polynomial second row making ``det f = 1``.  Where ``a = 0`` a
factorization ``L(g1) U(g2) L(g3) U(g4)`` forces ``g2 = b``, so on ``zw = 1``
and ``zw = 2`` the function g2 restricts to ``-z^2`` and ``z``.  Following the
curve ``zw = gamma(t)`` from 1 to 2 would deform ``theta -> -theta^2`` into
``theta -> theta`` inside the self-maps of C*, which is impossible because
their degrees (2 and 1) differ.  This module builds f exactly and computes the
two degrees numerically.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import asdict, dataclass
from itertools import combinations_with_replacement

from .errors import ConsistencyError, PreconditionError, SamplingError
from .matrix import Matrix, det, solve_linear
from .ring import QI, Poly, PolyRing

VARS = ("z", "w")
HARD_DEGREE_CAP = 16


def _monomials(nvars: int, degree: int):
    out = []
    for d in range(degree + 1):
        for combo in combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for v in combo:
                e[v] += 1
            out.append(tuple(e))
    return out


def bezout_second_row(a: Poly, b: Poly, degree_cap: int = 4):
    """Polynomials (h1, h2) with ``a h2 - b h1 == 1``.

    Unknown coefficients of h1, h2 up to total degree ``degree_cap`` are solved
    for exactly; the cap doubles on infeasibility up to 16.
    """
    if a.vars != b.vars:
        raise PreconditionError("a and b live in different polynomial rings")
    vars = a.vars
    zero, one = Poly.const(0, vars), Poly.const(1, vars)
    if a.is_constant() and not a.is_zero():
        return zero, Poly.const(a.constant_value().inverse(), vars)
    if b.is_constant() and not b.is_zero():
        return Poly.const(-b.constant_value().inverse(), vars), zero
    cap = max(0, degree_cap)
    while True:
        mons = _monomials(len(vars), cap)
        nm = len(mons)
        rows = {}
        # unknowns: h1 coefficients (columns 0..nm-1), then h2 (nm..2nm-1)
        for col, (p, sign) in enumerate([(b, -1)] * nm + [(a, 1)] * nm):
            m = mons[col % nm]
            for e, c in p.terms.items():
                key = tuple(x + y for x, y in zip(e, m))
                row = rows.setdefault(key, {})
                row[col] = row.get(col, QI.zero) + (c if sign > 0 else -c)
        const = (0,) * len(vars)
        rows.setdefault(const, {})
        keys = sorted(rows)
        A = Matrix([[rows[k].get(j, QI.zero) for j in range(2 * nm)] for k in keys], QI)
        rhs = [QI.one if k == const else QI.zero for k in keys]
        x = solve_linear(A, rhs)
        if x is not None:
            h1 = Poly({mons[j]: x[j] for j in range(nm)}, vars)
            h2 = Poly({mons[j]: x[nm + j] for j in range(nm)}, vars)
            if a * h2 - b * h1 != one:
                raise ConsistencyError("Bezout solution does not satisfy the identity")
            return h1, h2
        if cap >= HARD_DEGREE_CAP:
            raise PreconditionError(
                f"no solution up to degree {HARD_DEGREE_CAP}; a and b probably share a zero")
        cap = min(HARD_DEGREE_CAP, max(1, cap * 2))


def first_row(ring: PolyRing | None = None):
    ring = ring or PolyRing(VARS)
    z, w = (ring.coerce(ring.parse(v)) for v in ring.vars)
    u = z * w
    a = (u - 1) * (u - 2)
    b = (u - 1) * z + (u - 2) * z * z
    return a, b


def build_example() -> Matrix:
    """The 2 x 2 polynomial matrix f(z, w) of determinant 1."""
    ring = PolyRing(VARS)
    a, b = first_row(ring)
    h1, h2 = bezout_second_row(a, b)
    f = Matrix([[a, b], [h1, h2]], ring)
    if det(f) != ring.one:
        raise ConsistencyError("example does not have determinant 1")
    return f


def restrict(p: Poly, c):
    """``p(z, c/z)`` as ``(q, s)`` meaning ``z^-s * q(z)`` with q a polynomial in z.

    Exact substitution on the hyperbola ``zw = c``: ``z^i w^j -> c^j z^(i-j)``.
    """
    if p.vars != VARS:
        raise PreconditionError(f"expected a polynomial in {VARS}, got {p.vars}")
    c = QI.coerce(c)
    laurent = {}
    for (i, j), coef in p.terms.items():
        k = i - j
        laurent[k] = laurent.get(k, QI.zero) + coef * c ** j
    laurent = {k: v for k, v in laurent.items() if not v.is_zero()}
    s = max([0] + [-k for k in laurent])
    return Poly({(k + s,): v for k, v in laurent.items()}, ("z",)), s


# --------------------------------------------------------------------------
# loops in C*
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LoopSamples:
    """Closed loop in C* sampled in order (the last point connects to the first)."""

    points: tuple

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise SamplingError("a loop needs at least two samples")
        for k, p in enumerate(pts):
            if p == 0:
                raise SamplingError(f"sample {k} is zero; the loop must avoid 0")

    def increments(self):
        pts = self.points
        n = len(pts)
        return [cmath.phase(pts[(k + 1) % n] / pts[k]) for k in range(n)]

    def __mul__(self, other):
        if len(self.points) != len(other.points):
            raise SamplingError("loops have different sample counts")
        return LoopSamples(tuple(p * q for p, q in zip(self.points, other.points)))


def sample_loop(func, radius: float = 1.0, samples: int = 1024) -> LoopSamples:
    """Samples of ``func`` on the circle ``|theta| = radius``."""
    if radius <= 0:
        raise PreconditionError("radius must be positive")
    if samples < 2:
        raise PreconditionError("need at least two samples")
    thetas = [radius * cmath.exp(2j * math.pi * k / samples) for k in range(samples)]
    return LoopSamples(tuple(func(t) for t in thetas))


def winding_number(loop: LoopSamples) -> int:
    """Degree of a sampled loop around 0 (principal-branch argument increments)."""
    total = 0.0
    for k, d in enumerate(loop.increments()):
        if abs(d) >= math.pi * (1 - 1e-9):
            raise SamplingError(f"argument jump of {d:.3f} rad after sample {k}; resample finer")
        total += d
    return round(total / (2 * math.pi))


# --------------------------------------------------------------------------
# the degree argument
# --------------------------------------------------------------------------


@dataclass
class ObstructionReport:
    degree_start: int
    degree_end: int
    curve: str
    obstructed: bool
    xi: tuple = ()
    curve_distance: float = 0.0
    radius: float = 1.0
    samples: int = 1024

    def __post_init__(self):
        if self.obstructed != (self.degree_start != self.degree_end):
            raise ConsistencyError("obstructed must equal degree_start != degree_end")

    def to_json(self) -> dict:
        d = asdict(self)
        d["xi"] = list(self.xi)
        return d


def gamma(t: float) -> float:
    return 1.0 + t


def _g2_loop(b: Poly, c: complex, radius: float, samples: int) -> LoopSamples:
    """theta -> b(theta, c / theta): the forced value of g2 along ``zw = c``."""
    coeffs = [(i, j, complex(v)) for (i, j), v in b.terms.items()]

    def f(theta):
        w = c / theta
        return sum(v * theta ** i * w ** j for i, j, v in coeffs)

    return sample_loop(f, radius, samples)


def degree_obstruction_check(radius: float = 1.0, samples: int = 1024) -> ObstructionReport:
    """Degrees of the forced g2 on ``zw = gamma(0) = 1`` and ``zw = gamma(1) = 2``."""
    if radius <= 0:
        raise PreconditionError("radius must be positive")
    if samples < 64:
        raise PreconditionError("use at least 64 samples")
    _, b = first_row()
    d0 = winding_number(_g2_loop(b, gamma(0.0), radius, samples))
    d1 = winding_number(_g2_loop(b, gamma(1.0), radius, samples))
    # gamma must avoid the roots of (D - 1)(D - 2) = 1, where g2 could vanish
    xi = ((3 - math.sqrt(5)) / 2, (3 + math.sqrt(5)) / 2)
    ts = [k / 1000 for k in range(1001)]
    dist = min(abs(gamma(t) - x) for t in ts for x in xi)
    if dist <= 0:
        raise ConsistencyError("connecting curve passes through a root")
    return ObstructionReport(d0, d1, "gamma(t) = 1 + t, t in [0, 1]", d0 != d1,
                             xi, dist, radius, samples)


def loops_csv(path_or_file, radius: float = 1.0, samples: int = 1024):
    """Write the two boundary loops as CSV (loop, k, theta_re, theta_im, value_re, value_im)."""
    _, b = first_row()
    thetas = [radius * cmath.exp(2j * math.pi * k / samples) for k in range(samples)]
    rows = []
    for name, c in (("t0", gamma(0.0)), ("t1", gamma(1.0))):
        loop = _g2_loop(b, c, radius, samples)
        for k, (th, v) in enumerate(zip(thetas, loop.points)):
            rows.append((name, k, th.real, th.imag, v.real, v.imag))
    header = ("loop", "k", "theta_re", "theta_im", "value_re", "value_im")
    if hasattr(path_or_file, "write"):
        wr = csv.writer(path_or_file)
        wr.writerow(header)
        wr.writerows(rows)
    else:
        with open(path_or_file, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(header)
            wr.writerows(rows)
    return len(rows)
