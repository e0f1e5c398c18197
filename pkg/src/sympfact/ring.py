"""Exact coefficient rings.

Three kinds of ring elements live here:

* :class:`Scalar` -- Gaussian rationals ``re + im*i`` with ``re, im`` in Q.
* :class:`Poly` -- sparse multivariate polynomials over the Gaussian rationals.
* :class:`RatFn` -- quotients of two :class:`Poly` (not reduced to lowest terms).

plus light-weight ring descriptors (:data:`QI`, :class:`PolyRing`,
:class:`RatFnField`) used by :mod:`sympfact.matrix` to know what zero, one and
division mean for the entries of a matrix.

Everything is immutable and exact.
"""

from __future__ import annotations

import re as _re
from fractions import Fraction
from math import gcd

from .errors import DivisionByZero, NotDivisibleError, ParseError, DimensionError

__all__ = [
    "Scalar", "Poly", "RatFn",
    "GaussianField", "PolyRing", "RatFnField", "QI",
    "ring_of", "ring_from_descriptor",
    "parse_scalar", "parse_poly", "format_scalar",
    "poly_euclid_div",
]


# --------------------------------------------------------------------------
# Gaussian rationals
# --------------------------------------------------------------------------


class Scalar:
    """An element ``(a + b*i) / d`` of Q(i).

    Internally a single positive common denominator is kept, with
    ``gcd(a, b, d) == 1``.  The public ``re`` and ``im`` attributes are reduced
    :class:`fractions.Fraction` values.

    >>> Scalar(1, 1) * Scalar(1, -1)
    Scalar('2')
    >>> Scalar(0, 1).inverse()
    Scalar('-i')
    """

    __slots__ = ("_a", "_b", "_d")

    def __init__(self, re=0, im=0):
        if isinstance(re, str):
            if im != 0:
                raise TypeError("string input takes no imaginary part")
            s = parse_scalar(re)
            self._a, self._b, self._d = s._a, s._b, s._d
            return
        if isinstance(re, Scalar) and im == 0:
            self._a, self._b, self._d = re._a, re._b, re._d
            return
        fr = _to_fraction(re)
        fi = _to_fraction(im)
        d = fr.denominator * fi.denominator // gcd(fr.denominator, fi.denominator)
        a = fr.numerator * (d // fr.denominator)
        b = fi.numerator * (d // fi.denominator)
        g = gcd(gcd(a, b), d)
        self._a, self._b, self._d = a // g, b // g, d // g

    @classmethod
    def _raw(cls, a, b, d):
        # caller guarantees d > 0 and gcd(a, b, d) == 1
        s = object.__new__(cls)
        s._a = a
        s._b = b
        s._d = d
        return s

    @classmethod
    def _make(cls, a, b, d):
        if d < 0:
            a, b, d = -a, -b, -d
        g = gcd(gcd(a, b), d)
        if g != 1:
            a //= g
            b //= g
            d //= g
        return cls._raw(a, b, d)

    @property
    def re(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._b, self._d)

    def triple(self):
        """``(a, b, d)`` with value ``(a + b*i)/d``."""
        return self._a, self._b, self._d

    def is_zero(self) -> bool:
        return self._a == 0 and self._b == 0

    def is_one(self) -> bool:
        return self._a == 1 and self._b == 0 and self._d == 1

    def is_real(self) -> bool:
        return self._b == 0

    def __bool__(self):
        return not self.is_zero()

    def bitsize(self) -> int:
        return max(self._a.bit_length(), self._b.bit_length(), self._d.bit_length())

    # arithmetic ----------------------------------------------------------

    def __add__(self, other):
        o = _as_scalar(other)
        if o is NotImplemented:
            return NotImplemented
        if self._d == o._d:
            return Scalar._make(self._a + o._a, self._b + o._b, self._d)
        d1, d2 = self._d, o._d
        return Scalar._make(self._a * d2 + o._a * d1, self._b * d2 + o._b * d1, d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(-self._a, -self._b, self._d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = _as_scalar(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _as_scalar(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = _as_scalar(other)
        if o is NotImplemented:
            return NotImplemented
        a, b, d = self._a, self._b, self._d
        c, e, f = o._a, o._b, o._d
        return Scalar._make(a * c - b * e, a * e + b * c, d * f)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        a, b, d = self._a, self._b, self._d
        if a == 0 and b == 0:
            raise DivisionByZero("inverse of zero in Q(i)")
        n = a * a + b * b
        return Scalar._make(d * a, -d * b, n)

    def __truediv__(self, other):
        o = _as_scalar(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _as_scalar(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "Scalar":
        return Scalar._raw(self._a, -self._b, self._d)

    def __complex__(self):
        return complex(self._a / self._d, self._b / self._d)

    # comparison ------------------------------------------------------------

    def __eq__(self, other):
        o = _as_scalar(other)
        if o is NotImplemented:
            return NotImplemented
        return self._a == o._a and self._b == o._b and self._d == o._d

    def __hash__(self):
        if self._b == 0:
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    def __repr__(self):
        return f"Scalar({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


ZERO = Scalar._raw(0, 0, 1)
ONE = Scalar._raw(1, 0, 1)
I_UNIT = Scalar._raw(0, 1, 1)


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot build an exact rational from {type(x).__name__}")


def _as_scalar(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, int):
        return Scalar._raw(x, 0, 1)
    if isinstance(x, Fraction):
        return Scalar._raw(x.numerator, 0, x.denominator)
    return NotImplemented


def format_scalar(s: Scalar) -> str:
    """Text form ``a/b``, ``a/b+c/d*i``, ``i``, ``-1/2*i``; zero parts omitted."""
    re_, im_ = s.re, s.im
    if im_ == 0:
        return str(re_)
    if im_ == 1:
        ipart = "i"
    elif im_ == -1:
        ipart = "-i"
    else:
        ipart = f"{im_}*i"
    if re_ == 0:
        return ipart
    if ipart.startswith("-"):
        return f"{re_}{ipart}"
    return f"{re_}+{ipart}"


# --------------------------------------------------------------------------
# Polynomials
# --------------------------------------------------------------------------


def _grlex_key(e):
    return (sum(e), e)


class Poly:
    """Sparse polynomial over Q(i) in an ordered tuple of variables.

    ``terms`` maps exponent tuples to nonzero :class:`Scalar` coefficients.
    Iteration and printing use graded-lexicographic order, largest first.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, terms=None, vars=("z",)):
        vars = tuple(vars)
        n = len(vars)
        clean = {}
        if terms:
            for e, c in dict(terms).items():
                e = tuple(int(x) for x in e)
                if len(e) != n:
                    raise DimensionError(f"exponent {e} does not match variables {vars}")
                if any(x < 0 for x in e):
                    raise ValueError("negative exponent in polynomial")
                c = Scalar(c) if not isinstance(c, Scalar) else c
                if not c.is_zero():
                    clean[e] = c
        self.vars = vars
        self.terms = clean

    @classmethod
    def _raw(cls, terms, vars):
        p = object.__new__(cls)
        p.vars = vars
        p.terms = terms
        return p

    @classmethod
    def const(cls, c, vars=("z",)) -> "Poly":
        vars = tuple(vars)
        c = _as_scalar(c) if not isinstance(c, Scalar) else c
        if c is NotImplemented:
            raise TypeError("constant must be int, Fraction or Scalar")
        if c.is_zero():
            return cls._raw({}, vars)
        return cls._raw({(0,) * len(vars): c}, vars)

    @classmethod
    def var(cls, name, vars=("z",)) -> "Poly":
        vars = tuple(vars)
        e = tuple(1 if v == name else 0 for v in vars)
        if sum(e) != 1:
            raise ValueError(f"unknown variable {name!r} for {vars}")
        return cls._raw({e: ONE}, vars)

    @classmethod
    def gens(cls, vars):
        """All variables of the ring as polynomials, e.g. ``z, w = Poly.gens("zw")``."""
        vars = tuple(vars)
        return tuple(cls.var(v, vars) for v in vars)

    # predicates ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def is_unit(self) -> bool:
        return self.is_constant() and not self.is_zero()

    def constant_value(self) -> Scalar:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((0,) * len(self.vars), ZERO)

    def coeff(self, exps) -> Scalar:
        return self.terms.get(tuple(exps), ZERO)

    def degree(self, var=None) -> int:
        """Total degree, or the degree in ``var``; ``-1`` for the zero polynomial."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        k = self.vars.index(var) if isinstance(var, str) else var
        return max(e[k] for e in self.terms)

    def leading(self):
        """``(exponents, coefficient)`` of the graded-lex leading term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def bitsize(self) -> int:
        return max((c.bitsize() for c in self.terms.values()), default=0)

    # arithmetic -------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.vars != self.vars:
                raise DimensionError(f"variable mismatch {self.vars} vs {other.vars}")
            return other
        s = _as_scalar(other)
        if s is NotImplemented:
            return NotImplemented
        return Poly.const(s, self.vars)

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if not o.terms:
            return self
        t = dict(self.terms)
        for e, c in o.terms.items():
            v = t.get(e)
            if v is None:
                t[e] = c
            else:
                v = v + c
                if v.is_zero():
                    del t[e]
                else:
                    t[e] = v
        return Poly._raw(t, self.vars)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw({e: -c for e, c in self.terms.items()}, self.vars)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if not self.terms or not o.terms:
            return Poly._raw({}, self.vars)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                v = t.get(e)
                t[e] = c1 * c2 if v is None else v + c1 * c2
        return Poly._raw({e: c for e, c in t.items() if not c.is_zero()}, self.vars)

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        c = _as_scalar(c) if not isinstance(c, Scalar) else c
        if c.is_zero():
            return Poly._raw({}, self.vars)
        return Poly._raw({e: v * c for e, v in self.terms.items()}, self.vars)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = Poly.const(ONE, self.vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def exact_div(self, other) -> "Poly":
        """Quotient ``s`` with ``self == other * s``.

        Raises :class:`NotDivisibleError` when ``other`` does not divide ``self``.
        Works by repeated leading-term division in graded-lex order, which
        terminates with remainder zero exactly when the division is exact.
        """
        q = self._coerce(other)
        if q is NotImplemented:
            raise TypeError(f"cannot divide a polynomial by {type(other).__name__}")
        if q.is_zero():
            raise DivisionByZero("exact division by the zero polynomial")
        lq, cq = q.leading()
        cq_inv = cq.inverse()
        rem = self
        out = {}
        while rem.terms:
            lr, cr = rem.leading()
            if any(a < b for a, b in zip(lr, lq)):
                raise NotDivisibleError(f"{q} does not divide {self}", self, q)
            e = tuple(a - b for a, b in zip(lr, lq))
            c = cr * cq_inv
            out[e] = c
            rem = rem - q * Poly._raw({e: c}, self.vars)
        return Poly._raw(out, self.vars)

    def divides(self, other) -> bool:
        try:
            self._coerce(other).exact_div(self)
        except NotDivisibleError:
            return False
        return True

    def __truediv__(self, other):
        if isinstance(other, Poly):
            return self.exact_div(other)
        s = _as_scalar(other)
        if s is NotImplemented:
            return NotImplemented
        return self.scale(s.inverse())

    # evaluation --------------------------------------------------------------

    def eval(self, point) -> Scalar:
        """Substitute one Gaussian rational per variable (sequence or mapping)."""
        if isinstance(point, dict):
            try:
                vals = [point[v] for v in self.vars]
            except KeyError as exc:
                raise ValueError(f"missing value for variable {exc}") from None
        else:
            vals = list(point)
        if len(vals) != len(self.vars):
            raise DimensionError(f"need {len(self.vars)} values, got {len(vals)}")
        vals = [Scalar(v) if not isinstance(v, Scalar) else v for v in vals]
        powers = [{0: ONE, 1: v} for v in vals]

        def pw(k, e):
            cache = powers[k]
            if e not in cache:
                cache[e] = vals[k] ** e
            return cache[e]

        total = ZERO
        for e, c in self.terms.items():
            term = c
            for k, x in enumerate(e):
                if x:
                    term = term * pw(k, x)
            total = total + term
        return total

    def subs(self, mapping) -> "Poly":
        """Substitute polynomials (same variable tuple) for some variables."""
        result = Poly._raw({}, self.vars)
        gens = {v: mapping.get(v, Poly.var(v, self.vars)) for v in self.vars}
        for e, c in self.terms.items():
            term = Poly.const(c, self.vars)
            for v, x in zip(self.vars, e):
                if x:
                    term = term * gens[v] ** x
            result = result + term
        return result

    # comparison --------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.vars == other.vars and self.terms == other.terms
        s = _as_scalar(other)
        if s is NotImplemented:
            return NotImplemented
        if s.is_zero():
            return not self.terms
        return self.is_constant() and self.constant_value() == s

    def __hash__(self):
        if self.is_constant():
            return hash(self.constant_value())
        return hash((self.vars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"Poly({format_poly(self)!r}, vars={self.vars!r})"

    def __str__(self):
        return format_poly(self)


def _format_coeff(c: Scalar) -> str:
    s = format_scalar(c)
    if c.re != 0 and c.im != 0:
        return f"({s})"
    return s


def _format_monomial(e, vars) -> str:
    parts = []
    for v, x in zip(vars, e):
        if x == 1:
            parts.append(v)
        elif x > 1:
            parts.append(f"{v}^{x}")
    return "*".join(parts)


def format_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    chunks = []
    for e, c in p.sorted_terms():
        mono = _format_monomial(e, p.vars)
        if not mono:
            chunks.append(_format_coeff(c))
        elif c.is_one():
            chunks.append(mono)
        elif c == -1:
            chunks.append("-" + mono)
        else:
            chunks.append(f"{_format_coeff(c)}*{mono}")
    out = chunks[0]
    for ch in chunks[1:]:
        out += ch if ch.startswith("-") else "+" + ch
    return out


def poly_euclid_div(p: Poly, q: Poly):
    """Univariate division with remainder: ``p = q*quo + rem``, ``deg rem < deg q``."""
    if not isinstance(p, Poly) or not isinstance(q, Poly):
        raise TypeError("poly_euclid_div expects two Poly values")
    if p.vars != q.vars:
        raise DimensionError(f"variable mismatch {p.vars} vs {q.vars}")
    if len(p.vars) != 1:
        raise DimensionError(f"Euclidean division needs a univariate ring, got {p.vars}")
    if q.is_zero():
        raise DivisionByZero("Euclidean division by the zero polynomial")
    vars = p.vars
    dq = q.degree()
    lc_inv = q.terms[(dq,)].inverse()
    quo = {}
    rem = p
    while rem.terms and rem.degree() >= dq:
        dr = rem.degree()
        c = rem.terms[(dr,)] * lc_inv
        quo[(dr - dq,)] = c
        rem = rem - q * Poly._raw({(dr - dq,): c}, vars)
    return Poly._raw(quo, vars), rem


# --------------------------------------------------------------------------
# Rational functions
# --------------------------------------------------------------------------


class RatFn:
    """A quotient ``num / den`` of polynomials.

    No gcd cancellation is performed; only a constant denominator is folded into
    the numerator.  Equality is tested by cross multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, vars=None):
        if not isinstance(num, Poly):
            if vars is None:
                raise TypeError("vars required when num is not a Poly")
            num = Poly.const(_as_scalar(num) if not isinstance(num, Scalar) else num, vars)
        if den is None:
            den = Poly.const(ONE, num.vars)
        elif not isinstance(den, Poly):
            den = Poly.const(_as_scalar(den) if not isinstance(den, Scalar) else den, num.vars)
        if den.vars != num.vars:
            raise DimensionError("numerator and denominator use different variables")
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        if num.is_zero():
            den = Poly.const(ONE, num.vars)
        elif den.is_constant() and not den.constant_value().is_one():
            num = num.scale(den.constant_value().inverse())
            den = Poly.const(ONE, num.vars)
        self.num = num
        self.den = den

    @property
    def vars(self):
        return self.num.vars

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def _coerce(self, other):
        if isinstance(other, RatFn):
            if other.vars != self.vars:
                raise DimensionError("variable mismatch")
            return other
        if isinstance(other, Poly):
            return RatFn(self.num._coerce(other))
        s = _as_scalar(other)
        if s is NotImplemented:
            return NotImplemented
        return RatFn(Poly.const(s, self.vars))

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        if self.den == o.den:
            return RatFn(self.num + o.num, self.den)
        return RatFn(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFn(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.num.is_zero() or o.num.is_zero():
            return RatFn(Poly._raw({}, self.vars))
        return RatFn(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFn":
        if self.num.is_zero():
            raise DivisionByZero("inverse of the zero rational function")
        return RatFn(self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        return RatFn(self.num ** k, self.den ** k)

    def to_poly(self) -> Poly:
        """The polynomial equal to this quotient; raises if the division is not exact."""
        return self.num.exact_div(self.den)

    def eval(self, point) -> Scalar:
        d = self.den.eval(point)
        if d.is_zero():
            raise DivisionByZero("denominator vanishes at the evaluation point")
        return self.num.eval(point) / d

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num * o.den == o.num * self.den

    __hash__ = None

    def __repr__(self):
        return f"RatFn({self})"

    def __str__(self):
        if self.den == 1:
            return format_poly(self.num)
        return f"({format_poly(self.num)})/({format_poly(self.den)})"


# --------------------------------------------------------------------------
# Ring descriptors
# --------------------------------------------------------------------------


class GaussianField:
    """The field Q(i)."""

    kind = "gaussian"
    is_field = True
    vars = ()

    def __init__(self):
        self.zero = ZERO
        self.one = ONE

    def coerce(self, x) -> Scalar:
        if isinstance(x, Scalar):
            return x
        if isinstance(x, str):
            return parse_scalar(x)
        if isinstance(x, Poly) and x.is_constant():
            return x.constant_value()
        s = _as_scalar(x)
        if s is NotImplemented:
            raise TypeError(f"cannot coerce {x!r} into Q(i)")
        return s

    def contains(self, x) -> bool:
        return isinstance(x, Scalar)

    def exact_div(self, a, b):
        return a / b

    def is_unit(self, x) -> bool:
        return not x.is_zero()

    def parse(self, text: str) -> Scalar:
        return parse_scalar(text)

    def format(self, x) -> str:
        return format_scalar(x)

    def descriptor(self) -> dict:
        return {"kind": "gaussian"}

    def __eq__(self, other):
        return isinstance(other, GaussianField)

    def __hash__(self):
        return hash("gaussian")

    def __repr__(self):
        return "QI"


QI = GaussianField()


class PolyRing:
    """Q(i)[vars]."""

    kind = "poly"
    is_field = False

    def __init__(self, vars=("z",)):
        self.vars = tuple(vars)
        self.zero = Poly._raw({}, self.vars)
        self.one = Poly.const(ONE, self.vars)

    def coerce(self, x) -> Poly:
        if isinstance(x, Poly):
            if x.vars != self.vars:
                raise DimensionError(f"variable mismatch {x.vars} vs {self.vars}")
            return x
        if isinstance(x, str):
            return parse_poly(x, self.vars)
        if isinstance(x, RatFn):
            return x.to_poly()
        s = _as_scalar(x)
        if s is NotImplemented:
            raise TypeError(f"cannot coerce {x!r} into Q(i)[{','.join(self.vars)}]")
        return Poly.const(s, self.vars)

    def contains(self, x) -> bool:
        return isinstance(x, Poly) and x.vars == self.vars

    def gens(self):
        return Poly.gens(self.vars)

    def exact_div(self, a, b):
        return a.exact_div(b)

    def is_unit(self, x) -> bool:
        return x.is_unit()

    def parse(self, text: str) -> Poly:
        return parse_poly(text, self.vars)

    def format(self, x) -> str:
        return format_poly(x)

    def descriptor(self) -> dict:
        return {"kind": "poly", "vars": list(self.vars)}

    def __eq__(self, other):
        return isinstance(other, PolyRing) and other.vars == self.vars

    def __hash__(self):
        return hash(("poly", self.vars))

    def __repr__(self):
        return f"PolyRing({self.vars!r})"


class RatFnField:
    """The fraction field Q(i)(vars)."""

    kind = "ratfn"
    is_field = True

    def __init__(self, vars=("g",)):
        self.vars = tuple(vars)
        self.zero = RatFn(Poly._raw({}, self.vars))
        self.one = RatFn(Poly.const(ONE, self.vars))

    def coerce(self, x) -> RatFn:
        if isinstance(x, RatFn):
            if x.vars != self.vars:
                raise DimensionError("variable mismatch")
            return x
        if isinstance(x, str):
            if "/(" in x.replace(" ", ""):
                num, den = x.replace(" ", "").split(")/(", 1)
                return RatFn(parse_poly(num.lstrip("("), self.vars),
                             parse_poly(den.rstrip(")"), self.vars))
            return RatFn(parse_poly(x, self.vars))
        if isinstance(x, Poly):
            return RatFn(x)
        s = _as_scalar(x)
        if s is NotImplemented:
            raise TypeError(f"cannot coerce {x!r} into a rational function field")
        return RatFn(Poly.const(s, self.vars))

    def contains(self, x) -> bool:
        return isinstance(x, RatFn) and x.vars == self.vars

    def exact_div(self, a, b):
        return a / b

    def is_unit(self, x) -> bool:
        return not x.is_zero()

    def parse(self, text: str) -> RatFn:
        return self.coerce(text)

    def format(self, x) -> str:
        return str(x)

    def descriptor(self) -> dict:
        return {"kind": "ratfn", "vars": list(self.vars)}

    def __eq__(self, other):
        return isinstance(other, RatFnField) and other.vars == self.vars

    def __hash__(self):
        return hash(("ratfn", self.vars))

    def __repr__(self):
        return f"RatFnField({self.vars!r})"


def ring_of(x):
    """Ring descriptor for a single ring element."""
    if isinstance(x, Scalar):
        return QI
    if isinstance(x, Poly):
        return PolyRing(x.vars)
    if isinstance(x, RatFn):
        return RatFnField(x.vars)
    if isinstance(x, (int, Fraction)):
        return QI
    raise TypeError(f"{type(x).__name__} is not a ring element")


def ring_from_descriptor(d):
    """Inverse of ``ring.descriptor()``; also accepts the strings ``gaussian``/``poly``."""
    if isinstance(d, str):
        d = {"kind": d}
    kind = d.get("kind", "gaussian")
    if kind == "gaussian":
        return QI
    vars = d.get("vars") or ["z"]
    if isinstance(vars, str):
        vars = [v for v in vars.split(",") if v]
    if kind == "poly":
        return PolyRing(vars)
    if kind == "ratfn":
        return RatFnField(vars)
    raise ParseError(f"unknown ring kind {kind!r}")


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------

_TOKEN = _re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        if m.group(1) is not None:
            out.append(("num", int(m.group(1)), m.start(1)))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), m.start(2)))
        else:
            op = m.group(3)
            out.append(("op", "^" if op == "**" else op, m.start(3)))
        pos = m.end()
    return out


class _Parser:
    # expr := term (("+"|"-") term)*
    # term := unary (("*"|"/") unary)*
    # unary := ("+"|"-") unary | power
    # power := atom ("^" INT)?
    # atom := INT | "i" | VAR | "(" expr ")"

    def __init__(self, text, vars):
        self.text = text
        self.vars = tuple(vars)
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k] if self.k < len(self.toks) else None

    def take(self):
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input", self.text, len(self.text))
        self.k += 1
        return t

    def parse(self) -> Poly:
        if not self.toks:
            raise ParseError("empty expression", self.text, 0)
        p = self.expr()
        t = self.peek()
        if t is not None:
            raise ParseError(f"unexpected token {t[1]!r}", self.text, t[2])
        return p

    def expr(self):
        p = self.term()
        while (t := self.peek()) is not None and t[0] == "op" and t[1] in "+-":
            self.take()
            q = self.term()
            p = p + q if t[1] == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while (t := self.peek()) is not None and t[0] == "op" and t[1] in "*/":
            self.take()
            q = self.unary()
            if t[1] == "*":
                p = p * q
            else:
                if not q.is_constant() or q.is_zero():
                    raise ParseError("division only by nonzero constants", self.text, t[2])
                p = p.scale(q.constant_value().inverse())
        return p

    def unary(self):
        t = self.peek()
        if t is not None and t[0] == "op" and t[1] in "+-":
            self.take()
            p = self.unary()
            return -p if t[1] == "-" else p
        return self.power()

    def power(self):
        p = self.atom()
        t = self.peek()
        if t is not None and t[0] == "op" and t[1] == "^":
            self.take()
            e = self.take()
            if e[0] != "num":
                raise ParseError("exponent must be a non-negative integer", self.text, e[2])
            p = p ** e[1]
        return p

    def atom(self):
        t = self.take()
        kind, val, pos = t
        if kind == "num":
            return Poly.const(Scalar._raw(val, 0, 1), self.vars)
        if kind == "name":
            if val == "i":
                return Poly.const(I_UNIT, self.vars)
            if val in self.vars:
                return Poly.var(val, self.vars)
            raise ParseError(f"unknown variable {val!r}", self.text, pos)
        if val == "(":
            p = self.expr()
            close = self.take()
            if close[1] != ")":
                raise ParseError("expected ')'", self.text, close[2])
            return p
        raise ParseError(f"unexpected token {val!r}", self.text, pos)


def parse_poly(text: str, vars=("z",)) -> Poly:
    """Parse ``"3/2*z^2*w - (1+i)*z + 1"`` into a :class:`Poly` over ``vars``."""
    if not isinstance(text, str):
        raise ParseError(f"expected a string, got {type(text).__name__}")
    if "i" in vars:
        raise ValueError("'i' is reserved for the imaginary unit")
    return _Parser(text, vars).parse()


def parse_scalar(text) -> Scalar:
    """Parse ``"a/b"``, ``"a/b+c/d*i"``, ``"i"``, ... into a :class:`Scalar`."""
    if isinstance(text, (int, Fraction)):
        return _as_scalar(text)
    if isinstance(text, Scalar):
        return text
    p = parse_poly(text, ())
    return p.constant_value()
