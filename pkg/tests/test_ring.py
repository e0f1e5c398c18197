from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import nonzero_scalars, polys, scalars, sym, sym_equal
from sympfact.errors import (DimensionError, DivisionByZero, NotDivisibleError, ParseError)
from sympfact.ring import (QI, Poly, PolyRing, RatFn, RatFnField, Scalar, format_scalar,
                           parse_poly, parse_scalar, poly_euclid_div, ring_from_descriptor)

z, w = Poly.gens(("z", "w"))
(zz,) = Poly.gens(("z",))


class TestScalar:
    def test_conjugate_product(self):
        assert Scalar(1, 1) * Scalar(1, -1) == Scalar(2)

    def test_inverse_of_i(self):
        assert Scalar(0, 1).inverse() == Scalar(0, -1)

    def test_conjugate_sum(self):
        a = Scalar(Fraction(1, 2), Fraction(1, 3))
        assert a + a.conjugate() == Scalar(1)

    def test_division_by_zero(self):
        with pytest.raises(DivisionByZero):
            Scalar(0).inverse()
        with pytest.raises(ZeroDivisionError):
            Scalar(1) / 0

    def test_canonical_form(self):
        s = Scalar(Fraction(2, 4), Fraction(-6, 8))
        assert (s.re, s.im) == (Fraction(1, 2), Fraction(-3, 4))
        assert s.triple() == (2, -3, 4)
        assert hash(Scalar(Fraction(1, 2))) == hash(Scalar(Fraction(2, 4)))

    def test_huge_exact(self):
        big = Scalar(10 ** 60 + 1, -(10 ** 55))
        assert big * big.inverse() == Scalar(1)

    @pytest.mark.parametrize("text, value", [
        ("3/4", Scalar(Fraction(3, 4))),
        ("1/2+2/3*i", Scalar(Fraction(1, 2), Fraction(2, 3))),
        ("i", Scalar(0, 1)),
        ("-i", Scalar(0, -1)),
        ("-5/3*i", Scalar(0, Fraction(-5, 3))),
        ("2-i", Scalar(2, -1)),
        ("0", Scalar(0)),
    ])
    def test_text_form(self, text, value):
        assert parse_scalar(text) == value
        assert parse_scalar(format_scalar(value)) == value

    def test_format_omits_zero_parts(self):
        assert format_scalar(Scalar(0, 1)) == "i"
        assert format_scalar(Scalar(Fraction(1, 2))) == "1/2"
        assert format_scalar(Scalar(Fraction(1, 2), Fraction(-1, 3))) == "1/2-1/3*i"

    @pytest.mark.parametrize("bad", ["1/", "2**", "z", "(1", "1 $ 2", ""])
    def test_parse_errors(self, bad):
        with pytest.raises((ParseError, ValueError)):
            parse_scalar(bad)

    @given(scalars, scalars, scalars)
    def test_field_axioms(self, a, b, c):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + Scalar(0) == a and a * Scalar(1) == a
        assert a - a == Scalar(0)

    @given(nonzero_scalars, scalars)
    def test_division_against_sympy(self, a, b):
        assert a * a.inverse() == Scalar(1)
        assert sym_equal(sym(b / a), sym(b) / sym(a))

    @given(scalars)
    def test_text_roundtrip(self, a):
        assert parse_scalar(format_scalar(a)) == a


class TestPoly:
    def test_exact_div(self):
        assert (z * z * w - z * w).exact_div(z * w) == z - 1

    def test_first_row_vanishes(self):
        a = (z * w - 1) * (z * w - 2)
        assert a.eval([1, 1]) == 0
        assert a.eval({"z": 1, "w": 2}) == 0

    def test_not_divisible(self):
        with pytest.raises(NotDivisibleError):
            (zz + 1).exact_div(zz)

    def test_zero_coefficients_dropped(self):
        p = Poly({(1,): 0, (0,): 3}, ("z",))
        assert p.terms == {(0,): Scalar(3)}
        assert (zz - zz).is_zero()

    def test_exponent_length_checked(self):
        with pytest.raises(DimensionError):
            Poly({(1, 2): 1}, ("z",))

    @pytest.mark.parametrize("p, q, quo, rem", [
        (zz ** 2 + 1, zz, zz, Poly.const(1)),
        (zz, zz ** 2, Poly.const(0), zz),
        (zz ** 3 - 1, zz - 1, zz ** 2 + zz + 1, Poly.const(0)),
    ])
    def test_euclid_div(self, p, q, quo, rem):
        assert poly_euclid_div(p, q) == (quo, rem)

    def test_euclid_div_errors(self):
        with pytest.raises(DivisionByZero):
            poly_euclid_div(zz, Poly.const(0))
        with pytest.raises(DimensionError):
            poly_euclid_div(z, w)

    def test_parse_and_format(self):
        p = parse_poly("3/2*z^2*w - (1+i)*z + 1", ("z", "w"))
        assert p == Scalar(Fraction(3, 2)) * z * z * w - Scalar(1, 1) * z + 1
        assert parse_poly(str(p), ("z", "w")) == p
        # graded lex, largest first
        assert str(z + z * z * w + 1) == "z^2*w+z+1"

    def test_subs(self):
        p = z * z + w
        assert p.subs({"w": z}) == z * z + z

    @given(polys(("z", "w")), polys(("z", "w")), polys(("z", "w")))
    def test_ring_axioms(self, p, q, r):
        assert (p + q) * r == p * r + q * r
        assert (p * q) * r == p * (q * r)
        assert p * q == q * p

    @given(polys(("z", "w")), polys(("z", "w")))
    def test_exact_div_of_product(self, p, q):
        if not q.is_zero():
            assert (p * q).exact_div(q) == p

    @given(polys(("z", "w")), polys(("z", "w")), scalars, scalars)
    def test_eval_homomorphism(self, p, q, x, y):
        assert (p * q).eval([x, y]) == p.eval([x, y]) * q.eval([x, y])
        assert (p + q).eval([x, y]) == p.eval([x, y]) + q.eval([x, y])

    @given(polys(("z", "w")), polys(("z", "w")))
    def test_product_against_sympy(self, p, q):
        assert sym_equal(sym(p * q), sym(p) * sym(q))

    @settings(max_examples=50)
    @given(polys(max_degree=6, max_terms=6), polys(max_degree=4))
    def test_euclid_reconstruction(self, p, q):
        if q.is_zero():
            return
        quo, rem = poly_euclid_div(p, q)
        assert q * quo + rem == p
        assert rem.is_zero() or rem.degree() < q.degree()
        squo, srem = sp.div(sym(p), sym(q), sp.Symbol("z"))
        assert sym_equal(sym(quo), squo) and sym_equal(sym(rem), srem)

    @given(polys(("z", "w")))
    def test_text_roundtrip(self, p):
        assert parse_poly(str(p), ("z", "w")) == p


class TestRatFn:
    def test_cross_multiplicative_equality(self):
        a = RatFn(z * w, z)
        assert a == RatFn(w)
        assert RatFn(z * z - 1, z - 1) == RatFn(z + 1)

    def test_zero_denominator(self):
        with pytest.raises(DivisionByZero):
            RatFn(z, Poly.const(0, ("z", "w")))

    def test_field_ops(self):
        F = RatFnField(("z", "w"))
        a = F.coerce(z) / F.coerce(w + 1)
        assert a * a.inverse() == F.one
        assert a - a == F.zero

    @given(polys(("z", "w")), polys(("z", "w")), polys(("z", "w")))
    def test_field_axioms(self, p, q, r):
        if q.is_zero() or r.is_zero():
            return
        x, y = RatFn(p, q), RatFn(q, r)
        assert x * y == RatFn(p, r)
        assert (x + y) - y == x


class TestDescriptors:
    @pytest.mark.parametrize("ring", [QI, PolyRing(("z",)), PolyRing(("z", "w")), RatFnField(("g",))])
    def test_descriptor_roundtrip(self, ring):
        assert ring_from_descriptor(ring.descriptor()) == ring

    def test_descriptor_strings(self):
        assert ring_from_descriptor("gaussian") == QI
        assert ring_from_descriptor({"kind": "poly", "vars": "z,w"}) == PolyRing(("z", "w"))
        with pytest.raises(ParseError):
            ring_from_descriptor({"kind": "octonion"})

    @given(st.integers(-50, 50))
    def test_coerce_ints(self, k):
        assert QI.coerce(k) == Scalar(k)
        assert PolyRing(("z",)).coerce(k) == Poly.const(k)
