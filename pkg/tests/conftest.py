"""Shared fixtures, hypothesis strategies and sympy oracles."""

import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import strategies as st

from sympfact.matrix import Matrix
from sympfact.ring import QI, Poly, RatFn, Scalar

# -- sympy oracles ------------------------------------------------------------


def sym(x):
    """sympy value of a Scalar, Poly or Matrix (independent of our arithmetic)."""
    if isinstance(x, Scalar):
        return sp.Rational(x.re.numerator, x.re.denominator) + sp.I * sp.Rational(
            x.im.numerator, x.im.denominator)
    if isinstance(x, Poly):
        syms = sp.symbols(x.vars) if x.vars else ()
        out = sp.Integer(0)
        for e, c in x.terms.items():
            t = sym(c)
            for s, k in zip(syms, e):
                t *= s ** k
            out += t
        return sp.expand(out)
    if isinstance(x, RatFn):
        return sym(x.num) / sym(x.den)
    if isinstance(x, Matrix):
        return sp.Matrix(x.rows, x.cols, [sym(e) for e in x.entries])
    if isinstance(x, (int, Fraction)):
        return sp.nsimplify(x)
    raise TypeError(type(x))


def sym_equal(a, b) -> bool:
    d = sp.simplify(sp.expand(a - b))
    return d == 0 if not isinstance(d, sp.MatrixBase) else d.is_zero_matrix


def M(rows, ring=QI):
    return Matrix(rows, ring)


# -- hypothesis strategies ----------------------------------------------------

small_fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
scalars = st.builds(Scalar, small_fractions, small_fractions)
nonzero_scalars = scalars.filter(lambda s: not s.is_zero())


@st.composite
def polys(draw, vars=("z",), max_degree=3, max_terms=4):
    n = len(vars)
    exps = st.tuples(*[st.integers(0, max_degree)] * n)
    terms = draw(st.dictionaries(exps, scalars, max_size=max_terms))
    return Poly(terms, vars)


@st.composite
def matrices(draw, n, elements=scalars):
    return Matrix.from_flat(n, n, draw(st.lists(elements, min_size=n * n, max_size=n * n)), QI)


# -- fixtures -----------------------------------------------------------------


@pytest.fixture
def rng():
    return random.Random(20240917)
