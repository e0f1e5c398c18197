from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import M, sym
from sympfact.errors import ParseError, PreconditionError
from sympfact.expfact import (ExpFactorization, commutant_blocks, conjugate_exponent,
                              exp_factor_sp, exp_from_json, exp_to_json, gaussian_root,
                              gl_to_sl_reduce, group_exponentials, is_nilpotent, nilpotent_exp,
                              nilpotent_log, offdiag_blocks_vanish, unipotent_inverse)
from sympfact.matrix import Matrix, is_sp_lie_algebra, is_symplectic, mat_inverse
from sympfact.randgen import (rand_chain, rand_invertible, rand_nilpotent, rand_sp,
                              rand_symmetric, rand_unipotent, rng_of)
from sympfact.ring import Scalar
from sympfact.sl2fact import L, U, UnitriFactorization
from sympfact.sympgen import make_factor, type_i, type_ii

HALF = Scalar(Fraction(1, 2))


def chain_fact(chain, basis="standard"):
    P = Matrix.identity(chain[0][1].rows)
    for _, m in chain:
        P = P @ m
    return UnitriFactorization(tuple(chain), P, basis=basis)


class TestLogExp:
    def test_log_2x2(self):
        assert nilpotent_log(M([[1, 1], [0, 1]])) == M([[0, 1], [0, 0]])

    def test_log_3x3(self):
        U3 = M([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
        expected = M([[0, 1, -HALF], [0, 0, 1], [0, 0, 0]])
        assert nilpotent_log(U3) == expected
        assert nilpotent_exp(expected) == U3

    def test_log_identity(self):
        assert nilpotent_log(Matrix.identity(3)).is_zero()

    def test_exp_examples(self):
        assert nilpotent_exp(Matrix.zeros(3)) == Matrix.identity(3)
        assert nilpotent_exp(M([[0, 1], [0, 0]])) == M([[1, 1], [0, 1]])

    def test_against_sympy(self, rng):
        for n in (2, 3, 4):
            N = rand_nilpotent(rng, n)
            S = sym(N)
            series = sum((S ** k / sp.factorial(k) for k in range(1, n)), sp.eye(n))
            assert sym(nilpotent_exp(N)) == sp.expand(series)

    def test_errors(self):
        with pytest.raises(PreconditionError):
            nilpotent_log(M([[2, 0], [0, 1]]))
        with pytest.raises(PreconditionError):
            nilpotent_exp(M([[1, 0], [0, 0]]))
        assert not is_nilpotent(M([[0, 1], [1, 0]]))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10 ** 6), st.integers(2, 6))
    def test_roundtrips(self, seed, n):
        rng = rng_of(seed)
        U_ = rand_unipotent(rng, n)
        assert nilpotent_exp(nilpotent_log(U_)) == U_
        N = rand_nilpotent(rng, n)
        assert nilpotent_log(nilpotent_exp(N)) == N

    def test_unipotent_inverse(self, rng):
        U_ = rand_unipotent(rng, 5)
        assert unipotent_inverse(U_) == mat_inverse(U_)

    def test_sp_lie_exp_is_symplectic(self, rng):
        B = rand_symmetric(rng, 3)
        Z = Matrix.zeros(3)
        N = Matrix.block([[Z, B], [Z, Z]])
        assert is_sp_lie_algebra(N) and is_symplectic(nilpotent_exp(N))
        P = rand_sp(rng, 3, 6)
        C = conjugate_exponent(P, N)
        assert is_sp_lie_algebra(C) and is_symplectic(nilpotent_exp(C))


class TestConjugation:
    def test_identity(self, rng):
        N = rand_nilpotent(rng, 3)
        assert conjugate_exponent(Matrix.identity(3), N) == N

    def test_diagonal(self):
        B = M([[2, 0], [0, HALF]])
        assert conjugate_exponent(B, M([[0, 1], [0, 0]])) == M([[0, 4], [0, 0]])

    def test_zero(self, rng):
        assert conjugate_exponent(rand_invertible(rng, 3), Matrix.zeros(3)).is_zero()

    def test_identity_law(self, rng):
        for _ in range(10):
            B, N = rand_invertible(rng, 4), rand_nilpotent(rng, 4)
            assert nilpotent_exp(conjugate_exponent(B, N)) == B @ nilpotent_exp(N) @ mat_inverse(B)

    def test_singular(self):
        with pytest.raises(Exception):
            conjugate_exponent(M([[1, 1], [1, 1]]), M([[0, 1], [0, 0]]))


class TestGrouping:
    def test_t3_example(self):
        f = chain_fact([("lower", L(1)), ("upper", U(1)), ("lower", L(1))])
        e = group_exponentials(f)
        assert e.exponents == [M([[-1, 1], [-1, 1]]), M([[0, 0], [2, 0]])]
        assert e.product() == M([[2, 1], [3, 2]]) and e.verify()

    def test_t1(self):
        f = chain_fact([("upper", U(5))])
        e = group_exponentials(f)
        assert e.exponents == [M([[0, 5], [0, 0]])]

    def test_conjugation_identities(self, rng):
        # U1 U2 U3 = (U1 U2 U1^-1)(U1 U3), and the five-factor version
        Us = [m for _, m in rand_chain(rng, 5, 3)]
        inv = mat_inverse
        e3 = group_exponentials(chain_fact(rand_chain(rng, 3, 3)))
        assert e3.verify()
        e5 = group_exponentials(chain_fact(list(zip(["lower", "upper"] * 3, Us))))
        U1, U2, U3, U4, U5 = Us
        pieces = [U1 @ U2 @ inv(U1), U1 @ U3 @ U4 @ inv(U3) @ inv(U1), U1 @ U3 @ U5]
        assert [nilpotent_exp(N) for N in e5.exponents] == pieces

    @pytest.mark.parametrize("t", [2, 3, 4, 5, 6])
    @pytest.mark.parametrize("symplectic", [False, True])
    def test_counts(self, t, symplectic, rng):
        for _ in range(5):
            chain = rand_chain(rng, t, 4, symplectic=symplectic)
            e = group_exponentials(chain_fact(chain, "Jtilde" if symplectic else "standard"))
            assert e.count == t // 2 + 1
            checks = e.checks(symplectic)
            assert all(checks.values())
            if symplectic:
                assert checks["sp_lie_algebra"]

    def test_non_alternating(self):
        with pytest.raises(PreconditionError):
            group_exponentials(chain_fact([("lower", L(1)), ("lower", L(2))]))

    def test_trim(self):
        f = chain_fact([("lower", L(0)), ("upper", U(2)), ("lower", L(0))])
        assert group_exponentials(f).count == 2
        assert group_exponentials(f, trim=True).count == 1


class TestExpFactorSp:
    def test_identity(self):
        e = exp_factor_sp(Matrix.identity(4))
        assert e.count == 3 and all(N.is_zero() for N in e.exponents)
        assert exp_factor_sp(Matrix.identity(4), trim=True).count == 0

    @pytest.mark.parametrize("n, length", [(1, 10), (2, 10), (3, 4)])
    def test_random(self, n, length, rng):
        for _ in range(3):
            A = rand_sp(rng, n, length)
            e = exp_factor_sp(A)
            assert e.count == 3 and e.verify()
            assert all(is_sp_lie_algebra(N) for N in e.exponents)

    def test_type_ii_leading_zeros(self, rng):
        T = make_factor(type_ii(rand_symmetric(rng, 2)))
        e = exp_factor_sp(T)
        assert e.exponents[0].is_zero() and e.exponents[1].is_zero()
        assert e.exponents[2] == nilpotent_log(T)

    def test_type_i(self, rng):
        T = make_factor(type_i(rand_symmetric(rng, 2)))
        e = exp_factor_sp(T)
        assert e.count == 3 and e.verify()
        assert sum(not N.is_zero() for N in e.exponents) == 1

    def test_non_symplectic(self):
        with pytest.raises(PreconditionError):
            exp_factor_sp(M([[2, 0], [0, 1]]))

    def test_tampered(self, rng):
        e = exp_factor_sp(rand_sp(rng, 2, 6))
        bad = ExpFactorization([e.exponents[0].scale(2)] + e.exponents[1:], e.target)
        assert not bad.checks()["product"] or e.exponents[0].is_zero()

    def test_json_roundtrip(self, rng):
        e = exp_factor_sp(rand_sp(rng, 2, 6))
        d = exp_to_json(e)
        assert exp_to_json(exp_from_json(d)) == d
        with pytest.raises(ParseError):
            exp_from_json({"target": d["target"]})


class TestGlToSl:
    def test_scalar_matrix(self):
        assert gl_to_sl_reduce(M([[2, 0], [0, 2]])) == (Scalar(2), Matrix.identity(2))

    def test_given_root(self):
        lam, S = gl_to_sl_reduce(M([[1, 0], [0, 4]]), 2)
        assert lam == 2 and S == M([[HALF, 0], [0, 2]])

    def test_no_root(self):
        with pytest.raises(PreconditionError, match="field extension"):
            gl_to_sl_reduce(M([[1, 0], [0, 2]]))

    def test_wrong_root(self):
        with pytest.raises(PreconditionError):
            gl_to_sl_reduce(M([[1, 0], [0, 4]]), 3)

    def test_gaussian_roots(self):
        assert gaussian_root(Scalar(0, 2), 2) ** 2 == Scalar(0, 2)
        assert gaussian_root(Scalar(-4), 2) ** 2 == Scalar(-4)
        assert gaussian_root(Scalar(Fraction(8, 27)), 3) == Scalar(Fraction(2, 3))
        assert gaussian_root(Scalar(2), 2) is None

    def test_random_cubes(self, rng):
        from sympfact.matrix import det
        for _ in range(10):
            A = rand_invertible(rng, 3).scale(Scalar(rng.randint(1, 5), rng.randint(-3, 3)))
            lam, S = gl_to_sl_reduce(A)
            assert det(S) == 1 and lam ** 3 == det(A)


class TestCommutant:
    @pytest.mark.parametrize("n, m, dim", [(3, 3, 3), (4, 2, 6), (5, Scalar(2, 1), 11)])
    def test_dimension_and_blocks(self, n, m, dim):
        basis = commutant_blocks(n, m)
        assert len(basis) == dim == (n - 2) ** 2 + 2
        assert all(offdiag_blocks_vanish(S, n - 2) for S in basis)

    def test_commutes(self):
        basis = commutant_blocks(3, 3)
        F = basis[0].ring
        g = F.parse("g")
        T = Matrix([[3, 0, 0], [0, g, 1], [0, 0, 1]], F)
        for S in basis:
            assert S @ T == T @ S

    @pytest.mark.parametrize("m", [0, 1])
    def test_excluded_values(self, m):
        with pytest.raises(PreconditionError):
            commutant_blocks(3, m)

    def test_small_n(self):
        with pytest.raises(PreconditionError):
            commutant_blocks(2, 3)
