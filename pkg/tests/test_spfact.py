import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import M, scalars
from sympfact.errors import DimensionError, PreconditionError, UnsupportedRingError
from sympfact.matrix import Matrix, is_symplectic, is_unitriangular
from sympfact.randgen import rand_scalar, rand_sp, rand_sp_word, rand_symmetric, rng_of
from sympfact.ring import QI, PolyRing, Scalar
from sympfact.sl2fact import sl2_4factor_field
from sympfact.spfact import (RootElement, RootSystemA, build_Cn, direct_split4, eval_root_word,
                             levi_split, symplectic_gauss, tavgen_absorb, to_fundamental_word,
                             unitriangular_factor_sl, unitriangular_factor_sp)
from sympfact.sympgen import (GenWord, basis_change_to_Jtilde, eval_token, eval_word,
                              expand_type_ii_to_elementary, make_factor, sp_short, type_i,
                              type_ii, type_iii)


def assert_sp_factorization(f, M):
    assert f.count == 4 and f.starts_lower
    assert f.product() == M
    for side, V in f.factors:
        assert is_symplectic(V)
        assert is_unitriangular(basis_change_to_Jtilde(V), side)
    assert f.verify()


class TestRootSystem:
    def test_c1(self):
        rs = build_Cn(1)
        assert sorted(rs.roots) == [(-2,), (2,)]

    def test_c2(self):
        rs = build_Cn(2)
        assert len(rs.roots) == 8
        assert len(rs.delta(1)) == 2 and len(rs.delta(2)) == 2

    def test_c3(self):
        rs = build_Cn(3)
        assert len(rs.roots) == 18 and len(rs.delta(3)) == 6

    def test_n_zero(self):
        with pytest.raises((ValueError, PreconditionError)):
            build_Cn(0)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_coefficients_and_partition(self, n):
        rs = build_Cn(n)
        assert len(rs.roots) == 2 * n * n
        for a in rs.roots:
            ks = rs.coeff(a)
            assert all(k >= 0 for k in ks) or all(k <= 0 for k in ks)
        for r in (1, n):
            parts = [set(rs.delta(r)), set(rs.sigma(r, 1)), set(rs.sigma(r, -1))]
            assert sum(map(len, parts)) == len(rs.roots)
            assert set().union(*parts) == set(rs.roots)

    @pytest.mark.parametrize("rs", [build_Cn(2), build_Cn(3), RootSystemA(4)])
    def test_one_parameter_subgroups(self, rs, rng):
        for a in rs.roots:
            r, s = rand_scalar(rng), rand_scalar(rng)
            X = rs.element(a, r)
            assert X @ rs.element(a, s) == rs.element(a, r + s)
            assert rs.support(X) == ({a} if not r.is_zero() else set())
            if rs.kind == "C":
                assert is_symplectic(X)


class TestGauss:
    def test_identity(self):
        assert len(symplectic_gauss(Matrix.identity(4))) == 0

    def test_type_ii(self, rng):
        C = rand_symmetric(rng, 3)
        w = symplectic_gauss(make_factor(type_ii(C)))
        assert len(w) <= 6
        assert w == expand_type_ii_to_elementary(C)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_random_roundtrip(self, n, rng):
        for _ in range(10):
            A = rand_sp(rng, n, 10)
            assert eval_word(symplectic_gauss(A), QI) == A

    def test_non_symplectic(self):
        with pytest.raises(PreconditionError):
            symplectic_gauss(M([[1, 1], [1, 2]]) @ M([[2, 0], [0, 1]]))

    def test_polynomial_rejected(self):
        with pytest.raises(UnsupportedRingError):
            symplectic_gauss(Matrix.identity(2, PolyRing(("z",))))


class TestFundamentalWord:
    def test_already_fundamental(self):
        rs = build_Cn(2)
        word = [RootElement((1, -1), Scalar(3), rs), RootElement((0, -2), Scalar(2), rs)]
        toks = GenWord(2, "sp", tuple(e.token for e in word))
        assert to_fundamental_word(toks, rs) == word

    def test_short_root(self):
        rs = build_Cn(2)
        r = Scalar(2, 1)
        w = GenWord(2, "sp", (sp_short(1, 2, r),))
        fw = to_fundamental_word(w, rs)
        assert len(fw) <= 7
        assert all(rs.is_fundamental(e.root) for e in fw)
        assert eval_root_word(fw, rs) == eval_token(sp_short(1, 2, r), 2)

    def test_empty(self):
        assert to_fundamental_word(GenWord(3, "sp", ()), build_Cn(3)) == []

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            to_fundamental_word(GenWord(2, "sp", ()), build_Cn(3))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10 ** 6), st.integers(1, 3))
    def test_evaluation_preserved(self, seed, n):
        w = rand_sp_word(rng_of(seed), n, 6)
        rs = build_Cn(n)
        fw = to_fundamental_word(w, rs)
        assert all(rs.is_fundamental(e.root) for e in fw)
        assert eval_root_word(fw, rs) == eval_word(w, QI)


class TestLeviSplit:
    def test_identity(self):
        rs = build_Cn(2)
        I = Matrix.identity(4)
        assert levi_split(I, 2, rs) == (I, I)

    @pytest.mark.parametrize("n", [2, 3])
    def test_upper_block_decomposition(self, n, rng):
        rs = build_Cn(n)
        A = Matrix.from_flat(n, n, [Scalar(1) if i == j else (rand_scalar(rng) if i < j else Scalar(0))
                                    for i in range(n) for j in range(n)], QI)
        D, S = make_factor(type_iii(A)), make_factor(type_i(rand_symmetric(rng, n)))
        VD, VS = levi_split(D @ S, n, rs)
        assert (VD, VS) == (D, S)

    def test_radical_element(self, rng):
        rs = build_Cn(2)
        S = make_factor(type_i(rand_symmetric(rng, 2)))
        assert levi_split(S, 2, rs) == (Matrix.identity(4), S)

    @pytest.mark.parametrize("r", [1, 3])
    def test_reassembly(self, r, rng):
        rs = build_Cn(3)
        for side in ("upper", "lower"):
            V = eval_word(rand_sp_word(rng, 3, 8, side=side), QI)
            VD, VS = levi_split(V, r, rs)
            assert VD @ VS == V
            sigma = set(rs.sigma(r, 1 if side == "upper" else -1))
            assert rs.support(VS) <= sigma


class TestAbsorb:
    def test_empty_word(self):
        f = tavgen_absorb([], build_Cn(2))
        assert all(V.is_identity() for V in f.matrices) and f.count == 4

    def test_two_generators(self):
        rs = build_Cn(2)
        word = [RootElement((1, -1), Scalar(1), rs), RootElement((0, 2), Scalar(2), rs)]
        f = tavgen_absorb(word, rs, check=True)
        assert_sp_factorization(f, rs.element((1, -1), 1) @ rs.element((0, 2), 2))

    def test_gauss_word_sp6(self, rng):
        rs = build_Cn(3)
        A = rand_sp(rng, 3, 10)
        fw = to_fundamental_word(symplectic_gauss(A), rs)
        f = tavgen_absorb(fw, rs, target=A, check=True)
        assert_sp_factorization(f, A)
        assert len(f.metrics) >= 1 and all("bits" in m for m in f.metrics)
        assert f.metrics[0]["regrouped"]

    def test_literal_absorption(self):
        # short Gauss words are absorbed run by run with the invariant checked each step
        rs = build_Cn(2)
        for seed in (1, 2):
            A = rand_sp(rng_of(seed), 2, 4)
            fw = to_fundamental_word(symplectic_gauss(A), rs)
            f = tavgen_absorb(fw, rs, target=A, check=True, max_runs=None)
            assert_sp_factorization(f, A)
            assert len(f.metrics) > 1 and not f.metrics[0]["regrouped"]

    def test_polynomial_rejected(self):
        with pytest.raises(UnsupportedRingError):
            tavgen_absorb([], build_Cn(2), ring=PolyRing(("z",)))

    def test_unknown_root(self):
        with pytest.raises(PreconditionError):
            tavgen_absorb([((3, 0), Scalar(1))], build_Cn(2))

    @pytest.mark.parametrize("n", [2, 3])
    def test_direct_split_of_delta_element(self, n, rng):
        rs = build_Cn(n)
        sub = rs.subsystem(n)
        A = rand_sp(rng, n, 8)
        h = sub.restrict(A)       # GL block, any determinant
        g = sub.embed(h)
        out = direct_split4(rs, g)
        assert out[0] @ out[1] @ out[2] @ out[3] == g


class TestUnitriangularFactorSp:
    def test_identity(self):
        f = unitriangular_factor_sp(Matrix.identity(4))
        assert f.count == 4 and all(V.is_identity() for V in f.matrices)

    def test_type_i(self, rng):
        B = rand_symmetric(rng, 2)
        T = make_factor(type_i(B))
        f = unitriangular_factor_sp(T)
        assert_sp_factorization(f, T)
        assert f.matrices[0].is_identity()

    @pytest.mark.parametrize("n, count", [(1, 20), (2, 20), (3, 5)])
    def test_random(self, n, count, rng):
        for _ in range(count):
            A = rand_sp(rng, n, 10)
            assert_sp_factorization(unitriangular_factor_sp(A, check=True), A)

    def test_sl2_agrees_for_n1(self, rng):
        for _ in range(10):
            A = rand_sp(rng, 1, 6)
            f = unitriangular_factor_sp(A)
            assert_sp_factorization(f, A)
            assert sl2_4factor_field(A).product() == A

    def test_gauss_word_option(self, rng):
        A = rand_sp(rng, 2, 4)
        assert_sp_factorization(unitriangular_factor_sp(A, word="gauss"), A)
        with pytest.raises(ValueError):
            unitriangular_factor_sp(A, word="magic")

    def test_rejections(self):
        with pytest.raises(PreconditionError):
            unitriangular_factor_sp(M([[2, 0], [0, 1]]))
        with pytest.raises(DimensionError):
            unitriangular_factor_sp(Matrix.identity(3))

    @settings(max_examples=10, deadline=None)
    @given(st.lists(scalars, min_size=3, max_size=3))
    def test_three_generator_words(self, params):
        rs = build_Cn(2)
        roots = [(1, -1), (0, 2), (-1, 1)]
        A = eval_root_word([RootElement(a, r, rs) for a, r in zip(roots, params)], rs)
        assert_sp_factorization(unitriangular_factor_sp(A), A)


class TestUnitriangularFactorSl:
    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_random(self, m, rng):
        for _ in range(5):
            A = Matrix.identity(m)
            for _ in range(8):
                i, j = rng.sample(range(m), 2)
                A = A @ (Matrix.identity(m) + Matrix.unit(m, i, j, rand_scalar(rng)))
            f = unitriangular_factor_sl(A, check=True)
            assert f.count == 4 and f.verify() and f.product() == A

    def test_det_not_one(self):
        with pytest.raises(PreconditionError):
            unitriangular_factor_sl(M([[2, 0], [0, 1]]))
