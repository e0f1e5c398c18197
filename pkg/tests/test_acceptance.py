"""Acceptance criteria, each under its stated runtime limit.

Every criterion prints one line ``ACCEPTANCE <k> PASS|FAIL ...`` to the
terminal (visible with or without ``-s``).  Corpora are seeded so runs are
reproducible.
"""

from time import perf_counter

import pytest

from sympfact.expfact import (commutant_blocks, exp_factor_sp, group_exponentials,
                              is_nilpotent, nilpotent_exp, nilpotent_log, offdiag_blocks_vanish)
from sympfact.matrix import Matrix, det, is_sp_lie_algebra, is_symplectic
from sympfact.obstruction import build_example, degree_obstruction_check, first_row, restrict
from sympfact.randgen import (rand_chain, rand_nilpotent, rand_poly_sl2_word, rand_sl2,
                              rand_sp, rand_symmetric, rand_unipotent, rng_of)
from sympfact.ring import QI, Poly
from sympfact.selftest import (check_one_parameter, check_symplectic_closure, check_winding,
                               check_word_homomorphism)
from sympfact.sl2fact import UnitriFactorization, sl2_4factor_field, sl2_euclid_factor
from sympfact.spfact import unitriangular_factor_sp
from sympfact.sympgen import (eval_word, expand_type_i_to_elementary, expand_type_ii_to_elementary,
                              make_factor, type_i, type_ii)

SEED = 20240917


@pytest.fixture
def criterion(request, capsys):
    """Run ``body`` under a time limit and print one pass/fail line."""

    def run(number, title, limit, body):
        t0 = perf_counter()
        error = None
        try:
            detail = body()
        except AssertionError as exc:
            detail, error = None, exc
        dt = perf_counter() - t0
        ok = error is None and (limit is None or dt < limit)
        bound = f"limit {limit:g} s" if limit is not None else "no limit"
        note = f" [{detail}]" if detail else ""
        why = "" if ok else (f" ({error})" if error else " (too slow)")
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'} {title}: "
                  f"{dt:.2f} s, {bound}{note}{why}")
        if error is not None:
            raise error
        assert ok, f"criterion {number} took {dt:.2f} s, limit {limit} s"

    return run


@pytest.fixture(scope="module")
def sp4_corpus():
    rng = rng_of(SEED + 2)
    return [rand_sp(rng, 2, 10) for _ in range(100)]


def test_01_sl2_four_factors(criterion):
    def body():
        rng = rng_of(SEED + 1)
        for _ in range(1000):
            M = rand_sl2(rng, 10 ** 6)
            f = sl2_4factor_field(M)
            assert f.count == 4 and f.sides == ["lower", "upper", "lower", "upper"]
            assert f.product() == M and f.verify()
        return "1000 matrices, 4 factors each"

    criterion(1, "SL2 four-factor bound", 5, body)


def test_02_tavgen_count(criterion, sp4_corpus):
    def body():
        rng = rng_of(SEED + 3)
        corpus = sp4_corpus + [rand_sp(rng, 3, 10) for _ in range(25)]
        for M in corpus:
            f = unitriangular_factor_sp(M)
            assert f.count == 4
            c = f.checks(symplectic=True)
            assert c["product"] and c["alternating"] and all(c["side_checks"]) and c["symplectic"]
        return "100 Sp4 + 25 Sp6, 4 factors each"

    criterion(2, "symplectic factor count", 60, body)


def test_03_exponential_count(criterion):
    def body():
        rng = rng_of(SEED + 4)
        cases = 0
        for t in range(2, 7):
            for k in range(100):
                symp = k % 2 == 1
                chain = rand_chain(rng, t, 4 if symp else 3, symplectic=symp,
                                   start=("lower", "upper")[k % 4 // 2])
                target = Matrix.identity(4 if symp else 3, QI)
                for _, m in chain:
                    target = target @ m
                f = UnitriFactorization(tuple(chain), target,
                                        basis="Jtilde" if symp else "standard")
                assert f.verify(symplectic=symp)
                e = group_exponentials(f)
                assert e.count == t // 2 + 1
                assert all(is_nilpotent(N) for N in e.exponents)
                assert e.product() == target
                if symp:
                    assert all(is_sp_lie_algebra(N) for N in e.exponents)
                cases += 1
        return f"{cases} chains, t = 2..6, half symplectic"

    criterion(3, "exponential count floor(t/2)+1", 30, body)


def test_04_three_exponentials(criterion, sp4_corpus):
    def body():
        for M in sp4_corpus:
            e = exp_factor_sp(M)
            assert e.count == 3 and e.product() == M
            assert all(is_sp_lie_algebra(N) for N in e.exponents)
        return "100 Sp4, 3 exponents each"

    criterion(4, "three exponentials in Sp4", 60, body)


def test_05_log_exp_roundtrip(criterion):
    def body():
        rng = rng_of(SEED + 5)
        for k in range(500):
            n = 2 + k % 5
            U = rand_unipotent(rng, n)
            assert nilpotent_exp(nilpotent_log(U)) == U
            N = rand_nilpotent(rng, n)
            assert nilpotent_log(nilpotent_exp(N)) == N
        return "500 unipotent and 500 nilpotent, sizes 2..6"

    criterion(5, "log/exp roundtrip", 10, body)


def test_06_elementary_count(criterion):
    def body():
        rng = rng_of(SEED + 6)
        for n in (2, 3, 4):
            bound = n * (n + 1) // 2
            B = rand_symmetric(rng, n)
            for expand, factor in ((expand_type_i_to_elementary, type_i),
                                   (expand_type_ii_to_elementary, type_ii)):
                w = expand(B)
                assert len(w) == bound and eval_word(w, QI) == make_factor(factor(B))
            for _ in range(10):
                S = rand_symmetric(rng, n, density=0.4)
                w = expand_type_i_to_elementary(S)
                assert len(w) <= bound and eval_word(w, QI) == make_factor(type_i(S))
        return "n = 2, 3, 4 dense and sparse"

    criterion(6, "elementary generation count n(n+1)/2", 1, body)


def test_07_obstruction(criterion):
    def body():
        f = build_example()
        assert det(f) == f.ring.one
        _, b = first_row()
        assert f[0, 1] == b
        z = Poly.var("z", ("z",))
        assert restrict(b, 1) == (-(z * z), 0)
        assert restrict(b, 2) == (z, 0)
        r = degree_obstruction_check(samples=1024)
        assert (r.degree_start, r.degree_end) == (2, 1) and r.obstructed
        return "degrees 2 and 1, obstructed"

    criterion(7, "degree obstruction", 1, body)


def test_08_commutant(criterion):
    def body():
        dims = []
        for n, m in ((3, 3), (4, 2)):
            basis = commutant_blocks(n, m)
            assert len(basis) == (n - 2) ** 2 + 2
            assert all(offdiag_blocks_vanish(S, n - 2) for S in basis)
            dims.append(len(basis))
        return f"dimensions {dims[0]} and {dims[1]}"

    criterion(8, "commutant lemma", 5, body)


def test_09_euclid_roundtrip(criterion):
    def body():
        rng = rng_of(SEED + 9)
        for _ in range(100):
            M = rand_poly_sl2_word(rng, 8, 3)
            f = sl2_euclid_factor(M)
            assert f.product() == M and f.verify()
        return "100 words over Q(i)[z]"

    criterion(9, "Euclidean SL2 roundtrip", 30, body)


def test_10_invariant_suites(criterion):
    def body():
        cases = 0
        for seed in range(5):
            cases += check_symplectic_closure(SEED + seed)
            cases += check_word_homomorphism(SEED + seed)
            cases += check_winding(SEED + seed)
            cases += check_one_parameter(SEED + seed)
        # closure spot check on the shared corpus
        rng = rng_of(SEED + 10)
        A, B = rand_sp(rng, 2, 10), rand_sp(rng, 2, 10)
        assert is_symplectic(A @ B)
        return f"{cases} randomized cases, zero failures"

    criterion(10, "invariant suites", None, body)
