"""Randomized property checks over every module, runnable without pytest.

Each check takes a seed, raises ``AssertionError`` on a failed property and
returns the number of cases it ran.
"""

from __future__ import annotations

import cmath
import time
import traceback
from concurrent.futures import ProcessPoolExecutor

from .expfact import (exp_factor_sp, group_exponentials, nilpotent_exp, nilpotent_log)
from .matrix import Matrix, det, is_symplectic, mat_inverse, symplectic_inverse
from .obstruction import (LoopSamples, build_example, degree_obstruction_check, restrict,
                          sample_loop, winding_number)
from .randgen import (rand_chain, rand_nilpotent, rand_poly_sl2_word, rand_scalar, rand_sl2,
                      rand_sp_word, rand_symmetric, rand_unipotent, rng_of)
from .ring import QI, Poly, poly_euclid_div
from .sl2fact import UnitriFactorization, sl2_4factor_field, sl2_euclid_factor
from .spfact import (RootSystemA, build_Cn, eval_root_word, to_fundamental_word,
                     unitriangular_factor_sp)
from .sympgen import eval_word, expand_type_i_to_elementary, make_factor, type_i


def check_field_axioms(seed):
    rng = rng_of(seed)
    for _ in range(200):
        a, b, c = (rand_scalar(rng) for _ in range(3))
        assert (a + b) * c == a * c + b * c
        assert (a * b) * c == a * (b * c)
        if not a.is_zero():
            assert a * a.inverse() == QI.one
    return 200


def check_poly_division(seed):
    rng = rng_of(seed)
    from .randgen import rand_poly
    for _ in range(100):
        p, q = rand_poly(rng, 4), rand_poly(rng, 3)
        if q.is_zero():
            continue
        assert (p * q).exact_div(q) == p
        quo, rem = poly_euclid_div(p, q)
        assert quo * q + rem == p and rem.degree() < q.degree()
    return 100


def check_det_multiplicative(seed):
    rng = rng_of(seed)
    from .randgen import rand_invertible
    for _ in range(50):
        n = rng.randint(1, 4)
        A = rand_invertible(rng, n) + rand_nilpotent(rng, n)
        B = rand_invertible(rng, n)
        assert det(A @ B) == det(A) * det(B)
        if not det(A).is_zero():
            assert A @ mat_inverse(A) == Matrix.identity(n, QI)
    return 50


def check_sl2_field(seed):
    rng = rng_of(seed)
    for _ in range(200):
        M = rand_sl2(rng, 1000)
        f = sl2_4factor_field(M)
        assert f.count == 4 and f.verify()
    return 200


def check_sl2_euclid(seed):
    rng = rng_of(seed)
    for _ in range(20):
        M = rand_poly_sl2_word(rng, 6, 2)
        assert sl2_euclid_factor(M).verify()
    return 20


def check_symplectic_closure(seed):
    rng = rng_of(seed)
    for _ in range(30):
        n = rng.randint(1, 3)
        A = eval_word(rand_sp_word(rng, n, 6), QI)
        B = eval_word(rand_sp_word(rng, n, 6), QI)
        assert is_symplectic(A @ B) and is_symplectic(symplectic_inverse(A))
        assert A @ symplectic_inverse(A) == Matrix.identity(2 * n, QI)
    return 30


def check_word_homomorphism(seed):
    rng = rng_of(seed)
    for _ in range(30):
        n = rng.randint(1, 3)
        w1, w2 = rand_sp_word(rng, n, 5), rand_sp_word(rng, n, 5)
        assert eval_word(w1 + w2, QI) == eval_word(w1, QI) @ eval_word(w2, QI)
        assert (eval_word(w1 + w1.inverse(), QI)).is_identity()
    return 30


def check_one_parameter(seed):
    rng = rng_of(seed)
    count = 0
    for rs in (build_Cn(2), build_Cn(3), RootSystemA(3)):
        for a in rs.roots:
            r, s = rand_scalar(rng), rand_scalar(rng)
            assert rs.element(a, r) @ rs.element(a, s) == rs.element(a, r + s)
            count += 1
    return count


def check_fundamental_word(seed):
    rng = rng_of(seed)
    for _ in range(10):
        n = rng.randint(2, 3)
        w = rand_sp_word(rng, n, 6)
        rs = build_Cn(n)
        fw = to_fundamental_word(w, rs)
        assert all(rs.is_fundamental(e.root) for e in fw)
        assert eval_root_word(fw, rs) == eval_word(w, QI)
    return 10


def check_expansion_count(seed):
    rng = rng_of(seed)
    for n in (2, 3, 4):
        B = rand_symmetric(rng, n)
        w = expand_type_i_to_elementary(B)
        assert len(w) == n * (n + 1) // 2
        assert eval_word(w, QI) == make_factor(type_i(B))
    return 3


def check_sp_factor(seed):
    rng = rng_of(seed)
    for n in (2, 2, 2, 3):
        M = eval_word(rand_sp_word(rng, n, 10), QI)
        f = unitriangular_factor_sp(M)
        assert f.count == 4 and f.verify()
    return 4


def check_exp_grouping(seed):
    rng = rng_of(seed)
    count = 0
    for t in range(1, 7):
        for symp in (False, True):
            chain = rand_chain(rng, t, 4, symplectic=symp)
            prod = Matrix.identity(4, QI)
            for _, m in chain:
                prod = prod @ m
            basis = "Jtilde" if symp else "standard"
            f = UnitriFactorization(tuple(chain), prod, basis=basis)
            e = group_exponentials(f)
            assert e.count == (t // 2 + 1 if t >= 2 else 1)
            assert e.verify(symplectic=symp)
            count += 1
    M = eval_word(rand_sp_word(rng, 2, 8), QI)
    assert exp_factor_sp(M).verify()
    return count + 1


def check_log_exp(seed):
    rng = rng_of(seed)
    for _ in range(30):
        n = rng.randint(2, 5)
        U = rand_unipotent(rng, n)
        assert nilpotent_exp(nilpotent_log(U)) == U
        N = rand_nilpotent(rng, n)
        assert nilpotent_log(nilpotent_exp(N)) == N
    return 30


def check_winding(seed):
    rng = rng_of(seed)
    for _ in range(20):
        k1, k2 = rng.randint(-3, 3), rng.randint(-3, 3)
        c1, c2 = complex(rng.uniform(0.5, 2), rng.uniform(-1, 1)), complex(1, rng.uniform(-1, 1))
        f = sample_loop(lambda t: c1 * t ** k1, 1.0, 256)
        g = sample_loop(lambda t: c2 * t ** k2, 1.0, 256)
        assert winding_number(f) == k1 and winding_number(g) == k2
        assert winding_number(f * g) == k1 + k2
    const = LoopSamples(tuple(cmath.exp(0j) for _ in range(8)))
    assert winding_number(const) == 0
    return 20


def check_obstruction(seed):
    f = build_example()
    assert det(f) == f.ring.one
    b = f[0, 1]
    z = Poly.var("z", ("z",))
    assert restrict(b, 1) == (-(z * z), 0) and restrict(b, 2) == (z, 0)
    r = degree_obstruction_check()
    assert (r.degree_start, r.degree_end, r.obstructed) == (2, 1, True)
    return 1


CHECKS = {
    "field_axioms": check_field_axioms,
    "poly_division": check_poly_division,
    "det_multiplicative": check_det_multiplicative,
    "sl2_field": check_sl2_field,
    "sl2_euclid": check_sl2_euclid,
    "symplectic_closure": check_symplectic_closure,
    "word_homomorphism": check_word_homomorphism,
    "one_parameter": check_one_parameter,
    "fundamental_word": check_fundamental_word,
    "expansion_count": check_expansion_count,
    "sp_factor": check_sp_factor,
    "exp_grouping": check_exp_grouping,
    "log_exp": check_log_exp,
    "winding": check_winding,
    "obstruction": check_obstruction,
}


def _run_one(name, seed):
    t = time.perf_counter()
    try:
        cases = CHECKS[name](seed)
        return {"check": name, "ok": True, "cases": cases,
                "seconds": round(time.perf_counter() - t, 3)}
    except Exception as exc:  # report every failure, keep going
        return {"check": name, "ok": False, "error": f"{type(exc).__name__}: {exc}",
                "traceback": traceback.format_exc(limit=3),
                "seconds": round(time.perf_counter() - t, 3)}


def run_selftest(seed: int = 0, parallel: bool = False, only=None) -> dict:
    names = [n for n in CHECKS if only is None or n in only]
    if parallel:
        with ProcessPoolExecutor() as ex:
            results = list(ex.map(_run_one, names, [seed] * len(names)))
    else:
        results = [_run_one(n, seed) for n in names]
    return {"seed": seed, "ok": all(r["ok"] for r in results), "results": results}
