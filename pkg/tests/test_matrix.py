import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import M, matrices, sym, sym_equal
from sympfact.errors import DimensionError, NotInvertibleError, ParseError
from sympfact.matrix import (Matrix, det, is_sp_lie_algebra, is_symplectic, is_unitriangular,
                             label_index, mat_inverse, matrix_from_json, matrix_to_json,
                             nullspace, solve_linear, symplectic_form, symplectic_inverse)
from sympfact.obstruction import build_example
from sympfact.randgen import rand_invertible, rand_sp, rand_symmetric
from sympfact.ring import QI, Poly, PolyRing, Scalar
from sympfact.sympgen import basis_change_to_Jtilde, make_factor, type_iii

P1 = PolyRing(("z",))
(z,) = Poly.gens(("z",))


def block_upper(B):
    n = B.rows
    return Matrix.block([[Matrix.identity(n), B], [Matrix.zeros(n), Matrix.identity(n)]])


class TestProducts:
    def test_identity(self, rng):
        A = rand_invertible(rng, 3)
        assert Matrix.identity(3) @ A == A == A @ Matrix.identity(3)

    def test_hand_product(self):
        assert M([[1, 1], [0, 1]]) @ M([[1, 0], [1, 1]]) == M([[2, 1], [1, 1]])

    def test_J_squared(self):
        J = symplectic_form(1).gram
        assert J @ J == -Matrix.identity(2)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            M([[1, 2]]) @ M([[1, 2]])

    def test_polynomial_product(self):
        A = Matrix([[1, z], [0, 1]], P1)
        assert A @ A == Matrix([[1, z + z], [0, 1]], P1)

    @settings(max_examples=30)
    @given(matrices(3), matrices(3))
    def test_product_against_sympy(self, A, B):
        assert sym_equal(sym(A @ B), sym(A) * sym(B))


class TestInverseDet:
    def test_inverse_identity(self):
        assert mat_inverse(Matrix.identity(4)) == Matrix.identity(4)

    def test_inverse_unitriangular_poly(self):
        assert mat_inverse(Matrix([[1, z], [0, 1]], P1)) == Matrix([[1, -z], [0, 1]], P1)

    def test_inverse_adjugate(self):
        assert mat_inverse(M([[2, 3], [1, 2]])) == M([[2, -3], [-1, 2]])

    def test_singular(self):
        with pytest.raises(NotInvertibleError) as info:
            mat_inverse(M([[1, 2], [2, 4]]))
        assert info.value.det == 0
        with pytest.raises(NotInvertibleError) as info:
            mat_inverse(Matrix([[z, 0], [0, 1]], P1))
        assert info.value.det == z

    def test_det_examples(self):
        assert det(Matrix.identity(4)) == 1
        assert det(symplectic_form(2).gram) == 1
        f = build_example()
        assert det(f) == f.ring.one

    def test_det_non_square(self):
        with pytest.raises(DimensionError):
            det(M([[1, 2]]))

    @settings(max_examples=30)
    @given(st.integers(1, 4).flatmap(matrices))
    def test_det_against_sympy(self, A):
        assert sym_equal(sym(det(A)), sym(A).det())

    @settings(max_examples=30)
    @given(st.integers(1, 4).flatmap(matrices))
    def test_inverse_roundtrip(self, A):
        if det(A).is_zero():
            return
        assert A @ mat_inverse(A) == Matrix.identity(A.rows)

    def test_poly_det_against_sympy(self):
        w = Poly.var("w", ("z", "w"))
        zz = Poly.var("z", ("z", "w"))
        R = PolyRing(("z", "w"))
        A = Matrix([[zz, w, 1], [zz * w, 1, zz], [2, w * w, zz + w]], R)
        assert sym_equal(sym(det(A)), sym(A).det())


class TestSymplecticPredicates:
    def test_identity(self):
        assert is_symplectic(Matrix.identity(4))

    def test_type_i(self, rng):
        B = rand_symmetric(rng, 2)
        assert is_symplectic(block_upper(B))

    def test_asymmetric_block(self):
        assert not is_symplectic(block_upper(M([[0, 1], [0, 0]])))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            is_symplectic(Matrix.identity(3))
        with pytest.raises(DimensionError):
            is_symplectic(Matrix.identity(4), symplectic_form(1))

    def test_forms(self):
        J = symplectic_form(2).gram
        Jt = symplectic_form(2, "Jtilde").gram
        for G in (J, Jt):
            assert G.T == -G and det(G) == 1
        L = M([[0, 1], [1, 0]])
        assert Jt.submatrix([0, 1], [2, 3]) == L

    def test_label_convention(self):
        assert [label_index(k, 3) for k in (1, 2, 3, -1, -2, -3)] == [0, 1, 2, 3, 4, 5]
        with pytest.raises(IndexError):
            label_index(4, 3)

    def test_jtilde_preserves_symplecticity(self, rng):
        A = rand_sp(rng, 3)
        assert is_symplectic(basis_change_to_Jtilde(A), "Jtilde")

    def test_lie_algebra(self):
        assert is_sp_lie_algebra(Matrix.zeros(4))
        Z = Matrix.zeros(2)
        sym_b = Matrix.block([[Z, M([[1, 2], [2, 3]])], [Z, Z]])
        assert is_sp_lie_algebra(sym_b)
        asym = Matrix.block([[Z, M([[0, 1], [-1, 0]])], [Z, Z]])
        assert not is_sp_lie_algebra(asym)

    def test_closure(self, rng):
        for _ in range(20):
            A, B = rand_sp(rng, 2), rand_sp(rng, 2)
            assert is_symplectic(A @ B)
            assert is_symplectic(symplectic_inverse(A))
            assert symplectic_inverse(A) == mat_inverse(A)

    def test_symplectic_det_is_one(self, rng):
        for n in (1, 2, 3):
            assert det(rand_sp(rng, n)) == 1


class TestUnitriangular:
    def test_identity_both_sides(self):
        assert is_unitriangular(Matrix.identity(3), "upper")
        assert is_unitriangular(Matrix.identity(3), "lower")

    def test_two_by_two(self):
        A = M([[1, 5], [0, 1]])
        assert is_unitriangular(A, "upper") and not is_unitriangular(A, "lower")

    def test_type_iii_needs_jtilde(self):
        A = M([[1, 1], [0, 1]])
        T = make_factor(type_iii(A))
        assert not is_unitriangular(T, "upper") and not is_unitriangular(T, "lower")
        assert is_unitriangular(basis_change_to_Jtilde(T), "upper")

    def test_bad_side(self):
        with pytest.raises(ValueError):
            is_unitriangular(Matrix.identity(2), "left")


class TestLinearAlgebra:
    def test_nullspace_against_sympy(self, rng):
        A = M([[1, 2, 3, 4], [2, 4, 6, 8], [0, 1, Scalar(0, 1), 0]])
        basis = nullspace(A)
        assert len(basis) == len(sym(A).nullspace())
        for v in basis:
            assert all(x.is_zero() for x in (A @ Matrix([[x] for x in v])).entries)

    def test_solve_linear(self):
        A = M([[1, 1], [1, -1]])
        assert solve_linear(A, [2, 0]) == [Scalar(1), Scalar(1)]
        assert solve_linear(M([[1, 1], [1, 1]]), [1, 2]) is None


class TestJson:
    def test_roundtrip_gaussian(self, rng):
        A = rand_invertible(rng, 3)
        d = matrix_to_json(A)
        assert matrix_from_json(json.loads(json.dumps(d))) == A
        assert matrix_to_json(matrix_from_json(d)) == d

    def test_roundtrip_poly(self):
        f = build_example()
        d = matrix_to_json(f)
        assert d["ring"] == {"kind": "poly", "vars": ["z", "w"]}
        assert matrix_from_json(d) == f

    def test_bare_list(self):
        assert matrix_from_json([[1, "1/2"], ["i", 0]]) == M([[1, Scalar(Fraction(1, 2))], [Scalar(0, 1), 0]])

    @pytest.mark.parametrize("bad", [
        {"rows": 2},
        {"entries": [[1, 2], [3]]},
        {"entries": [[1.5]]},
        {"entries": [[True]]},
        {"entries": "x"},
        {"rows": 3, "cols": 1, "entries": [[1]]},
    ])
    def test_malformed(self, bad):
        with pytest.raises(ParseError):
            matrix_from_json(bad)

    def test_ring_descriptor_respected(self):
        A = matrix_from_json({"ring": {"kind": "poly", "vars": ["z"]}, "entries": [["z+1"]]})
        assert A.ring == P1 and A[0, 0] == z + 1
        assert QI != A.ring
