"""Exact unitriangular and exponential factorization of SL2 and symplectic matrices."""

from .errors import (ConsistencyError, DimensionError, NotDivisibleError, NotInvertibleError,
                     ParseError, PreconditionError, SamplingError, SympFactError,
                     UnsupportedRingError)
from .expfact import (ExpFactorization, commutant_blocks, exp_factor_sp, gl_to_sl_reduce,
                      group_exponentials, nilpotent_exp, nilpotent_log)
from .kernels import BACKEND
from .matrix import (Matrix, det, is_sp_lie_algebra, is_symplectic, mat_inverse,
                     matrix_from_json, matrix_to_json, symplectic_form, symplectic_inverse)
from .obstruction import ObstructionReport, build_example, degree_obstruction_check, winding_number
from .ring import QI, Poly, PolyRing, RatFn, RatFnField, Scalar, parse_poly, parse_scalar
from .sl2fact import (L, U, UnitriFactorization, phi4, sl2_4factor_field, sl2_4factor_poly_try,
                      sl2_euclid_factor)
from .spfact import (build_Cn, tavgen_absorb, to_fundamental_word, unitriangular_factor_sl,
                     unitriangular_factor_sp)
from .sympgen import GenToken, GenWord, eval_word, expand_type_i_to_elementary, make_factor

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ConsistencyError", "DimensionError", "ExpFactorization", "GenToken", "GenWord",
    "L", "Matrix", "NotDivisibleError", "NotInvertibleError", "ObstructionReport", "ParseError",
    "Poly", "PolyRing", "PreconditionError", "QI", "RatFn", "RatFnField", "SamplingError",
    "Scalar", "SympFactError", "U", "UnitriFactorization", "UnsupportedRingError",
    "build_Cn", "build_example", "commutant_blocks", "degree_obstruction_check", "det",
    "eval_word", "exp_factor_sp", "expand_type_i_to_elementary", "gl_to_sl_reduce",
    "group_exponentials", "is_sp_lie_algebra", "is_symplectic", "make_factor", "mat_inverse",
    "matrix_from_json", "matrix_to_json", "nilpotent_exp", "nilpotent_log", "parse_poly",
    "parse_scalar", "phi4", "sl2_4factor_field", "sl2_4factor_poly_try", "sl2_euclid_factor",
    "symplectic_form", "symplectic_inverse", "tavgen_absorb", "to_fundamental_word",
    "unitriangular_factor_sl", "unitriangular_factor_sp", "winding_number",
]
