"""Catalytic constant-Toffoli-depth z-rotations built from primitive polynomials."""
from .errors import CapacityError, CatrotError, NoPolynomialFound, NotPrimitiveError
from .kernels import BACKEND
from .gf2n import (BinMatrix, FieldPoly, GFElement, builtin_poly, certify_primitive,
                   companion_decompose, companion_matrix, discrete_log, find_primitive,
                   frobenius_matrix, gf_mul, gf_pow, matrix_order, mod_inverse, totient_check)
from .circuit_ir import (Circuit, DepthReport, Gate, compose, depth_metrics, expand_cswap,
                         from_text, inverse, lower_fanout, to_text, validate)
from .synth import (KickbackPlan, ResourceReport, SynthesisResult, approximate_angle,
                    build_controlled_uf, build_uf, build_variable_rotation, estimate_resources,
                    select_kickbacks)

__version__ = "0.1.0"
