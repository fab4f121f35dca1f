"""Multivariate Newton interpolation on unisolvent sparse grids.

Solves the polynomial interpolation problem (PIP) in m variables at degree
n: generates multidimensional Newton / Newton-Chebyshev node grids, computes
the interpolant with a divided-difference scheme in O(N^2) time and O(N)
memory (N = C(m + n, n)), and evaluates, differentiates, integrates and
converts the result.  Dense Vandermonde solvers and a benchmark CLI are
included for comparison studies.

Hot kernels run on a compiled backend when available (``BACKEND`` tells
which one is active); see ``mvnewton._kernels``.
"""

from ._kernels import BACKEND
from .errors import (InterpolationError, NodeError, NonFiniteSampleError,
                     SingularMatrixError, SizeLimitError)
from .expressions import (ExprEvalError, ExprSyntaxError, builtin_function,
                          compile_expr, eval_expr, parse, resolve_function,
                          to_string)
from .indexing import (LowerSet, PipTree, build_pip_tree, count_coefficients,
                       count_degree_monomials, descent_to_multiindex,
                       enumerate_lower_set)
from .nodes import (AffineMap, NewtonNodeSet, chebyshev_1d,
                    check_unisolvent_oracle, equidistant_1d,
                    generate_newton_nodes)
from .polynomials import (Box, eval_basis, eval_monomial, eval_monomial_many,
                          eval_newton, eval_newton_many, eval_read_count,
                          gradient, integrate_hypercube, newton_to_monomial,
                          partial_derivative)
from .solver import (MonomialPoly, NewtonPoly, SolveAudit, build_vandermonde,
                     dense_limit, divided_differences_1d, interpolate_function,
                     invert_vandermonde, pip_solve, poly_from_json_dict,
                     solve_vandermonde_lu)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AffineMap",
    "Box",
    "ExprEvalError",
    "ExprSyntaxError",
    "InterpolationError",
    "LowerSet",
    "MonomialPoly",
    "NewtonNodeSet",
    "NewtonPoly",
    "NodeError",
    "NonFiniteSampleError",
    "PipTree",
    "SingularMatrixError",
    "SizeLimitError",
    "SolveAudit",
    "build_pip_tree",
    "build_vandermonde",
    "builtin_function",
    "chebyshev_1d",
    "check_unisolvent_oracle",
    "compile_expr",
    "count_coefficients",
    "count_degree_monomials",
    "dense_limit",
    "descent_to_multiindex",
    "divided_differences_1d",
    "enumerate_lower_set",
    "equidistant_1d",
    "eval_basis",
    "eval_expr",
    "eval_monomial",
    "eval_monomial_many",
    "eval_newton",
    "eval_newton_many",
    "eval_read_count",
    "generate_newton_nodes",
    "gradient",
    "integrate_hypercube",
    "interpolate_function",
    "invert_vandermonde",
    "newton_to_monomial",
    "parse",
    "partial_derivative",
    "pip_solve",
    "poly_from_json_dict",
    "resolve_function",
    "solve_vandermonde_lu",
    "to_string",
]
