"""Interpolation solvers.

The main entry point is :func:`pip_solve`, the divided-difference scheme on
multidimensional Newton grids.  The recursive problem split (hyperplane
``x_d = p_{d,1}`` first, then degree reduction with the dimension-d
generators shifted by one) unrolls into per-dimension sweeps of the
sequential 1D scheme along grid lines, processed from the last dimension
down to the first.  Each value is touched O(1) times per stage, giving
O(N^2) work and O(N) working storage overall.

Dense Vandermonde baselines (:func:`solve_vandermonde_lu`,
:func:`invert_vandermonde`) are provided for comparison benchmarks; they
are backed by LAPACK via SciPy but keep explicit pivot-ratio singularity
checks.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import (NonFiniteSampleError, SingularMatrixError,
                     SizeLimitError)
from .indexing import LowerSet, count_coefficients, enumerate_lower_set
from .nodes import NewtonNodeSet

#: Environment variable overriding the dense-matrix size guard.
DENSE_LIMIT_ENV = "PIP_DENSE_LIMIT"
_DENSE_LIMIT_DEFAULT = 3000

#: Relative pivot tolerance below which a dense system counts as singular.
PIVOT_TOL = 1e-12


def dense_limit() -> int:
    """Current dense-matrix size guard (PIP_DENSE_LIMIT, default 3000)."""
    raw = os.environ.get(DENSE_LIMIT_ENV)
    if raw is None:
        return _DENSE_LIMIT_DEFAULT
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{DENSE_LIMIT_ENV} must be an integer, "
                         f"got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{DENSE_LIMIT_ENV} must be positive, got {value}")
    return value


class SolveAudit:
    """Instrumentation for one solve: auxiliary allocation and op counts.

    Allocation is tracked in float64-equivalent units (8 bytes = 1 unit)
    for arrays the solver explicitly creates; ``peak_units`` is the high
    water mark of persistent plus in-scope auxiliary storage.
    """

    def __init__(self):
        self.persistent_units = 0.0
        self.scope_units = 0.0
        self.peak_units = 0.0
        self.ops = 0

    def add_persistent(self, units: float):
        self.persistent_units += units
        self._update()

    def add_scope(self, units: float):
        self.scope_units += units
        self._update()

    def end_scope(self):
        self.scope_units = 0.0

    def _update(self):
        self.peak_units = max(self.peak_units,
                              self.persistent_units + self.scope_units)


@dataclass(eq=False)
class NewtonPoly:
    """Polynomial in multivariate Newton form, bound to its node grid.

    ``coefficients`` follows the canonical lower-set order of the grid's
    multi-indices.  In canonical coordinates the represented polynomial is
    ``sum_alpha c_alpha * prod_i prod_{j<=alpha_i} (x_i - p_{i,j})``; a
    non-canonical grid composes the inverse affine map first.
    """

    nodeset: NewtonNodeSet
    coefficients: np.ndarray
    fit_residual: float | None = None

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=np.float64)
        if self.coefficients.shape != (self.nodeset.node_count,):
            raise ValueError(
                f"expected {self.nodeset.node_count} coefficients, got "
                f"array of shape {self.coefficients.shape}")

    @property
    def m(self) -> int:
        return self.nodeset.m

    @property
    def n(self) -> int:
        return self.nodeset.n

    @cached_property
    def tree_coefficients(self) -> np.ndarray:
        """Coefficients permuted into subdivision-tree (evaluation) order."""
        ls = self.nodeset.lower_set
        arr = np.ascontiguousarray(
            self.coefficients[ls.tree_permutation], dtype=np.float64)
        arr.setflags(write=False)
        return arr

    def to_json_dict(self) -> dict:
        return {
            "form": "newton",
            "m": self.m,
            "n": self.n,
            "coefficients": self.coefficients.tolist(),
            "nodeset": self.nodeset.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "NewtonPoly":
        if data.get("form") != "newton":
            raise ValueError(f"expected form 'newton', got {data.get('form')!r}")
        nodeset = NewtonNodeSet.from_json_dict(data["nodeset"])
        return cls(nodeset=nodeset,
                   coefficients=np.array(data["coefficients"], dtype=np.float64))


@dataclass(eq=False)
class MonomialPoly:
    """Polynomial in monomial normal form, coefficients in lower-set order."""

    m: int
    n: int
    coefficients: np.ndarray
    solve_residual: float | None = None

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=np.float64)
        expected = count_coefficients(self.m, self.n)
        if self.coefficients.shape != (expected,):
            raise ValueError(f"expected {expected} coefficients for "
                             f"(m={self.m}, n={self.n}), got shape "
                             f"{self.coefficients.shape}")

    @cached_property
    def lower_set(self) -> LowerSet:
        return enumerate_lower_set(self.m, self.n)

    def to_json_dict(self) -> dict:
        return {
            "form": "monomial",
            "m": self.m,
            "n": self.n,
            "coefficients": self.coefficients.tolist(),
            "nodeset": None,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "MonomialPoly":
        if data.get("form") != "monomial":
            raise ValueError(f"expected form 'monomial', got {data.get('form')!r}")
        return cls(m=int(data["m"]), n=int(data["n"]),
                   coefficients=np.array(data["coefficients"], dtype=np.float64))


def poly_from_json_dict(data: dict):
    """Load either polynomial form from its JSON dictionary."""
    form = data.get("form")
    if form == "newton":
        return NewtonPoly.from_json_dict(data)
    if form == "monomial":
        return MonomialPoly.from_json_dict(data)
    raise ValueError(f"unknown polynomial form {form!r}")


def divided_differences_1d(nodes, values) -> np.ndarray:
    """Newton coefficients of the 1D interpolant through (nodes, values).

    Runs the sequential scheme c_k = f_k(p_{k+1}) with
    f_k = (f_{k-1} - f_{k-1}(p_k)) / (x - p_k) in O(n^2) operations.
    Duplicate nodes raise ``NodeError``.
    """
    from .nodes import check_generating_nodes

    nodes = check_generating_nodes(nodes)
    values = np.asarray(values, dtype=np.float64)
    if values.shape != nodes.shape:
        raise ValueError(f"value count {values.shape} does not match node "
                         f"count {nodes.shape}")
    coeffs = values.copy()
    npts = nodes.size
    flat = np.arange(npts, dtype=np.int64)
    starts = np.array([0, npts], dtype=np.int64)
    _kernels.dd_line_sweep(coeffs, flat, starts,
                           np.ascontiguousarray(nodes))
    return coeffs


def _line_tables(exps: np.ndarray, d: int, audit: SolveAudit | None):
    """Group lower-set positions into grid lines along dimension d.

    Returns ``(flat, starts)``: positions ordered line-major (each line by
    increasing exponent in d) and the CSR offsets of the lines.
    """
    npos, m = exps.shape
    # group by the exponents with component d zeroed; ties resolved by the
    # d-exponent itself (the least significant key), so each line comes out
    # ordered by ascending exponent in d
    keys = [exps[:, d]] + [exps[:, j] for j in range(m) if j != d]
    order = np.lexsort(keys)
    flat = order.astype(np.int64, copy=False)
    if npos > 1:
        grouped = exps[flat]
        changed = grouped[1:] != grouped[:-1]
        changed[:, d] = False
        neq = changed.any(axis=1)
    else:
        neq = np.zeros(0, dtype=bool)
    breaks = np.flatnonzero(neq).astype(np.int64) + 1
    starts = np.empty(breaks.size + 2, dtype=np.int64)
    starts[0] = 0
    starts[1:-1] = breaks
    starts[-1] = npos
    if audit is not None:
        # order/flat + grouped gather + change masks + breaks + starts
        audit.add_scope(flat.size + npos * m / 2.0 + npos * m / 8.0
                        + neq.size / 8.0 + breaks.size + starts.size)
    return flat, starts


def pip_solve(nodeset: NewtonNodeSet, values,
              audit: SolveAudit | None = None) -> NewtonPoly:
    """Interpolate values given at the grid nodes (lower-set order).

    Sweeps the sequential divided-difference scheme along all grid lines
    of dimension m, then m-1, ..., then 1, in place on one value array.
    The result's coefficients satisfy the fitting condition at every node.
    """
    ls = nodeset.lower_set
    total = len(ls)
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (total,):
        raise ValueError(f"expected {total} values for this grid, got "
                         f"array of shape {values.shape}")
    coeffs = values.copy()
    if audit is not None:
        audit.add_persistent(total)
    exps = ls.exponents
    gens = nodeset.generator_matrix
    for d in range(nodeset.m - 1, -1, -1):
        flat, starts = _line_tables(exps, d, audit)
        ops = _kernels.dd_line_sweep(coeffs, flat, starts,
                                     np.ascontiguousarray(gens[d]))
        if audit is not None:
            audit.ops += ops
            audit.end_scope()
    return NewtonPoly(nodeset=nodeset, coefficients=coeffs)


def interpolate_function(m: int, n: int, nodeset: NewtonNodeSet, f) -> NewtonPoly:
    """Sample ``f`` at all grid nodes and interpolate.

    ``f`` maps an m-vector to a real number.  Non-finite samples raise
    ``NonFiniteSampleError`` naming the offending node.  The returned
    polynomial carries ``fit_residual``, the max absolute mismatch when
    evaluated back at the nodes.
    """
    if (m, n) != (nodeset.m, nodeset.n):
        raise ValueError(f"nodeset is for (m={nodeset.m}, n={nodeset.n}), "
                         f"requested (m={m}, n={n})")
    pts = nodeset.nodes()
    values = np.empty(len(pts), dtype=np.float64)
    for i, point in enumerate(pts):
        value = float(f(point))
        if not np.isfinite(value):
            alpha = nodeset.lower_set.unrank(i)
            raise NonFiniteSampleError(
                f"f returned {value} at node {i} (multi-index {alpha}, "
                f"point {point.tolist()})")
        values[i] = value
    poly = pip_solve(nodeset, values)
    from .polynomials import eval_newton_many  # deferred, avoids a cycle

    poly.fit_residual = float(
        np.max(np.abs(eval_newton_many(poly, pts) - values)))
    return poly


def build_vandermonde(points, m: int, n: int) -> np.ndarray:
    """Dense monomial Vandermonde matrix: row i holds points[i]**alpha.

    Columns follow the canonical lower-set order (1, x_1, ..., x_m,
    x_1^2, x_1 x_2, ...).  Each monomial column is computed from an
    already-built lower-degree column times one coordinate, so the build
    costs one vector multiply per column.  Guarded by the dense size limit.
    """
    pts = np.asarray(points, dtype=np.float64)
    expected = count_coefficients(m, n)
    limit = dense_limit()
    if expected > limit:
        raise SizeLimitError(f"N({m}, {n}) = {expected} exceeds the dense "
                             f"limit {limit} ({DENSE_LIMIT_ENV})")
    if pts.shape != (expected, m):
        raise ValueError(f"expected {expected} points of dimension {m}, "
                         f"got array of shape {pts.shape}")
    ls = enumerate_lower_set(m, n)
    exps = ls.exponents
    degrees = exps.sum(axis=1, dtype=np.int32)

    def pack(rows):
        key = np.empty((rows.shape[0], m + 1), dtype=np.int32)
        key[:, 0] = rows.sum(axis=1, dtype=np.int32)
        key[:, 1:] = -rows  # canonical order is descending-lex per degree
        return np.ascontiguousarray(key).view([("", np.int32)] * (m + 1)).ravel()

    # each monomial's parent: decrement the first nonzero exponent; ranks
    # resolved by binary search against the (sorted) canonical key order
    first_dim = (exps > 0).argmax(axis=1)
    parent_exps = exps.copy()
    parent_exps[np.arange(expected), first_dim] -= 1
    parents = np.searchsorted(pack(exps), pack(parent_exps[1:]))

    # built transposed (one contiguous row per monomial); the returned view
    # is Fortran-ordered, which LAPACK consumes without a copy
    cols = np.empty((expected, expected), dtype=np.float64)
    cols[0] = 1.0
    coords = np.ascontiguousarray(pts.T)
    block_edges = np.searchsorted(degrees, np.arange(n + 2))
    for k in range(1, n + 1):
        block = slice(block_edges[k], block_edges[k + 1])
        sources = parents[block_edges[k] - 1:block_edges[k + 1] - 1]
        np.multiply(cols[sources], coords[first_dim[block]], out=cols[block])
    return cols.T


def _lu_factor_checked(matrix: np.ndarray, *, overwrite: bool = False):
    """LU with partial pivoting; raises if singular to PIVOT_TOL."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lu, piv = scipy.linalg.lu_factor(matrix, overwrite_a=overwrite,
                                         check_finite=False)
    pivots = np.abs(np.diag(lu))
    largest = pivots.max(initial=0.0)
    if largest == 0.0 or pivots.min() <= PIVOT_TOL * largest:
        raise SingularMatrixError(
            f"Vandermonde matrix is singular to tolerance (pivot ratio "
            f"{pivots.min() / largest if largest else 0.0:.3e}); the nodes "
            f"are not unisolvent")
    return lu, piv


def _infer_degree(m: int, count: int) -> int:
    n = 0
    while count_coefficients(m, n) < count:
        n += 1
    if count_coefficients(m, n) != count:
        raise ValueError(f"{count} points do not fill any N({m}, n)")
    return n


def solve_vandermonde_lu(points, values, n: int | None = None) -> MonomialPoly:
    """Monomial coefficients via dense LU with partial pivoting.

    The baseline path: build V(points), factor, back-substitute.  Raises
    ``SingularMatrixError`` on pivot collapse (non-unisolvent nodes).  The
    result carries ``solve_residual``, the max-norm of V c - F.
    """
    pts = np.asarray(points, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if pts.ndim != 2:
        raise ValueError("points must be a 2D array")
    m = pts.shape[1]
    if n is None:
        n = _infer_degree(m, pts.shape[0])
    if values.shape != (pts.shape[0],):
        raise ValueError(f"value count {values.shape} does not match point "
                         f"count {pts.shape[0]}")
    vandermonde = build_vandermonde(pts, m, n)
    lu, piv = _lu_factor_checked(vandermonde, overwrite=False)
    coeffs = scipy.linalg.lu_solve((lu, piv), values, check_finite=False)
    residual = float(np.max(np.abs(vandermonde @ coeffs - values)))
    return MonomialPoly(m=m, n=n, coefficients=coeffs,
                        solve_residual=residual)


def invert_vandermonde(points, n: int | None = None) -> np.ndarray:
    """Explicit inverse of the Vandermonde matrix (benchmark baseline)."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ValueError("points must be a 2D array")
    m = pts.shape[1]
    if n is None:
        n = _infer_degree(m, pts.shape[0])
    vandermonde = build_vandermonde(pts, m, n)
    lu, piv = _lu_factor_checked(vandermonde, overwrite=True)
    return scipy.linalg.lu_solve((lu, piv), np.eye(pts.shape[0]),
                                 check_finite=False)
