"""Operations on Newton-form polynomials.

Evaluation and differentiation run the Horner-style recursion mirroring the
solver split (each coefficient read exactly once); hypercube integration
uses the tensor-product structure of the basis under canonical nodes;
conversion to monomial normal form runs the same recursion with
shift-and-subtract on coefficient arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .nodes import NewtonNodeSet
from .solver import MonomialPoly, NewtonPoly


@dataclass(frozen=True)
class Box:
    """Axis-aligned hypercube given by per-dimension intervals."""

    lows: np.ndarray
    highs: np.ndarray

    def __post_init__(self):
        lows = np.asarray(self.lows, dtype=np.float64)
        highs = np.asarray(self.highs, dtype=np.float64)
        if lows.ndim != 1 or lows.shape != highs.shape:
            raise ValueError("box bounds must be two equal-length 1D arrays")
        if not np.all(lows < highs):
            raise ValueError("box requires a_i < b_i in every dimension")
        object.__setattr__(self, "lows", lows)
        object.__setattr__(self, "highs", highs)

    @property
    def dim(self) -> int:
        return self.lows.size

    @classmethod
    def cube(cls, m: int, a: float = -1.0, b: float = 1.0) -> "Box":
        return cls(np.full(m, a), np.full(m, b))


def _as_points(poly, x) -> np.ndarray:
    pts = np.asarray(x, dtype=np.float64)
    single = pts.ndim == 1
    if single:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != poly.m:
        raise ValueError(f"expected points of dimension {poly.m}, got array "
                         f"of shape {np.asarray(x).shape}")
    if poly.nodeset.affine is not None:
        pts = poly.nodeset.affine.apply_inverse(pts)
    return np.ascontiguousarray(pts), single


def eval_newton_many(poly: NewtonPoly, points) -> np.ndarray:
    """Evaluate at a batch of points; (R, m) in, (R,) out."""
    pts, _ = _as_points(poly, points)
    values, _ = _kernels.eval_newton_batch(
        poly.tree_coefficients, poly.m, poly.n,
        poly.nodeset.generator_matrix, pts)
    return values


def eval_newton(poly: NewtonPoly, x) -> float:
    """Value of the polynomial at one point (ambient coordinates)."""
    pts, single = _as_points(poly, x)
    if not single:
        raise ValueError("eval_newton takes one point; use eval_newton_many")
    values, _ = _kernels.eval_newton_batch(
        poly.tree_coefficients, poly.m, poly.n,
        poly.nodeset.generator_matrix, pts)
    return float(values[0])


def eval_read_count(poly: NewtonPoly, x) -> int:
    """Number of coefficient reads one evaluation performs (instrumented)."""
    pts, _ = _as_points(poly, x)
    _, reads = _kernels.eval_newton_batch(
        poly.tree_coefficients, poly.m, poly.n,
        poly.nodeset.generator_matrix, pts[:1])
    return int(reads)


def partial_derivative(poly: NewtonPoly, i: int, x) -> float:
    """Exact partial derivative d/dx_i at a point; ``i`` is 1-based.

    Forward-mode (value, derivative) pairs through the evaluation
    recursion; for affine grids the chain rule with the inverse matrix row
    is applied.
    """
    if not 1 <= i <= poly.m:
        raise ValueError(f"dimension index must be in 1..{poly.m}, got {i}")
    pts, _ = _as_points(poly, x)
    gens = poly.nodeset.generator_matrix
    if poly.nodeset.affine is None:
        _, derivs = _kernels.eval_newton_diff_batch(
            poly.tree_coefficients, poly.m, poly.n, gens, pts[:1], i - 1)
        return float(derivs[0])
    inverse = poly.nodeset.affine.inverse_matrix
    total = 0.0
    for k in range(poly.m):
        weight = inverse[k, i - 1]
        if weight == 0.0:
            continue
        _, derivs = _kernels.eval_newton_diff_batch(
            poly.tree_coefficients, poly.m, poly.n, gens, pts[:1], k)
        total += weight * float(derivs[0])
    return total


def gradient(poly: NewtonPoly, x) -> np.ndarray:
    """All m partial derivatives at a point (one pass per dimension)."""
    return np.array([partial_derivative(poly, i, x)
                     for i in range(1, poly.m + 1)])


def _newton_factor_weights(gens_row: np.ndarray, n: int,
                           a: float, b: float) -> np.ndarray:
    """w[k] = integral over [a, b] of prod_{j<=k} (t - p_j), k = 0..n.

    Incremental monomial expansion of the 1D Newton factors; O(n^2).
    """
    degrees = np.arange(1, n + 2, dtype=np.float64)
    moments = (b ** degrees - a ** degrees) / degrees  # integral of t^j
    weights = np.empty(n + 1)
    coeffs = np.zeros(n + 1)  # monomial coefficients of the current factor
    coeffs[0] = 1.0
    weights[0] = moments[0]
    for k in range(1, n + 1):
        shifted = np.zeros(n + 1)
        shifted[1:k + 1] = coeffs[:k]  # multiply by t
        coeffs = shifted - gens_row[k - 1] * coeffs
        weights[k] = coeffs[:k + 1] @ moments[:k + 1]
    return weights


def integrate_hypercube(poly: NewtonPoly, box: Box) -> float:
    """Exact integral over an axis-aligned box (canonical grids only).

    Tensor structure: integral = sum_alpha c_alpha prod_i w_i(alpha_i)
    with w_i(k) the 1D integral of the dimension-i Newton factor of
    degree k.
    """
    if poly.nodeset.affine is not None:
        raise ValueError(
            "integration requires a canonical grid; re-interpolate after "
            "composing the inverse affine map into the sampled function")
    if box.dim != poly.m:
        raise ValueError(f"box dimension {box.dim} does not match m={poly.m}")
    exps = poly.nodeset.lower_set.exponents
    factor = np.ones(len(exps))
    for d in range(poly.m):
        weights = _newton_factor_weights(poly.nodeset.generators[d], poly.n,
                                         float(box.lows[d]),
                                         float(box.highs[d]))
        factor *= weights[exps[:, d]]
    return float(poly.coefficients @ factor)


def newton_to_monomial(poly: NewtonPoly) -> MonomialPoly:
    """Convert to monomial normal form (canonical grids only).

    Recursively converts the alpha_d = 0 block, converts the rest over
    degree n - 1, multiplies by (x_d - p_{d,o+1}) via shift-and-subtract
    on the coefficient array, and adds; O(N^2) overall.
    """
    if poly.nodeset.affine is not None:
        raise ValueError("conversion requires a canonical grid")
    ls = poly.nodeset.lower_set
    total = len(ls)
    ctree = poly.tree_coefficients
    gens = poly.nodeset.generator_matrix
    raise_tables = [ls.raise_table(d) for d in range(poly.m)]
    pos = 0

    def convert(d: int, g: int, o: int) -> np.ndarray:
        nonlocal pos
        if d == 0 or g == 0:
            out = np.zeros(total)
            out[0] = ctree[pos]  # rank 0 is the zero multi-index
            pos += 1
            return out
        low = convert(d - 1, g, 0)
        high = convert(d, g - 1, o + 1)
        table = raise_tables[d - 1]
        valid = table >= 0
        low[table[valid]] += high[valid]
        low -= gens[d - 1, o] * high
        return low

    mono = convert(poly.m, poly.n, 0)
    assert pos == total
    return MonomialPoly(m=poly.m, n=poly.n, coefficients=mono)


def eval_monomial_many(poly: MonomialPoly, points) -> np.ndarray:
    """Evaluate a monomial-form polynomial at a batch of points."""
    pts = np.asarray(points, dtype=np.float64)
    single = pts.ndim == 1
    if single:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != poly.m:
        raise ValueError(f"expected points of dimension {poly.m}, got array "
                         f"of shape {np.asarray(points).shape}")
    exps = poly.lower_set.exponents
    terms = np.ones((pts.shape[0], len(exps)))
    for d in range(poly.m):
        powers = pts[:, d:d + 1] ** np.arange(poly.n + 1, dtype=np.float64)
        terms *= powers[:, exps[:, d]]
    return terms @ poly.coefficients


def eval_monomial(poly: MonomialPoly, x) -> float:
    """Value of a monomial-form polynomial at one point."""
    values = eval_monomial_many(poly, np.asarray(x, dtype=np.float64))
    return float(values[0])


def eval_basis(nodeset: NewtonNodeSet, alpha, x) -> float:
    """One Newton basis function: prod_i prod_{j<=alpha_i} (x_i - p_{i,j}).

    Evaluated in canonical coordinates (the inverse affine map is applied
    to ``x`` first when present).  Factors are multiplied out one by one,
    so a vanishing factor yields an exact zero.
    """
    alpha = tuple(alpha)
    nodeset.lower_set.rank(alpha)  # membership check
    point = np.asarray(x, dtype=np.float64)
    if nodeset.affine is not None:
        point = nodeset.affine.apply_inverse(point)
    result = 1.0
    for d in range(nodeset.m):
        gens = nodeset.generators[d]
        for j in range(alpha[d]):
            result *= point[d] - gens[j]
    return float(result)
