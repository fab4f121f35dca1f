"""1D node families and the multidimensional Newton node grids built from them.

A grid is defined by per-dimension generating nodes ``p_{i,1..n+1}`` and an
optional affine map: the grid point for a multi-index ``alpha`` is
``tau(p_{1,alpha_1+1}, ..., p_{m,alpha_m+1})``.  Restricting alpha to the
lower set ``|alpha| <= n`` makes this a downward-closed sparse grid that is
unisolvent for degree-n interpolation; dropping the last coordinate of any
grid point with ``alpha_m >= 1`` lands on another grid point (the projection
property the solver relies on).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NodeError, SizeLimitError
from .indexing import LowerSet, count_coefficients, enumerate_lower_set

#: Minimum pairwise gap accepted between 1D generating nodes.
DISTINCT_TOL = 1e-12

#: Default size guard for the dense Vandermonde unisolvence oracle.
ORACLE_MAX_SIZE = 2000


def chebyshev_1d(n: int) -> np.ndarray:
    """Chebyshev roots cos((2k-1)pi / (2(n+1))), k = 1..n+1, descending."""
    if n < 0:
        raise ValueError(f"degree n must be >= 0, got {n}")
    k = np.arange(1, n + 2, dtype=np.float64)
    return np.cos((2.0 * k - 1.0) * math.pi / (2.0 * (n + 1)))


def equidistant_1d(n: int, a: float = -1.0, b: float = 1.0) -> np.ndarray:
    """n+1 uniformly spaced nodes on [a, b]; the interval midpoint for n=0."""
    if n < 0:
        raise ValueError(f"degree n must be >= 0, got {n}")
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    if n == 0:
        return np.array([(a + b) / 2.0])
    return a + np.arange(n + 1, dtype=np.float64) * ((b - a) / n)


def check_generating_nodes(values, tol: float = DISTINCT_TOL) -> np.ndarray:
    """Validate a 1D generating-node family: finite, pairwise distinct."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise NodeError("generating nodes must be a nonempty 1D sequence")
    if not np.all(np.isfinite(arr)):
        raise NodeError("generating nodes must be finite")
    if arr.size > 1:
        gap = np.min(np.abs(np.diff(np.sort(arr))))
        if gap <= tol:
            raise NodeError(f"generating nodes have a pairwise gap {gap:.3e} "
                            f"below the tolerance {tol:.1e}")
    return arr


@dataclass(frozen=True)
class AffineMap:
    """Invertible affine change of coordinates x -> A x + b."""

    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=np.float64)
        b = np.asarray(self.offset, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise NodeError("affine matrix must be square")
        if b.shape != (a.shape[0],):
            raise NodeError("affine offset length must match the matrix")
        singular_values = np.linalg.svd(a, compute_uv=False)
        if singular_values[-1] <= 1e-12 * singular_values[0]:
            raise NodeError("affine matrix is singular to tolerance")
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "offset", b)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def inverse_matrix(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Map canonical coordinates to ambient ones; points is (..., m)."""
        return np.asarray(points) @ self.matrix.T + self.offset

    def apply_inverse(self, points: np.ndarray) -> np.ndarray:
        return (np.asarray(points) - self.offset) @ self.inverse_matrix.T

    def to_json_dict(self) -> dict:
        return {"A": self.matrix.tolist(), "b": self.offset.tolist()}

    @classmethod
    def from_json_dict(cls, data: dict) -> "AffineMap":
        return cls(matrix=np.array(data["A"], dtype=np.float64),
                   offset=np.array(data["b"], dtype=np.float64))


class NewtonNodeSet:
    """A multidimensional Newton node grid.

    Parameters
    ----------
    generators : sequence of m arrays
        Per-dimension generating nodes, each of length n + 1 with pairwise
        distinct entries.
    affine : AffineMap, optional
        Ambient placement of the grid; ``None`` means canonical coordinates.
    """

    def __init__(self, generators, affine: AffineMap | None = None):
        gens = []
        seen = set()  # validate each distinct family once
        for g in generators:
            if id(g) in seen:
                gens.append(np.asarray(g, dtype=np.float64))
            else:
                gens.append(check_generating_nodes(g))
                seen.add(id(g))
        gens = tuple(gens)
        if not gens:
            raise NodeError("need at least one dimension of generators")
        length = gens[0].size
        if any(g.size != length for g in gens):
            raise NodeError("all generator families must have equal length")
        self.m = len(gens)
        self.n = length - 1
        self.generators = gens
        if affine is not None and affine.dim != self.m:
            raise NodeError(f"affine map dimension {affine.dim} does not "
                            f"match m={self.m}")
        self.affine = affine

    @property
    def canonical(self) -> bool:
        return self.affine is None

    @cached_property
    def lower_set(self) -> LowerSet:
        return enumerate_lower_set(self.m, self.n)

    @property
    def node_count(self) -> int:
        return len(self.lower_set)

    @cached_property
    def generator_matrix(self) -> np.ndarray:
        """(m, n+1) float64 matrix with row i the dimension-i generators."""
        mat = np.vstack(self.generators)
        mat.setflags(write=False)
        return mat

    def canonical_nodes(self) -> np.ndarray:
        """(N, m) canonical grid: row for alpha is (p_{i, alpha_i + 1})_i."""
        exps = self.lower_set.exponents
        cols = [self.generators[d][exps[:, d]] for d in range(self.m)]
        return np.column_stack(cols)

    def nodes(self) -> np.ndarray:
        """(N, m) ambient nodes (affine map applied if present)."""
        pts = self.canonical_nodes()
        if self.affine is not None:
            pts = self.affine.apply(pts)
        return pts

    def node_for(self, alpha) -> np.ndarray:
        """Ambient node for one multi-index."""
        alpha = tuple(alpha)
        self.lower_set.rank(alpha)  # membership check
        point = np.array([self.generators[d][alpha[d]]
                          for d in range(self.m)])
        if self.affine is not None:
            point = self.affine.apply(point)
        return point

    def min_generator_gap(self) -> float:
        return min(float(np.min(np.abs(np.diff(np.sort(g)))))
                   if g.size > 1 else np.inf
                   for g in self.generators)

    def __repr__(self) -> str:
        placement = "canonical" if self.canonical else "affine"
        return (f"NewtonNodeSet(m={self.m}, n={self.n}, "
                f"N={self.node_count}, {placement})")

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "generators": [g.tolist() for g in self.generators],
            "affine": None if self.affine is None else self.affine.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "NewtonNodeSet":
        gens = [np.array(g, dtype=np.float64) for g in data["generators"]]
        if len(gens) != data["m"] or any(g.size != data["n"] + 1 for g in gens):
            raise NodeError("node-set JSON shape disagrees with m/n fields")
        affine = data.get("affine")
        return cls(gens, None if affine is None else
                   AffineMap.from_json_dict(affine))


_GENERATOR_KINDS = {
    "chebyshev": lambda n: chebyshev_1d(n),
    "cheb": lambda n: chebyshev_1d(n),
    "equidistant": lambda n: equidistant_1d(n),
    "equi": lambda n: equidistant_1d(n),
}


def generate_newton_nodes(m: int, n: int, kind="chebyshev",
                          affine: AffineMap | None = None) -> NewtonNodeSet:
    """Build a Newton node grid from named 1D families.

    ``kind`` is a single name applied to every dimension, or a sequence of
    m names / explicit arrays.  Known names: "chebyshev" and "equidistant"
    (both on [-1, 1]).
    """
    if m < 1:
        raise ValueError(f"dimension m must be >= 1, got {m}")
    if n < 0:
        raise ValueError(f"degree n must be >= 0, got {n}")
    if isinstance(kind, str):
        kinds = [kind] * m
    else:
        kinds = list(kind)
        if len(kinds) != m:
            raise ValueError(f"need one generator kind per dimension, got "
                             f"{len(kinds)} for m={m}")
    generators = []
    by_kind = {}  # one shared array per named family
    for item in kinds:
        if isinstance(item, str):
            name = item.lower()
            if name not in _GENERATOR_KINDS:
                raise ValueError(f"unknown node kind {item!r}; expected one "
                                 f"of {sorted(set(_GENERATOR_KINDS))}")
            if name not in by_kind:
                by_kind[name] = _GENERATOR_KINDS[name](n)
            generators.append(by_kind[name])
        else:
            generators.append(np.asarray(item, dtype=np.float64))
    return NewtonNodeSet(generators, affine=affine)


def check_unisolvent_oracle(points, m: int, n: int, *,
                            pivot_tol: float = 1e-10,
                            max_size: int = ORACLE_MAX_SIZE) -> bool:
    """Brute-force unisolvence test via the dense monomial Vandermonde matrix.

    Returns True iff the LU factorization with partial pivoting of
    ``V(points)`` has smallest pivot magnitude above ``pivot_tol`` relative
    to the largest.  Guarded to ``N(m, n) <= max_size`` points.
    """
    from .solver import build_vandermonde  # local import, avoids a cycle

    pts = np.asarray(points, dtype=np.float64)
    expected = count_coefficients(m, n)
    if expected > max_size:
        raise SizeLimitError(f"oracle limited to {max_size} points, "
                             f"N({m}, {n}) = {expected}")
    if pts.shape != (expected, m):
        raise ValueError(f"expected {expected} points of dimension {m}, "
                         f"got array of shape {pts.shape}")
    vandermonde = build_vandermonde(pts, m, n)
    pivots = _lu_pivot_magnitudes(vandermonde)
    largest = pivots.max(initial=0.0)
    if largest == 0.0:
        return False
    return bool(pivots.min() > pivot_tol * largest)


def _lu_pivot_magnitudes(matrix: np.ndarray) -> np.ndarray:
    """|diag(U)| from an LU factorization with partial pivoting."""
    import warnings

    import scipy.linalg

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # singular U is the signal we want
        lu, _ = scipy.linalg.lu_factor(matrix, check_finite=False)
    return np.abs(np.diag(lu))
