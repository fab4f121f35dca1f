"""Multi-index combinatorics for total-degree polynomial spaces.

The central object is the lower set ``A(m, n)``: all exponent vectors
``alpha`` of length ``m`` with ``|alpha| <= n``, in a fixed canonical order
(total degree first, then lexicographic within a degree with the first
component most significant).  Every coefficient array, node grid and file
format in this package is keyed by that order.

The module also builds the binary dimension/degree subdivision tree whose
leaf paths are in bijection with the lower set; it is exposed for testing
and introspection, the lower set itself drives all algorithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import SizeLimitError

_INT64_MAX = 2**63 - 1


def count_coefficients(m: int, n: int) -> int:
    """Dimension of the space of m-variate polynomials of degree <= n.

    Equals ``C(m + n, n)``.  Exact integer arithmetic; raises
    ``OverflowError`` for results that do not fit in a signed 64-bit
    integer rather than wrapping around.
    """
    if m < 0 or n < 0:
        raise ValueError(f"m and n must be nonnegative, got m={m}, n={n}")
    value = math.comb(m + n, n)
    if value > _INT64_MAX:
        raise OverflowError(f"C({m + n}, {n}) = {value} exceeds 64-bit range")
    return value


def count_degree_monomials(m: int, k: int) -> int:
    """Number of m-variate monomials of total degree exactly k."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    value = math.comb(m + k, m) - math.comb(m + k - 1, m)
    if value > _INT64_MAX:
        raise OverflowError(f"M({m}, {k}) = {value} exceeds 64-bit range")
    return value


def _degree_block(m, k, cache):
    # (count, m) int32 array of the exponent vectors of total degree
    # exactly k, first component largest first, matching the coefficient
    # enumeration order of the monomial normal form
    # (1, x1, ..., xm, x1^2, x1*x2, ...).
    key = (m, k)
    block = cache.get(key)
    if block is None:
        if m == 1:
            block = np.array([[k]], dtype=np.int32)
        else:
            parts = []
            for a in range(k, -1, -1):
                rest = _degree_block(m - 1, k - a, cache)
                piece = np.empty((rest.shape[0], m), dtype=np.int32)
                piece[:, 0] = a
                piece[:, 1:] = rest
                parts.append(piece)
            block = np.vstack(parts)
        cache[key] = block
    return block


class LowerSet:
    """All multi-indices alpha with len(alpha) == m and |alpha| <= n.

    The ordering is total-degree-major, then lexicographic within each
    degree with alpha_1 most significant, e.g. for m=2, n=2:
    (0,0), (1,0), (0,1), (2,0), (1,1), (0,2).

    Immutable after construction; rank lookups go through a precomputed
    table so they are O(1).
    """

    def __init__(self, m: int, n: int):
        if m < 1:
            raise ValueError(f"dimension m must be >= 1, got {m}")
        if n < 0:
            raise ValueError(f"degree n must be >= 0, got {n}")
        self.m = m
        self.n = n
        self.size = count_coefficients(m, n)

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, alpha) -> bool:
        return tuple(alpha) in self._rank

    def __repr__(self) -> str:
        return f"LowerSet(m={self.m}, n={self.n}, size={self.size})"

    def rank(self, alpha) -> int:
        """Position of ``alpha`` in the canonical order."""
        try:
            return self._rank[tuple(alpha)]
        except KeyError:
            raise ValueError(f"{tuple(alpha)} is not in LowerSet(m={self.m}, "
                             f"n={self.n})") from None

    def unrank(self, position: int):
        """Multi-index at ``position``; inverse of :meth:`rank`."""
        return self.indices[position]

    @cached_property
    def exponents(self) -> np.ndarray:
        """(size, m) int32 array of the indices in canonical order."""
        cache: dict = {}
        blocks = [_degree_block(self.m, k, cache) for k in range(self.n + 1)]
        arr = np.vstack(blocks) if len(blocks) > 1 else blocks[0].copy()
        arr.setflags(write=False)
        return arr

    @cached_property
    def indices(self) -> tuple:
        """The multi-indices as tuples, in canonical order."""
        return tuple(map(tuple, self.exponents.tolist()))

    @cached_property
    def _rank(self) -> dict:
        return {alpha: i for i, alpha in enumerate(self.indices)}

    @cached_property
    def tree_permutation(self) -> np.ndarray:
        """Canonical-order positions sorted into subdivision-tree leaf order.

        Tree order lists the block alpha_m = 0 first, then alpha_m >= 1,
        recursively in the remaining dimensions; this is exactly
        lexicographic order on the reversed exponent tuple.
        """
        cols = [self.exponents[:, j] for j in range(self.m)]
        perm = np.lexsort(cols)  # last key (alpha_m) is primary
        perm.setflags(write=False)
        return perm

    @cached_property
    def size_table(self) -> np.ndarray:
        """int64 table with entry [d, g] = C(d + g, g) for d <= m, g <= n."""
        table = np.empty((self.m + 1, self.n + 1), dtype=np.int64)
        for d in range(self.m + 1):
            for g in range(self.n + 1):
                table[d, g] = math.comb(d + g, g)
        table.setflags(write=False)
        return table

    def raise_table(self, dim: int) -> np.ndarray:
        """int64 array r with r[i] = rank(alpha + e_dim) or -1 if |alpha| = n.

        ``dim`` is 0-based.
        """
        cache = self.__dict__.setdefault("_raise_tables", {})
        if dim not in cache:
            if not 0 <= dim < self.m:
                raise ValueError(f"dim must be in [0, {self.m}), got {dim}")
            table = np.full(self.size, -1, dtype=np.int64)
            for i, alpha in enumerate(self.indices):
                if sum(alpha) < self.n:
                    raised = alpha[:dim] + (alpha[dim] + 1,) + alpha[dim + 1:]
                    table[i] = self._rank[raised]
            table.setflags(write=False)
            cache[dim] = table
        return cache[dim]


_LOWER_SET_CACHE: dict = {}
_LOWER_SET_CACHE_LIMIT = 48


def enumerate_lower_set(m: int, n: int) -> LowerSet:
    """The canonical lower set for dimension m and max degree n.

    Lower sets are immutable and pure functions of (m, n), so instances
    are shared through a small module-level cache; repeated grid or solver
    setup for the same problem shape reuses the combinatorial tables.
    """
    key = (m, n)
    cached = _LOWER_SET_CACHE.get(key)
    if cached is None:
        cached = LowerSet(m, n)
        if len(_LOWER_SET_CACHE) >= _LOWER_SET_CACHE_LIMIT:
            _LOWER_SET_CACHE.pop(next(iter(_LOWER_SET_CACHE)))
        _LOWER_SET_CACHE[key] = cached
    return cached


@dataclass(frozen=True)
class PipTree:
    """Binary subdivision tree of the interpolation problem (m, n).

    The root is labeled (m, n); a vertex (d, g) with d > 0 and g > 0 has a
    left child (d - 1, g) and a right child (d, g - 1); vertices with d = 0
    or g = 0 are leaves.  Each leaf path is summarized by its descent
    vector (k_1, ..., k_m), where k_i counts path vertices of dimension i.

    ``leaves`` holds the descent vectors in left-to-right leaf order.
    """

    m: int
    n: int
    leaves: tuple
    depth: int

    @property
    def leaf_count(self) -> int:
        return len(self.leaves)


def build_pip_tree(m: int, n: int, max_leaves: int = 1_000_000) -> PipTree:
    """Construct the subdivision tree for (m, n).

    Raises ``SizeLimitError`` when the leaf count C(m + n, n) would exceed
    ``max_leaves``.
    """
    if m < 1:
        raise ValueError(f"dimension m must be >= 1, got {m}")
    if n < 0:
        raise ValueError(f"degree n must be >= 0, got {n}")
    leaf_count = count_coefficients(m, n)
    if leaf_count > max_leaves:
        raise SizeLimitError(f"tree for (m={m}, n={n}) has {leaf_count} "
                             f"leaves, above the limit {max_leaves}")

    leaves = []
    counts = [0] * (m + 1)  # counts[d] = vertices of dimension d on the path
    max_edges = 0

    def walk(d: int, g: int, edges: int):
        nonlocal max_edges
        if d > 0:
            counts[d] += 1
        if d == 0 or g == 0:
            leaves.append(tuple(counts[1:]))
            max_edges = max(max_edges, edges)
        else:
            walk(d - 1, g, edges + 1)
            walk(d, g - 1, edges + 1)
        if d > 0:
            counts[d] -= 1

    walk(m, n, 0)
    return PipTree(m=m, n=n, leaves=tuple(leaves), depth=max_edges)


def _expected_descent(alpha, n: int):
    # The unique realizable descent vector mapping to alpha: paths stop as
    # soon as the degree budget hits zero, so for |alpha| = n the dimensions
    # before the first nonzero entry are never visited.
    m = len(alpha)
    if sum(alpha) < n:
        return tuple(a + 1 for a in alpha)
    first = m  # 1-based position of the first nonzero component
    for i, a in enumerate(alpha):
        if a > 0:
            first = i + 1
            break
    return tuple(0 if i + 1 < first else alpha[i] + 1 for i in range(m))


def descent_to_multiindex(descent, m: int, n: int):
    """Map a leaf descent vector to its multi-index, alpha_i = max(k_i - 1, 0).

    Raises ``ValueError`` when ``descent`` is not the descent vector of any
    leaf path of the (m, n) subdivision tree.
    """
    descent = tuple(int(k) for k in descent)
    if len(descent) != m:
        raise ValueError(f"descent vector has length {len(descent)}, "
                         f"expected m={m}")
    if any(k < 0 for k in descent):
        raise ValueError(f"descent vector entries must be >= 0: {descent}")
    alpha = tuple(max(k - 1, 0) for k in descent)
    if sum(alpha) > n:
        raise ValueError(f"{descent} is not a leaf descent vector of the "
                         f"({m}, {n}) tree")
    if _expected_descent(alpha, n) != descent:
        raise ValueError(f"{descent} is not a leaf descent vector of the "
                         f"({m}, {n}) tree")
    return alpha
