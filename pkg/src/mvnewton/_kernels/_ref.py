"""Pure-NumPy kernels: the fallback backend.

Semantics (including floating-point operation order) match the compiled
backend in ``_speedups.pyx``; the two are interchangeable.
"""

from __future__ import annotations

import numpy as np


def dd_line_sweep(values, flat, starts, gens):
    """In-place divided differences along grid lines of one dimension.

    ``flat`` lists value positions grouped line by line (``starts`` is the
    CSR offset array); within a line, positions are ordered by increasing
    1D node index.  Each line of length L+1 runs the sequential scheme

        v[l] = (v[l] - v[k-1]) / (gens[l] - gens[k-1]),  l = k..L, k = 1..L

    which leaves v[k] holding the k-th Newton coefficient of that line.
    Returns the number of update operations performed.
    """
    ops = 0
    nlines = len(starts) - 1
    for li in range(nlines):
        s = starts[li]
        e = starts[li + 1]
        top = e - s - 1  # line degree L
        for k in range(1, top + 1):
            vk = values[flat[s + k - 1]]
            qk = gens[k - 1]
            idx = flat[s + k:e]
            values[idx] = (values[idx] - vk) / (gens[k:top + 1] - qk)
            ops += top + 1 - k
    return ops


def eval_newton_batch(coeffs, m, n, gens, points):
    """Evaluate a Newton-form polynomial at a batch of points.

    ``coeffs`` is in subdivision-tree order; the recursion mirrors the
    solver split, Q = Q1 + (x_d - p_{d,o+1}) * Q2, reading every
    coefficient exactly once.  Vectorized over the batch.

    Returns ``(values, reads)`` where ``reads`` is the per-point number of
    coefficient reads.
    """
    points = np.asarray(points, dtype=np.float64)
    reads = 0

    def rec(d, g, o, pos):
        nonlocal reads
        if d == 0 or g == 0:
            reads += 1
            return coeffs[pos], pos + 1
        v1, pos = rec(d - 1, g, 0, pos)
        v2, pos = rec(d, g - 1, o + 1, pos)
        t = points[:, d - 1] - gens[d - 1, o]
        return v1 + t * v2, pos

    value, end = rec(m, n, 0, 0)
    assert end == len(coeffs)
    return np.broadcast_to(value, (points.shape[0],)).copy(), reads


def eval_newton_diff_batch(coeffs, m, n, gens, points, dim):
    """Values and one partial derivative, by forward-mode pairs.

    ``dim`` is 0-based.  Same recursion and read pattern as
    :func:`eval_newton_batch`, carrying (value, d/dx_dim value) pairs
    through the product rule.
    """
    points = np.asarray(points, dtype=np.float64)

    def rec(d, g, o, pos):
        if d == 0 or g == 0:
            return coeffs[pos], 0.0, pos + 1
        v1, dv1, pos = rec(d - 1, g, 0, pos)
        v2, dv2, pos = rec(d, g - 1, o + 1, pos)
        t = points[:, d - 1] - gens[d - 1, o]
        value = v1 + t * v2
        deriv = dv1 + t * dv2
        if d - 1 == dim:
            deriv = deriv + v2
        return value, deriv, pos

    value, deriv, end = rec(m, n, 0, 0)
    assert end == len(coeffs)
    shape = (points.shape[0],)
    return (np.broadcast_to(value, shape).copy(),
            np.broadcast_to(deriv, shape).copy())
