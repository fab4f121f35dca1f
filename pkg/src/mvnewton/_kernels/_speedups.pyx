# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: the fast backend.

Scalar loops over the same operations, in the same order, as the NumPy
reference in ``_ref.py``.
"""

import numpy as np


def dd_line_sweep(double[::1] values, const long long[::1] flat,
                  const long long[::1] starts, const double[::1] gens):
    """In-place divided differences along grid lines of one dimension.

    See ``_ref.dd_line_sweep`` for the contract.  Returns the number of
    update operations performed.
    """
    cdef Py_ssize_t nlines = starts.shape[0] - 1
    cdef Py_ssize_t li, s, e, top, k, l
    cdef double vk, qk
    cdef long long ops = 0
    with nogil:
        for li in range(nlines):
            s = starts[li]
            e = starts[li + 1]
            top = e - s - 1
            for k in range(1, top + 1):
                vk = values[flat[s + k - 1]]
                qk = gens[k - 1]
                for l in range(k, top + 1):
                    values[flat[s + l]] = (values[flat[s + l]] - vk) / (gens[l] - qk)
                ops += top + 1 - k
    return ops


cdef double _eval_rec(const double[::1] coeffs, const double[:, ::1] gens,
                      const double* x, int d, int g, int o,
                      Py_ssize_t* pos, long long* reads) noexcept nogil:
    cdef double v1, v2
    if d == 0 or g == 0:
        reads[0] += 1
        v1 = coeffs[pos[0]]
        pos[0] += 1
        return v1
    v1 = _eval_rec(coeffs, gens, x, d - 1, g, 0, pos, reads)
    v2 = _eval_rec(coeffs, gens, x, d, g - 1, o + 1, pos, reads)
    return v1 + (x[d - 1] - gens[d - 1, o]) * v2


def eval_newton_batch(const double[::1] coeffs, int m, int n,
                      const double[:, ::1] gens, const double[:, ::1] points):
    """Evaluate a tree-ordered Newton polynomial at a batch of points.

    Returns ``(values, reads)`` with ``reads`` the per-point coefficient
    read count (instrumented on the first point).
    """
    cdef Py_ssize_t npts = points.shape[0]
    out = np.empty(npts, dtype=np.float64)
    cdef double[::1] out_mv = out
    cdef Py_ssize_t r, pos
    cdef long long reads = 0
    cdef long long scratch = 0
    with nogil:
        for r in range(npts):
            pos = 0
            if r == 0:
                out_mv[r] = _eval_rec(coeffs, gens, &points[r, 0], m, n, 0,
                                      &pos, &reads)
            else:
                out_mv[r] = _eval_rec(coeffs, gens, &points[r, 0], m, n, 0,
                                      &pos, &scratch)
    return out, int(reads)


cdef void _diff_rec(const double[::1] coeffs, const double[:, ::1] gens,
                    const double* x, int d, int g, int o, int dim,
                    Py_ssize_t* pos, double* val, double* der) noexcept nogil:
    cdef double v1, dv1, v2, dv2, t
    if d == 0 or g == 0:
        val[0] = coeffs[pos[0]]
        der[0] = 0.0
        pos[0] += 1
        return
    _diff_rec(coeffs, gens, x, d - 1, g, 0, dim, pos, &v1, &dv1)
    _diff_rec(coeffs, gens, x, d, g - 1, o + 1, dim, pos, &v2, &dv2)
    t = x[d - 1] - gens[d - 1, o]
    val[0] = v1 + t * v2
    der[0] = dv1 + t * dv2
    if d - 1 == dim:
        der[0] = der[0] + v2


def eval_newton_diff_batch(const double[::1] coeffs, int m, int n,
                           const double[:, ::1] gens,
                           const double[:, ::1] points, int dim):
    """Values and one partial derivative (0-based ``dim``) per point."""
    cdef Py_ssize_t npts = points.shape[0]
    values = np.empty(npts, dtype=np.float64)
    derivs = np.empty(npts, dtype=np.float64)
    cdef double[::1] val_mv = values
    cdef double[::1] der_mv = derivs
    cdef Py_ssize_t r, pos
    cdef double v, dv
    with nogil:
        for r in range(npts):
            pos = 0
            _diff_rec(coeffs, gens, &points[r, 0], m, n, 0, dim, &pos, &v, &dv)
            val_mv[r] = v
            der_mv[r] = dv
    return values, derivs
