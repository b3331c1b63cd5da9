# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: gram assembly, deflation sweep, double centering.

Mirrors kpls._core_fallback. Each routine fuses what the numpy versions
do in several passes over the n x n matrix into one, and fills both
triangles from a single computation so outputs are bitwise symmetric.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()

IS_COMPILED = True


def rbf_gram(double[:, ::1] X, double width):
    """Gaussian gram matrix exp(-|x_i - x_j|^2 / (2 width^2))."""
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t d = X.shape[1]
    out = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] K = out
    cdef Py_ssize_t i, j, k
    cdef double acc, diff
    cdef double scale = -1.0 / (2.0 * width * width)
    for i in range(n):
        K[i, i] = 1.0
        for j in range(i + 1, n):
            acc = 0.0
            for k in range(d):
                diff = X[i, k] - X[j, k]
                acc += diff * diff
            acc = exp(acc * scale)
            K[i, j] = acc
            K[j, i] = acc
    return out


def linear_gram(double[:, ::1] X):
    """Inner-product gram matrix X X^T, bitwise symmetric."""
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t d = X.shape[1]
    out = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] K = out
    cdef Py_ssize_t i, j, k
    cdef double acc
    for i in range(n):
        for j in range(i, n):
            acc = 0.0
            for k in range(d):
                acc += X[i, k] * X[j, k]
            K[i, j] = acc
            K[j, i] = acc
    return out


def deflate_inplace(double[:, ::1] K, double[::1] t, double[::1] u, double c):
    """K <- K - t u' - u t' + c t t' in one pass, given u = K t, c = t' u.

    The per-entry update (t_i u_j + u_i t_j) - c (t_i t_j) is symmetric in
    (i, j) term by term, so a symmetric K stays bitwise symmetric.
    """
    cdef Py_ssize_t n = K.shape[0]
    cdef Py_ssize_t i, j
    cdef double ti, ui
    for i in range(n):
        ti = t[i]
        ui = u[i]
        for j in range(n):
            K[i, j] -= ti * u[j] + ui * t[j] - c * (ti * t[j])


def center_inplace(double[:, ::1] K):
    """Double-center K in place; returns (column means, grand mean) of the input."""
    cdef Py_ssize_t n = K.shape[0]
    means_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] means = means_arr
    cdef Py_ssize_t i, j
    cdef double acc, grand
    for j in range(n):
        acc = 0.0
        for i in range(n):
            acc += K[i, j]
        means[j] = acc / n
    acc = 0.0
    for j in range(n):
        acc += means[j]
    grand = acc / n
    for i in range(n):
        for j in range(n):
            K[i, j] = K[i, j] - (means[i] + means[j]) + grand
    return means_arr, grand
