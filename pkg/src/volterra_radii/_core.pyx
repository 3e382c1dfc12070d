# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled convolution loops; contracts mirror ``_core_py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def resolvent_recursion(cnp.ndarray[cnp.complex128_t, ndim=3] coeffs_arr):
    """Power-series inversion: X(0) = I, X(n) = sum_{j<n} K(j) X(n-1-j)."""
    cdef Py_ssize_t n = coeffs_arr.shape[0]
    cdef Py_ssize_t d = coeffs_arr.shape[1]
    out_arr = np.zeros((n + 1, d, d), dtype=np.complex128)
    cdef double complex[:, :, ::1] out = out_arr
    cdef double complex[:, :, ::1] coeffs = np.ascontiguousarray(coeffs_arr)
    cdef Py_ssize_t k, j, a, b, c, row
    cdef double complex acc
    for a in range(d):
        out[0, a, a] = 1.0
    for k in range(1, n + 1):
        for a in range(d):
            for c in range(d):
                acc = 0
                for j in range(k):
                    row = k - 1 - j
                    for b in range(d):
                        acc = acc + coeffs[j, a, b] * out[row, b, c]
                out[k, a, c] = acc
    return out_arr


def conv_triangular(cnp.ndarray[cnp.complex128_t, ndim=3] a_arr,
                    cnp.ndarray[cnp.complex128_t, ndim=3] b_arr):
    """Causal convolution c(m) = sum_{i<=m} a(i) b(m-i) of matrix sequences."""
    cdef Py_ssize_t n = a_arr.shape[0]
    cdef Py_ssize_t p = a_arr.shape[1]
    cdef Py_ssize_t q = a_arr.shape[2]
    cdef Py_ssize_t r = b_arr.shape[2]
    out_arr = np.zeros((n, p, r), dtype=np.complex128)
    cdef double complex[:, :, ::1] out = out_arr
    cdef double complex[:, :, ::1] a = np.ascontiguousarray(a_arr)
    cdef double complex[:, :, ::1] b = np.ascontiguousarray(b_arr)
    cdef Py_ssize_t m, i, x, y, z
    cdef double complex acc
    for m in range(n):
        for x in range(p):
            for z in range(r):
                acc = 0
                for i in range(m + 1):
                    for y in range(q):
                        acc = acc + a[i, x, y] * b[m - i, y, z]
                out[m, x, z] = acc
    return out_arr
