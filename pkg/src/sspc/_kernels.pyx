"""Compiled inner loops. Semantics mirror ``sspc._kernels_py`` exactly."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def fwht(double[:, ::1] data):
    """Unnormalised Walsh-Hadamard transform of every row, in place."""
    cdef Py_ssize_t rows = data.shape[0], n = data.shape[1]
    cdef Py_ssize_t r, h, i, j
    cdef double x, y
    if n & (n - 1):
        raise ValueError("row length must be a power of two")
    for r in range(rows):
        h = 1
        while h < n:
            i = 0
            while i < n:
                for j in range(i, i + h):
                    x = data[r, j]
                    y = data[r, j + h]
                    data[r, j] = x + y
                    data[r, j + h] = x - y
                i += 2 * h
            h *= 2


def xor_convolve(const double[::1] a, const double[::1] b):
    """out[s] = sum_t a[t] * b[s ^ t], summed in ascending t."""
    cdef Py_ssize_t n = a.shape[0], s, t
    cdef double acc
    if b.shape[0] != n:
        raise ValueError("length mismatch")
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    for s in range(n):
        acc = 0.0
        for t in range(n):
            acc += a[t] * b[s ^ t]
        o[s] = acc
    return out


cdef void _matmul(const double complex[:, ::1] a, const double complex[:, ::1] b,
                  double complex[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t d = a.shape[0], i, j, k
    cdef double complex acc
    for i in range(d):
        for j in range(d):
            acc = 0
            for k in range(d):
                acc = acc + a[i, k] * b[k, j]
            out[i, j] = acc


def prefix_products(const double complex[:, :, ::1] mats):
    """out[j] = mats[j] @ mats[j-1] @ ... @ mats[0]."""
    cdef Py_ssize_t n = mats.shape[0], d = mats.shape[1], j
    out = np.empty((n, d, d), dtype=np.complex128)
    cdef double complex[:, :, ::1] o = out
    if n == 0:
        return out
    o[0, :, :] = mats[0, :, :]
    with nogil:
        for j in range(1, n):
            _matmul(mats[j], o[j - 1], o[j])
    return out


def suffix_products(const double complex[:, :, ::1] mats):
    """out[j] = mats[n-1] @ ... @ mats[j+1] @ mats[j]."""
    cdef Py_ssize_t n = mats.shape[0], d = mats.shape[1], j
    out = np.empty((n, d, d), dtype=np.complex128)
    cdef double complex[:, :, ::1] o = out
    if n == 0:
        return out
    o[n - 1, :, :] = mats[n - 1, :, :]
    with nogil:
        for j in range(n - 2, -1, -1):
            _matmul(o[j + 1], mats[j], o[j])
    return out
