# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled round-evaluation core: feature maps + predictions per subset."""
from libc.math cimport sin, cos, sqrt

import numpy as np
cimport numpy as cnp

cnp.import_array()


def evaluate_subset(double[:, :, ::1] psi_stack, double[:, ::1] thetas,
                    cnp.intp_t[::1] subset, double[::1] x):
    """Same contract as the pure-NumPy backend's evaluate_subset."""
    cdef Py_ssize_t m = subset.shape[0]
    cdef Py_ssize_t num_rf = psi_stack.shape[1]
    cdef Py_ssize_t dim = psi_stack.shape[2]
    cdef double scale = 1.0 / sqrt(<double> num_rf)

    z_arr = np.empty((m, 2 * num_rf), dtype=np.float64)
    preds_arr = np.empty(m, dtype=np.float64)
    cdef double[:, ::1] z = z_arr
    cdef double[::1] preds = preds_arr

    cdef Py_ssize_t k, j, c, ki
    cdef double proj, acc
    for k in range(m):
        ki = subset[k]
        acc = 0.0
        for j in range(num_rf):
            proj = 0.0
            for c in range(dim):
                proj += psi_stack[ki, j, c] * x[c]
            z[k, j] = sin(proj) * scale
            z[k, num_rf + j] = cos(proj) * scale
            acc += thetas[ki, j] * z[k, j]
            acc += thetas[ki, num_rf + j] * z[k, num_rf + j]
        preds[k] = acc
    return z_arr, preds_arr
