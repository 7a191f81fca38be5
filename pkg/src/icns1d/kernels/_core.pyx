# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: tridiagonal solve and stencil/flux loops.

Mirrors the signatures of numpy_backend; selected automatically at import
of icns1d.kernels when built.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "compiled"


def thomas(double[::1] lower, double[::1] diag, double[::1] upper, double[::1] rhs):
    """Thomas algorithm for lower[i]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1] = rhs[i]."""
    cdef Py_ssize_t n = diag.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cp_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] cp = cp_arr
    cdef Py_ssize_t i
    cdef double m

    cp[0] = upper[0] / diag[0]
    x[0] = rhs[0] / diag[0]
    for i in range(1, n):
        m = diag[i] - lower[i] * cp[i - 1]
        if i < n - 1:
            cp[i] = upper[i] / m
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / m
    for i in range(n - 2, -1, -1):
        x[i] = x[i] - cp[i] * x[i + 1]
    return x_arr


def interface_flux(double[::1] fnode, double[::1] q, double[::1] speed, double theta):
    """Blended central/local-Lax-Friedrichs flux at the n-1 interfaces."""
    cdef Py_ssize_t n = fnode.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(n - 1, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double a
    for i in range(n - 1):
        a = speed[i] if speed[i] > speed[i + 1] else speed[i + 1]
        out[i] = 0.5 * (fnode[i] + fnode[i + 1]) - 0.5 * theta * a * (q[i + 1] - q[i])
    return out_arr


def advect_biased(double[::1] u, double[::1] q, double dx, double theta):
    """u * q_x with upwind-style bias in the interior; zero at the ends."""
    cdef Py_ssize_t n = u.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double au
    for i in range(1, n - 1):
        au = u[i] if u[i] >= 0 else -u[i]
        out[i] = u[i] * (q[i + 1] - q[i - 1]) / (2.0 * dx) \
            - 0.5 * theta * au * (q[i + 1] - 2.0 * q[i] + q[i - 1]) / dx
    return out_arr
