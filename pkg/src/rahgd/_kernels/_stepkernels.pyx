# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled step kernels: fused per-iteration updates for the inner loops."""

import numpy as np


def dot(double[::1] a, double[::1] b):
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double s = 0.0
    for i in range(n):
        s += a[i] * b[i]
    return s


def agd_step(double[::1] z, double[::1] z_tilde, double[::1] grad,
             double alpha, double beta):
    """One momentum-descent update: returns (z_next, z_tilde_next)."""
    cdef Py_ssize_t i, n = z.shape[0]
    z_next = np.empty(n, dtype=np.float64)
    zt_next = np.empty(n, dtype=np.float64)
    cdef double[::1] zn = z_next
    cdef double[::1] ztn = zt_next
    cdef double zi
    for i in range(n):
        zi = z_tilde[i] - alpha * grad[i]
        zn[i] = zi
        ztn[i] = zi + beta * (zi - z[i])
    return z_next, zt_next


def cg_step(double[::1] q, double[::1] r, double[::1] p, double[::1] ap,
            double alpha):
    """Apply the CG point/residual update: returns (q_next, r_next, r_next.r_next)."""
    cdef Py_ssize_t i, n = q.shape[0]
    q_next = np.empty(n, dtype=np.float64)
    r_next = np.empty(n, dtype=np.float64)
    cdef double[::1] qn = q_next
    cdef double[::1] rn = r_next
    cdef double ri, rr = 0.0
    for i in range(n):
        qn[i] = q[i] + alpha * p[i]
        ri = r[i] + alpha * ap[i]
        rn[i] = ri
        rr += ri * ri
    return q_next, r_next, rr


def cg_direction(double[::1] r, double[::1] p, double beta):
    """Next CG search direction -r + beta*p."""
    cdef Py_ssize_t i, n = r.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    for i in range(n):
        o[i] = beta * p[i] - r[i]
    return out
