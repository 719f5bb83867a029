"""Numpy implementations of the step kernels (fallback lane)."""

import numpy as np


def dot(a, b):
    return float(np.dot(a, b))


def agd_step(z, z_tilde, grad, alpha, beta):
    """One momentum-descent update: returns (z_next, z_tilde_next)."""
    z_next = z_tilde - alpha * grad
    zt_next = z_next + beta * (z_next - z)
    return z_next, zt_next


def cg_step(q, r, p, ap, alpha):
    """Apply the CG point/residual update: returns (q_next, r_next, r_next.r_next)."""
    q_next = q + alpha * p
    r_next = r + alpha * ap
    return q_next, r_next, float(np.dot(r_next, r_next))


def cg_direction(r, p, beta):
    """Next CG search direction -r + beta*p."""
    return -r + beta * p
