"""Inner-loop engines: momentum descent (AGD) and linear conjugate gradient.

Both run either for a fixed iteration count (the schedule-driven mode) or
until a residual tolerance is met (adaptive mode).  Reported iteration
counts are the number of oracle applications made, which is what the
outer-loop accounting charges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import active as _k
from .core import DivergenceError, NonSPDError

# residual floor (relative to ||b||) below which CG exits to avoid dividing by ~0
_CG_BREAKDOWN_REL = 1e-14


@dataclass(frozen=True)
class AgdParams:
    """Step size, momentum, iteration budget and optional gradient tolerance."""

    alpha: float
    beta: float
    t_max: int
    tol: float | None = None

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError(f"step size must be positive, got {self.alpha}")
        if not 0 <= self.beta < 1:
            raise ValueError(f"momentum must lie in [0, 1), got {self.beta}")
        if self.t_max < 0:
            raise ValueError(f"iteration budget must be >= 0, got {self.t_max}")
        if self.tol is not None and self.tol <= 0:
            raise ValueError(f"tolerance must be positive, got {self.tol}")


@dataclass(frozen=True)
class CgParams:
    """Iteration budget and optional residual-norm tolerance."""

    t_max: int
    tol: float | None = None

    def __post_init__(self):
        if self.t_max < 0:
            raise ValueError(f"iteration budget must be >= 0, got {self.t_max}")
        if self.tol is not None and self.tol <= 0:
            raise ValueError(f"tolerance must be positive, got {self.tol}")


def agd(grad_h, z0, p: AgdParams):
    """Momentum descent on a smooth strongly convex h from z0.

    Runs the constant-momentum recursion

        z_{t+1} = z~_t - alpha * grad_h(z~_t)
        z~_{t+1} = z_{t+1} + beta * (z_{t+1} - z_t)

    with z~_0 = z0 for t_max steps and returns (z_final, gradient_calls).
    In adaptive mode (p.tol set) the gradient is checked before each step
    and the loop exits at the evaluation point as soon as its norm is at
    most p.tol; strong convexity then certifies
    ||z - z*|| <= ||grad_h(z)|| / mu_h.
    """
    z = np.ascontiguousarray(z0, dtype=np.float64)
    zt = z
    calls = 0
    for t in range(p.t_max):
        g = np.ascontiguousarray(grad_h(zt), dtype=np.float64)
        calls += 1
        if not np.all(np.isfinite(g)):
            raise DivergenceError(f"non-finite gradient at inner iteration {t}")
        if p.tol is not None and float(np.sqrt(np.dot(g, g))) <= p.tol:
            return zt, calls
        z, zt = _k.agd_step(z, zt, g, p.alpha, p.beta)
    return z, calls


def cg(apply_a, b, q0, p: CgParams):
    """Conjugate gradient for A q = b with a matrix-free SPD map.

    Returns (q_final, applications_of_A).  The count includes the initial
    residual computation A q0.  Adaptive mode (p.tol set) exits once the
    recursively tracked residual norm is at most p.tol.  A search direction
    with nonpositive curvature aborts with NonSPDError; a residual below
    1e-14 * ||b|| exits cleanly before the next division.
    """
    b = np.ascontiguousarray(b, dtype=np.float64)
    q = np.ascontiguousarray(q0, dtype=np.float64)
    if q.shape != b.shape:
        raise ValueError(f"dimension mismatch: q0 {q.shape} vs b {b.shape}")
    if p.t_max == 0:
        return q, 0

    applies = 1
    r = np.ascontiguousarray(np.asarray(apply_a(q), dtype=np.float64) - b)
    rr = float(np.dot(r, r))
    pdir = -r
    breakdown = _CG_BREAKDOWN_REL * float(np.sqrt(np.dot(b, b)))
    for t in range(p.t_max):
        rnorm = np.sqrt(rr)
        if rnorm <= breakdown:
            break
        if p.tol is not None and rnorm <= p.tol:
            break
        ap = np.ascontiguousarray(apply_a(pdir), dtype=np.float64)
        applies += 1
        pap = _k.dot(pdir, ap)
        if pap <= 0.0:
            raise NonSPDError(
                f"nonpositive curvature p'Ap = {pap:.3e} at CG iteration {t}; "
                "the supplied map is not positive definite"
            )
        alpha = rr / pap
        q, r, rr_new = _k.cg_step(q, r, pdir, ap, alpha)
        if not np.isfinite(rr_new):
            raise DivergenceError(f"non-finite residual at CG iteration {t}")
        beta = rr_new / rr
        pdir = _k.cg_direction(r, pdir, beta)
        rr = rr_new
    return q, applies
