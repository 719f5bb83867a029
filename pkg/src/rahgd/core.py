"""Problem oracles, smoothness-constant bookkeeping and oracle-call accounting.

Vectors are plain 1-D float64 numpy arrays.  Every problem is wrapped in an
oracle object that owns an :class:`OracleCounters` instance; each oracle call
increments exactly one counter, so solver comparisons are accounted
identically regardless of which solver drives the oracle.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np


class ConstantsError(ValueError):
    """A declared smoothness constant violates its validity conditions."""


class DivergenceError(RuntimeError):
    """An iteration produced a non-finite value."""


class NonSPDError(RuntimeError):
    """A linear map supplied to CG is not symmetric positive definite."""


class InnerSolveError(RuntimeError):
    """An adaptive inner solve failed to meet its certificate within the cap."""


def as_vector(x, dim=None):
    """Validate and return ``x`` as a finite 1-D float64 array."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector contains non-finite entries")
    return v


def checked_dot(a, b):
    """Euclidean inner product with a hard dimension check."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.dot(a, b))


def checked_axpy(a, x, y):
    """Return a*x + y with a hard dimension check."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return a * x + y


def norm(x):
    """Euclidean norm."""
    x = np.asarray(x, dtype=np.float64)
    return float(np.sqrt(np.dot(x, x)))


@dataclass(frozen=True)
class SmoothnessConstants:
    """Declared per-problem constants.

    ell:     Lipschitz constant of the gradients of both objectives.
    mu:      strong-convexity modulus of the lower-level objective in y.
    rho:     Lipschitz constant of the second derivatives.
    m_bound: Lipschitz constant of the upper-level objective (bounds the
             norm of its partial gradients).
    nu:      Lipschitz constant of the third derivatives of the lower level.
    """

    ell: float
    mu: float
    rho: float = 0.0
    m_bound: float = 0.0
    nu: float = 0.0

    def __post_init__(self):
        vals = (self.ell, self.mu, self.rho, self.m_bound, self.nu)
        if not all(math.isfinite(v) for v in vals):
            raise ConstantsError("smoothness constants must be finite")
        if self.mu <= 0:
            raise ConstantsError(f"strong-convexity modulus must be positive, got {self.mu}")
        if self.ell < self.mu:
            raise ConstantsError(f"need ell >= mu, got ell={self.ell} < mu={self.mu}")
        if self.rho < 0 or self.m_bound < 0 or self.nu < 0:
            raise ConstantsError("rho, m_bound and nu must be nonnegative")


@dataclass(frozen=True)
class DerivedConstants:
    """Condition number and the smoothness constants of the overall objective."""

    kappa: float
    l_tilde: float
    rho_tilde: float


def derive_constants(c: SmoothnessConstants) -> DerivedConstants:
    """Derived constants for the bilevel objective x -> f(x, y*(x)).

    The gradient-Lipschitz constant is

        l_tilde = ell + (2 ell^2 + rho M)/mu + (ell^3 + 2 rho ell M)/mu^2
                  + rho ell^2 M / mu^3

    and the Hessian-Lipschitz constant is the matching three-group closed
    form in powers of (1 + kappa); every term of it carries a factor rho,
    nu or M, so it vanishes for quadratic problems.
    """
    ell, mu, rho, M, nu = c.ell, c.mu, c.rho, c.m_bound, c.nu
    kappa = ell / mu
    l_tilde = ell + (2 * ell**2 + rho * M) / mu + (ell**3 + 2 * rho * ell * M) / mu**2 \
        + rho * ell**2 * M / mu**3
    one_k = 1 + kappa
    rho_tilde = (
        (rho + (2 * ell * rho + M * nu) / mu + (2 * M * ell * nu + rho * ell**2) / mu**2
         + M * ell**2 * nu / mu**3) * one_k
        + (2 * ell * rho / mu + (4 * M * rho**2 + 2 * ell**2 * rho) / mu**2
           + 2 * M * ell * rho**2 / mu**3) * one_k**2
        + (M * rho**2 / mu**2 + rho * ell / mu) * one_k**3
    )
    return DerivedConstants(kappa=kappa, l_tilde=l_tilde, rho_tilde=rho_tilde)


def derive_minimax_constants(c: SmoothnessConstants) -> DerivedConstants:
    """Derived constants for x -> max_y fbar(x, y) with fbar strongly concave in y.

    The max-objective is (kappa+1)*ell smooth with 4*sqrt(2)*kappa^3*rho
    Lipschitz Hessians, much tighter than the general bilevel bounds.
    """
    kappa = c.ell / c.mu
    return DerivedConstants(
        kappa=kappa,
        l_tilde=(kappa + 1) * c.ell,
        rho_tilde=4.0 * math.sqrt(2.0) * kappa**3 * c.rho,
    )


@dataclass
class OracleCounters:
    """Cumulative oracle-call counts for one run."""

    gc_f: int = 0
    gc_g: int = 0
    jv_g: int = 0
    hv_g: int = 0

    def snapshot(self) -> "OracleCounters":
        return OracleCounters(self.gc_f, self.gc_g, self.jv_g, self.hv_g)

    def total(self) -> int:
        return self.gc_f + self.gc_g + self.jv_g + self.hv_g


class _CountingOracle:
    """Shared counter plumbing for the problem oracle wrappers."""

    def __init__(self, dim_x, dim_y, constants):
        if dim_x < 1 or dim_y < 1:
            raise ValueError("dimensions must be positive")
        self.dim_x = int(dim_x)
        self.dim_y = int(dim_y)
        self.constants = constants
        self.counters = OracleCounters()

    def reset_counters(self):
        self.counters = OracleCounters()

    @contextmanager
    def counter_scope(self):
        """Swap in a fresh counter set for the scope; yields the scoped counters.

        Used by verification code so diagnostic oracle calls never pollute a
        solver run's accounting.
        """
        saved = self.counters
        self.counters = OracleCounters()
        try:
            yield self.counters
        finally:
            self.counters = saved


class BilevelOracle(_CountingOracle):
    """Black-box oracle access to a bilevel problem min_x f(x, y*(x)).

    The problem supplies callables for the partial gradients of f and g, the
    application of the lower-level Hessian to a vector, and the application
    of the mixed second-derivative block to a vector.  The wrapper owns the
    call counters; one instance is owned by exactly one run at a time.
    """

    def __init__(self, dim_x, dim_y, constants, grad_f_x, grad_f_y, grad_g_y,
                 hvp_g_yy, jvp_g_xy, value_f=None, value_g=None):
        super().__init__(dim_x, dim_y, constants)
        self._grad_f_x = grad_f_x
        self._grad_f_y = grad_f_y
        self._grad_g_y = grad_g_y
        self._hvp_g_yy = hvp_g_yy
        self._jvp_g_xy = jvp_g_xy
        self._value_f = value_f
        self._value_g = value_g

    def grad_f_x(self, x, y):
        self.counters.gc_f += 1
        return self._grad_f_x(x, y)

    def grad_f_y(self, x, y):
        self.counters.gc_f += 1
        return self._grad_f_y(x, y)

    def grad_g_y(self, x, y):
        self.counters.gc_g += 1
        return self._grad_g_y(x, y)

    def hvp_g_yy(self, x, y, v):
        """Apply the lower-level Hessian in y to v (SPD, eigenvalues in [mu, ell])."""
        self.counters.hv_g += 1
        return self._hvp_g_yy(x, y, v)

    def jvp_g_xy(self, x, y, v):
        """Apply the mixed x-y second-derivative block to v in R^dim_y -> R^dim_x."""
        self.counters.jv_g += 1
        return self._jvp_g_xy(x, y, v)

    @property
    def has_values(self):
        return self._value_f is not None and self._value_g is not None

    def value_f(self, x, y):
        if self._value_f is None:
            raise NotImplementedError("problem does not expose an upper-level value")
        return float(self._value_f(x, y))

    def value_g(self, x, y):
        if self._value_g is None:
            raise NotImplementedError("problem does not expose a lower-level value")
        return float(self._value_g(x, y))


class MinimaxOracle(_CountingOracle):
    """Black-box oracle access to min_x max_y fbar(x, y), strongly concave in y.

    Only first-order oracles exist.  The x-gradient counts toward gc_f and
    the y-gradient toward gc_g (the inner maximization plays the role of the
    lower level), which keeps accounting comparable with plain descent-ascent.
    """

    def __init__(self, dim_x, dim_y, constants, grad_fbar_x, grad_fbar_y, value=None):
        super().__init__(dim_x, dim_y, constants)
        self._grad_fbar_x = grad_fbar_x
        self._grad_fbar_y = grad_fbar_y
        self._value = value

    def grad_fbar_x(self, x, y):
        self.counters.gc_f += 1
        return self._grad_fbar_x(x, y)

    def grad_fbar_y(self, x, y):
        self.counters.gc_g += 1
        return self._grad_fbar_y(x, y)

    @property
    def has_values(self):
        return self._value is not None

    def value(self, x, y):
        if self._value is None:
            raise NotImplementedError("problem does not expose a value")
        return float(self._value(x, y))
