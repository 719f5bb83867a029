"""Outer loops: restarted accelerated hypergradient descent and baselines.

The accelerated solvers share one epoch structure.  Within an epoch the
iterates follow a constant-momentum extrapolation

    w_k     = x_k + (1 - theta) (x_k - x_{k-1})
    x_{k+1} = w_k - eta * u_k

where u_k is the inexact hypergradient at w_k.  After incrementing k the
displacement test  k * sum_{i<k} ||x_{i+1} - x_i||^2 > B^2  may fire; if so
the epoch ends, momentum is reset, the CG warm start is carried over, the
inner warm start is rebuilt from zero at the restart point, and (optionally)
a uniform-ball perturbation is added to escape saddle points.  The first
epoch to complete K iterations without firing is the last one; its output is
the average of w_0..w_K0 where K0 minimizes the displacement over the second
half of the epoch.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .core import (
    BilevelOracle,
    ConstantsError,
    DerivedConstants,
    DivergenceError,
    MinimaxOracle,
    OracleCounters,
    SmoothnessConstants,
    derive_constants,
    norm,
)
from .hypergrad import (
    BudgetInputs,
    InnerState,
    budget_agd,
    epoch_init_agd,
    inexact_hypergradient,
    inner_solve,
)
from .subroutines import AgdParams, agd

TERM_COMPLETED = "epoch_completed_without_restart"
TERM_MAX_EPOCHS = "max_epochs_hit"
TERM_WALL_CLOCK = "wall_clock_exhausted"
TERM_FIXED_ITERS = "fixed_iters_completed"

DEFAULT_MAX_EPOCHS = 10_000


@dataclass
class SolverConfig:
    """Every tunable of the restarted accelerated solvers.

    The schedule fields (eta, theta, big_b, big_k, sigma, r) are normally
    filled by :func:`default_config_fosp` / :func:`default_config_sosp` from
    the derived constants; kappa / l_tilde / rho_tilde record the constants
    the schedule was built from so the inner budgets agree with it.
    """

    epsilon: float
    eta: float
    theta: float
    big_b: float
    big_k: int
    alpha: float
    beta: float
    sigma: float
    kappa: float
    l_tilde: float
    rho_tilde: float
    perturbation: bool = False
    r: float = 0.0
    zeta: float = 0.1
    chi: int = 0
    c_const: float = 1.0
    c_hat: float | None = None
    delta_hat: float | None = None
    max_epochs: int | None = None
    mode: str = "theory"
    seed: int = 0
    max_inner: int = 10**6
    max_wall_seconds: float | None = None

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError(f"outer step size must be positive, got {self.eta}")
        if not 0 < self.theta < 1:
            raise ValueError(f"momentum parameter must lie in (0,1), got {self.theta}")
        if self.big_b <= 0:
            raise ValueError(f"restart radius must be positive, got {self.big_b}")
        if self.big_k < 1:
            raise ValueError(f"epoch iteration cap must be >= 1, got {self.big_k}")
        if self.sigma <= 0:
            raise ValueError(f"hypergradient accuracy must be positive, got {self.sigma}")
        if self.r < 0:
            raise ValueError(f"perturbation radius must be >= 0, got {self.r}")
        if not 0 < self.zeta < 1:
            raise ValueError(f"failure probability must lie in (0,1), got {self.zeta}")
        if self.mode not in ("theory", "adaptive"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def resolved_max_epochs(self) -> int:
        if self.max_epochs is not None:
            return self.max_epochs
        if self.delta_hat is not None and self.rho_tilde > 0:
            return math.ceil(
                10.0 * self.delta_hat * math.sqrt(self.rho_tilde) * self.epsilon ** (-1.5)
            )
        return DEFAULT_MAX_EPOCHS


@dataclass
class TraceRecord:
    """One outer iteration: indices, norms and cumulative oracle counters."""

    epoch: int
    iter: int
    hypergrad_norm: float
    step_norm: float
    gc_f: int
    gc_g: int
    jv_g: int
    hv_g: int
    wall_ms: float = 0.0
    # diagnostics beyond the pinned trace schema
    x_dist_epoch_start: float = 0.0
    w_dist_epoch_start: float = 0.0


@dataclass
class RunReport:
    """Everything a run produced: output point, trace, counters, events."""

    w_hat: np.ndarray
    epochs: int
    total_outer_iters: int
    counters: OracleCounters
    trace: list[TraceRecord]
    termination: str
    config: SolverConfig | None = None
    perturbations: list[tuple[int, float]] = field(default_factory=list)
    epoch_starts: list[np.ndarray] = field(default_factory=list)
    final_epoch_w: list[np.ndarray] | None = None
    k0: int | None = None
    points: list[np.ndarray] | None = None
    y_final: np.ndarray | None = None


def _ceil_int(x):
    return int(math.ceil(x))


def default_config_fosp(dc: DerivedConstants, sc: SmoothnessConstants, epsilon,
                        rho_tilde_floor=None) -> SolverConfig:
    """Schedule targeting a first-order stationary point at accuracy epsilon.

    eta = 1/(4 l_tilde), B = sqrt(eps/rho_tilde), theta = 4 (rho_tilde eps
    eta^2)^(1/4), K = ceil(1/theta), alpha = 1/ell, beta = (sqrt(kappa)-1)/
    (sqrt(kappa)+1), sigma = eps^2, no perturbation.  Requires
    eps <= l_tilde^2 / rho_tilde.  An exactly quadratic objective has
    rho_tilde = 0, for which B and theta are undefined; pass a positive
    rho_tilde_floor (any upper bound on the true constant is valid, e.g.
    1e-12 or larger) to proceed.
    """
    rho_tilde = dc.rho_tilde
    if rho_tilde == 0.0:
        if rho_tilde_floor is None or rho_tilde_floor <= 0:
            raise ConstantsError(
                "rho_tilde = 0 (exactly quadratic objective): the restart radius and "
                "momentum are undefined; supply rho_tilde_floor >= 1e-12 to proceed"
            )
        rho_tilde = float(rho_tilde_floor)
    if epsilon <= 0:
        raise ValueError(f"accuracy target must be positive, got {epsilon}")
    if epsilon > dc.l_tilde**2 / rho_tilde:
        raise ConstantsError(
            f"accuracy target {epsilon} exceeds l_tilde^2/rho_tilde = "
            f"{dc.l_tilde ** 2 / rho_tilde:.3e}; the schedule is valid only below it"
        )
    eta = 1.0 / (4.0 * dc.l_tilde)
    theta = 4.0 * (rho_tilde * epsilon * eta**2) ** 0.25
    sk = math.sqrt(dc.kappa)
    return SolverConfig(
        epsilon=float(epsilon),
        eta=eta,
        theta=theta,
        big_b=math.sqrt(epsilon / rho_tilde),
        big_k=_ceil_int(1.0 / theta),
        alpha=1.0 / sc.ell,
        beta=(sk - 1.0) / (sk + 1.0),
        sigma=epsilon**2,
        kappa=dc.kappa,
        l_tilde=dc.l_tilde,
        rho_tilde=rho_tilde,
        perturbation=False,
    )


def perturbation_radius(l_tilde, big_b, theta, big_k, c_const):
    """Smallest of the four admissible perturbation radii for the schedule."""
    return min(
        l_tilde * big_b**2 / (4.0 * c_const),
        (big_b + big_b**2) / math.sqrt(2.0),
        theta * big_b / (20.0 * big_k),
        math.sqrt(theta * big_b**2 / (2.0 * big_k)),
    )


def default_config_sosp(dc: DerivedConstants, sc: SmoothnessConstants, epsilon,
                        zeta, d_x, rho_tilde_floor=None) -> SolverConfig:
    """Schedule targeting a second-order stationary point at accuracy epsilon.

    chi = ceil(log(d_x/(zeta eps))), theta = (rho_tilde eps eta^2)^(1/4)/2,
    K = ceil(2 chi / theta), B = sqrt(eps/rho_tilde)/(288 chi^2), r from the
    four-way minimum, sigma = min(rho_tilde B zeta r theta / (2 sqrt(d_x)),
    eps^2).  The radius r does not depend on sigma, so it is evaluated first.
    """
    rho_tilde = dc.rho_tilde
    if rho_tilde == 0.0:
        if rho_tilde_floor is None or rho_tilde_floor <= 0:
            raise ConstantsError(
                "rho_tilde = 0 (exactly quadratic objective): the restart radius and "
                "momentum are undefined; supply rho_tilde_floor >= 1e-12 to proceed"
            )
        rho_tilde = float(rho_tilde_floor)
    if epsilon <= 0:
        raise ValueError(f"accuracy target must be positive, got {epsilon}")
    if not 0 < zeta < 1:
        raise ValueError(f"failure probability must lie in (0,1), got {zeta}")
    if d_x < 1:
        raise ValueError(f"dimension must be >= 1, got {d_x}")
    if epsilon > dc.l_tilde**2 / rho_tilde:
        raise ConstantsError(
            f"accuracy target {epsilon} exceeds l_tilde^2/rho_tilde = "
            f"{dc.l_tilde ** 2 / rho_tilde:.3e}; the schedule is valid only below it"
        )
    chi = _ceil_int(math.log(d_x / (zeta * epsilon)))
    eta = 1.0 / (4.0 * dc.l_tilde)
    theta = 0.5 * (rho_tilde * epsilon * eta**2) ** 0.25
    big_k = _ceil_int(2.0 * chi / theta)
    big_b = math.sqrt(epsilon / rho_tilde) / (288.0 * chi**2)
    c_const = 1.0
    r = perturbation_radius(dc.l_tilde, big_b, theta, big_k, c_const)
    sigma = min(rho_tilde * big_b * zeta * r * theta / (2.0 * math.sqrt(d_x)), epsilon**2)
    sk = math.sqrt(dc.kappa)
    return SolverConfig(
        epsilon=float(epsilon),
        eta=eta,
        theta=theta,
        big_b=big_b,
        big_k=big_k,
        alpha=1.0 / sc.ell,
        beta=(sk - 1.0) / (sk + 1.0),
        sigma=sigma,
        kappa=dc.kappa,
        l_tilde=dc.l_tilde,
        rho_tilde=rho_tilde,
        perturbation=True,
        r=r,
        zeta=float(zeta),
        chi=chi,
        c_const=c_const,
    )


def sample_ball(d, r, rng):
    """Uniform draw from the closed Euclidean ball of radius r in R^d.

    Direction from a normalized Gaussian, radius r * U^(1/d).
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    g = rng.standard_normal(d)
    gn = norm(g)
    if gn == 0.0:
        return np.zeros(d)
    u = rng.uniform()
    return (r * u ** (1.0 / d) / gn) * g


class _EpochLoop:
    """Shared restart/averaging skeleton for the accelerated solvers."""

    def __init__(self, problem, x0, cfg: SolverConfig, record_points=False):
        self.problem = problem
        self.cfg = cfg
        self.record_points = record_points
        self.rng = np.random.default_rng(cfg.seed)
        self.x0 = np.asarray(x0, dtype=np.float64).copy()
        self.trace: list[TraceRecord] = []
        self.points: list[np.ndarray] | None = [] if record_points else None
        self.perturbations: list[tuple[int, float]] = []
        self.epoch_starts: list[np.ndarray] = []
        self.total_iters = 0
        self.t0 = time.monotonic()

    # hooks implemented by the concrete solvers -------------------------------
    def open_epoch(self, anchor):
        raise NotImplementedError

    def carry_warm_starts_on_restart(self):
        raise NotImplementedError

    def hypergradient_at(self, w, k):
        raise NotImplementedError

    # --------------------------------------------------------------------------
    def _wall_exhausted(self):
        cap = self.cfg.max_wall_seconds
        return cap is not None and (time.monotonic() - self.t0) > cap

    def _record(self, t, k, u_norm, disp, x_dist, w_dist):
        c = self.problem.counters
        self.trace.append(TraceRecord(
            epoch=t, iter=k, hypergrad_norm=u_norm, step_norm=disp,
            gc_f=c.gc_f, gc_g=c.gc_g, jv_g=c.jv_g, hv_g=c.hv_g,
            x_dist_epoch_start=x_dist, w_dist_epoch_start=w_dist,
        ))

    def _report(self, w_hat, termination, final_epoch_w=None, k0=None):
        return RunReport(
            w_hat=w_hat,
            epochs=len(self.epoch_starts),
            total_outer_iters=self.total_iters,
            counters=self.problem.counters.snapshot(),
            trace=self.trace,
            termination=termination,
            config=self.cfg,
            perturbations=self.perturbations,
            epoch_starts=self.epoch_starts,
            final_epoch_w=final_epoch_w,
            k0=k0,
            points=self.points,
        )

    def run(self):
        cfg = self.cfg
        max_epochs = cfg.resolved_max_epochs()
        big_b_sq = cfg.big_b**2
        one_minus_theta = 1.0 - cfg.theta

        t = 0
        k = 0
        x_prev = self.x0.copy()
        x_cur = self.x0.copy()
        epoch_start = self.x0.copy()
        self.epoch_starts.append(epoch_start.copy())
        self.open_epoch(x_cur)
        disp_sq_sum = 0.0
        disps: list[float] = []
        w_hist: list[np.ndarray] = []

        while k < cfg.big_k:
            if self._wall_exhausted():
                return self._report(x_cur.copy(), TERM_WALL_CLOCK)
            w = x_cur + one_minus_theta * (x_cur - x_prev)
            u = self.hypergradient_at(w, k)
            if not np.all(np.isfinite(u)):
                raise DivergenceError(
                    f"non-finite hypergradient at epoch {t}, iteration {k}; "
                    f"last iterate norm {norm(x_cur):.3e}"
                )
            x_next = w - cfg.eta * u
            if not np.all(np.isfinite(x_next)):
                raise DivergenceError(
                    f"non-finite iterate at epoch {t}, iteration {k}"
                )
            disp = norm(x_next - x_cur)
            w_hist.append(w)
            disps.append(disp)
            disp_sq_sum += disp * disp
            self._record(t, k, norm(u), disp,
                         x_dist=norm(x_cur - epoch_start),
                         w_dist=norm(w - epoch_start))
            if self.points is not None:
                self.points.append(w)
            self.total_iters += 1
            x_prev, x_cur = x_cur, x_next
            k += 1

            if k * disp_sq_sum > big_b_sq:
                self.carry_warm_starts_on_restart()
                if cfg.perturbation:
                    xi = sample_ball(self.problem.dim_x, cfg.r, self.rng)
                    x_cur = x_cur + xi
                    self.perturbations.append((t + 1, norm(xi)))
                x_prev = x_cur.copy()
                t += 1
                k = 0
                if t >= max_epochs:
                    return self._report(x_cur.copy(), TERM_MAX_EPOCHS)
                epoch_start = x_cur.copy()
                self.epoch_starts.append(epoch_start.copy())
                self.open_epoch(x_cur)
                disp_sq_sum = 0.0
                disps = []
                w_hist = []

        # final epoch completed all K iterations without a restart
        lo = cfg.big_k // 2
        k0 = lo + int(np.argmin(np.asarray(disps[lo:cfg.big_k])))
        w_hat = np.mean(np.asarray(w_hist[: k0 + 1]), axis=0)
        return self._report(w_hat, TERM_COMPLETED,
                            final_epoch_w=w_hist, k0=k0)


class _BilevelLoop(_EpochLoop):
    def __init__(self, problem: BilevelOracle, x0, cfg, record_points=False):
        super().__init__(problem, x0, cfg, record_points)
        self.sc = problem.constants
        self.y_warm = None
        self.v_warm = None
        self.v_carry = None
        self.v_init_norm = 0.0
        self.last_y = None
        self.last_v = None

    def _budgets(self):
        cfg = self.cfg
        c_hat = cfg.c_hat
        if c_hat is None:
            prev = self.y_warm if self.y_warm is not None else np.zeros(self.problem.dim_y)
            c_hat = 10.0 * (1.0 + norm(prev))
        return BudgetInputs(
            sigma=cfg.sigma, kappa=cfg.kappa, l_tilde=cfg.l_tilde,
            ell=self.sc.ell, mu=self.sc.mu, m_bound=self.sc.m_bound,
            big_b=cfg.big_b, c_hat=c_hat, v_init_norm=self.v_init_norm,
        )

    def open_epoch(self, anchor):
        cfg = self.cfg
        y, _ = epoch_init_agd(self.problem, anchor, cfg.mode, self._budgets(),
                              cfg.alpha, cfg.beta, cfg.max_inner)
        self.y_warm = y
        if self.v_carry is None:
            # very first epoch: seed the CG warm start with the inner solution
            self.v_warm = y.copy()
        else:
            self.v_warm = self.v_carry
        self.v_init_norm = norm(self.v_warm)

    def carry_warm_starts_on_restart(self):
        self.v_carry = self.last_v

    def hypergradient_at(self, w, k):
        cfg = self.cfg
        y, v, state = inner_solve(
            self.problem, w, InnerState(self.y_warm, self.v_warm), cfg.sigma,
            cfg.mode, self._budgets(), k, cfg.alpha, cfg.beta, cfg.max_inner,
        )
        self.y_warm, self.v_warm = state.y_warm, state.v_warm
        self.last_y, self.last_v = y, v
        return inexact_hypergradient(self.problem, w, y, v)


class _MinimaxLoop(_EpochLoop):
    def __init__(self, problem: MinimaxOracle, x0, cfg, record_points=False):
        super().__init__(problem, x0, cfg, record_points)
        self.sc = problem.constants
        self.y_warm = None

    def _budgets(self):
        cfg = self.cfg
        c_hat = cfg.c_hat
        if c_hat is None:
            prev = self.y_warm if self.y_warm is not None else np.zeros(self.problem.dim_y)
            c_hat = 10.0 * (1.0 + norm(prev))
        return BudgetInputs(
            sigma=cfg.sigma, kappa=cfg.kappa, l_tilde=cfg.l_tilde,
            ell=self.sc.ell, mu=self.sc.mu, m_bound=self.sc.m_bound,
            big_b=cfg.big_b, c_hat=c_hat, v_init_norm=0.0,
        )

    def open_epoch(self, anchor):
        cfg = self.cfg
        y, _ = epoch_init_agd(self.problem, anchor, cfg.mode, self._budgets(),
                              cfg.alpha, cfg.beta, cfg.max_inner)
        self.y_warm = y

    def carry_warm_starts_on_restart(self):
        pass  # no CG state in the minimax loop

    def hypergradient_at(self, w, k):
        cfg = self.cfg
        budgets = self._budgets()
        grad_h = lambda z: -self.problem.grad_fbar_y(w, z)
        if cfg.mode == "theory":
            params = AgdParams(alpha=cfg.alpha, beta=cfg.beta,
                               t_max=budget_agd(k, budgets))
        else:
            params = AgdParams(alpha=cfg.alpha, beta=cfg.beta, t_max=cfg.max_inner,
                               tol=self.sc.mu * cfg.sigma / (2.0 * cfg.l_tilde))
        y, _ = agd(grad_h, self.y_warm, params)
        self.y_warm = y
        return np.asarray(self.problem.grad_fbar_x(w, y), dtype=np.float64)


def rahgd(problem: BilevelOracle, x0, cfg: SolverConfig, record_points=False) -> RunReport:
    """Restarted accelerated hypergradient descent (no perturbation).

    Runs the epoch loop described in the module docstring on a bilevel
    problem.  Deterministic under (problem, x0, cfg): the RNG is only used
    when cfg.perturbation is set.
    """
    loop = _BilevelLoop(problem, x0, cfg, record_points)
    report = loop.run()
    if report.termination == TERM_COMPLETED and loop.last_y is not None:
        report.y_final = loop.last_y
    return report


def prahgd(problem: BilevelOracle, x0, cfg: SolverConfig, record_points=False) -> RunReport:
    """Perturbed variant: a uniform-ball kick of radius cfg.r at every restart."""
    if not cfg.perturbation:
        cfg = replace(cfg, perturbation=True)
    return rahgd(problem, x0, cfg, record_points)


def pragda(problem: MinimaxOracle, x0, cfg: SolverConfig, record_points=False) -> RunReport:
    """Perturbed restarted accelerated descent-ascent for minimax problems.

    Same restart/perturbation/averaging structure as the bilevel solver, but
    the inner solve is a pure maximization and the outer update uses the
    plain x-gradient at the near-argmax; no quadratic subproblem is solved,
    so the jv_g and hv_g counters never move.  The perturbation step is part
    of the method; r = 0 degenerates it to a no-op.
    """
    if not cfg.perturbation:
        cfg = replace(cfg, perturbation=True)
    loop = _MinimaxLoop(problem, x0, cfg, record_points)
    report = loop.run()
    report.y_final = loop.y_warm
    return report


def baseline_hgd(problem: BilevelOracle, x0, step, sigma, iters,
                 record_points=False, seed=0) -> RunReport:
    """Plain hypergradient descent comparator: x <- x - step * u(x).

    Uses the same warm-started inner machinery (adaptive certificates at
    level sigma) so oracle accounting is directly comparable.
    """
    sc = problem.constants
    from .core import derive_constants

    dc = derive_constants(sc)
    sk = math.sqrt(dc.kappa)
    alpha = 1.0 / sc.ell
    beta = (sk - 1.0) / (sk + 1.0)
    budgets = BudgetInputs(
        sigma=sigma, kappa=dc.kappa, l_tilde=dc.l_tilde, ell=sc.ell, mu=sc.mu,
        m_bound=sc.m_bound, big_b=1.0, c_hat=10.0, v_init_norm=0.0,
    )
    x = np.asarray(x0, dtype=np.float64).copy()
    y, _ = epoch_init_agd(problem, x, "adaptive", budgets, alpha, beta)
    state = InnerState(y_warm=y, v_warm=y.copy())
    trace: list[TraceRecord] = []
    points: list[np.ndarray] | None = [] if record_points else None
    x_start = x.copy()
    for k in range(iters):
        y, v, state = inner_solve(problem, x, state, sigma, "adaptive", budgets,
                                  k, alpha, beta)
        u = inexact_hypergradient(problem, x, y, v)
        if not np.all(np.isfinite(u)):
            raise DivergenceError(f"non-finite hypergradient at iteration {k}")
        if points is not None:
            points.append(x.copy())
        x_next = x - step * u
        if not np.all(np.isfinite(x_next)):
            raise DivergenceError(f"non-finite iterate at iteration {k}")
        c = problem.counters
        trace.append(TraceRecord(
            epoch=0, iter=k, hypergrad_norm=norm(u), step_norm=norm(x_next - x),
            gc_f=c.gc_f, gc_g=c.gc_g, jv_g=c.jv_g, hv_g=c.hv_g,
            x_dist_epoch_start=norm(x - x_start), w_dist_epoch_start=norm(x - x_start),
        ))
        x = x_next
    return RunReport(
        w_hat=x, epochs=1, total_outer_iters=iters,
        counters=problem.counters.snapshot(), trace=trace,
        termination=TERM_FIXED_ITERS, epoch_starts=[x_start], points=points,
        y_final=state.y_warm,
    )


def baseline_gda(problem: MinimaxOracle, x0, y0, step_x, step_y, iters,
                 record_points=False) -> RunReport:
    """Simultaneous gradient descent-ascent comparator for minimax problems."""
    x = np.asarray(x0, dtype=np.float64).copy()
    y = np.asarray(y0, dtype=np.float64).copy()
    trace: list[TraceRecord] = []
    points: list[np.ndarray] | None = [] if record_points else None
    x_start = x.copy()
    for k in range(iters):
        gx = np.asarray(problem.grad_fbar_x(x, y), dtype=np.float64)
        gy = np.asarray(problem.grad_fbar_y(x, y), dtype=np.float64)
        if not (np.all(np.isfinite(gx)) and np.all(np.isfinite(gy))):
            raise DivergenceError(f"non-finite gradient at iteration {k}")
        if points is not None:
            points.append(x.copy())
        x_next = x - step_x * gx
        y_next = y + step_y * gy
        if not (np.all(np.isfinite(x_next)) and np.all(np.isfinite(y_next))):
            raise DivergenceError(f"non-finite iterate at iteration {k}")
        c = problem.counters
        trace.append(TraceRecord(
            epoch=0, iter=k, hypergrad_norm=norm(gx), step_norm=norm(x_next - x),
            gc_f=c.gc_f, gc_g=c.gc_g, jv_g=c.jv_g, hv_g=c.hv_g,
            x_dist_epoch_start=norm(x - x_start), w_dist_epoch_start=norm(x - x_start),
        ))
        x, y = x_next, y_next
    return RunReport(
        w_hat=x, epochs=1, total_outer_iters=iters,
        counters=problem.counters.snapshot(), trace=trace,
        termination=TERM_FIXED_ITERS, epoch_starts=[x_start], points=points,
        y_final=y,
    )
