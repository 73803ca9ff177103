"""
Projected gradient descent over the surface configuration.

All restarts advance together as rows of (R, N) arrays, each with its own
step size, Armijo backtracking and stopping state. Phases are updated freely
and wrapped to [0, 2*pi); amplitudes are clipped onto [0, 1] (absorptive
mode) or held at one (phase-only mode).

Starting points, in restart-index order:

* phase-only: ``theta = 0``, then ``restarts - 1`` uniform random phase
  vectors, all with ``beta = 1``;
* absorptive: the phase-only optimum (warm start), the fully absorbing
  surface ``beta = 0, theta = 0``, then the same starts as phase-only.

Because accepted steps never increase the objective, the warm start makes
the absorptive result no worse than phase-only, and the fully absorbing
start makes it no worse than having no surface at all.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .alloc import Allocation, DegenerateChannel, batch_gradient, batch_objective, min_power_allocation
from .channel import OPTIMIZER_KEY, RngSeed
from .model import TWO_PI, ChannelSet, ContractError, Mode, RisState, SystemParams, wrap_phase

log = logging.getLogger(__name__)

MIN_STEP = 1e-12
MAX_STEP = 1e8
PLATEAU_STEPS = 5
LADDER = 10
STATIONARY_TOL = 1e-4


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 20
    max_iters: int = 500
    init_step: float = 0.1
    backtrack_factor: float = 0.5
    armijo_c: float = 1e-4
    rel_tol: float = 1e-8
    warm_start_from_phase_only: bool = True
    seed: RngSeed = field(default_factory=RngSeed)

    def __post_init__(self):
        if not 0 < self.backtrack_factor < 1:
            raise ContractError("backtrack_factor must lie in (0, 1)")
        if not self.rel_tol > 0:
            raise ContractError("rel_tol must be positive")
        if self.restarts < 1:
            raise ContractError("need at least one restart")
        if self.init_step <= 0 or self.max_iters < 0:
            raise ContractError("init_step must be positive and max_iters non-negative")


@dataclass(frozen=True)
class OptimizationResult:
    ris: RisState
    allocation: Allocation
    objective: float
    iterations_used: int
    restart_index_of_best: int
    objective_trace: np.ndarray
    hit_max_iters: bool = False

    @property
    def feasible(self) -> bool:
        return self.allocation.feasible


def step(ris: RisState, gradient, step_size: float, mode: Mode | str) -> RisState:
    """One projected-gradient update; `gradient` is ``(d_theta, d_beta)``."""
    if not step_size > 0:
        raise ContractError("step size must be positive")
    d_theta, d_beta = gradient
    theta = ris.theta - step_size * np.asarray(d_theta, dtype=float)
    if Mode.parse(mode) is Mode.ABSORPTIVE:
        beta = np.clip(ris.beta - step_size * np.asarray(d_beta, dtype=float), 0.0, 1.0)
    else:
        beta = ris.beta
    return RisState(beta, theta)


def _initial_points(N: int, cfg: OptimizerConfig):
    theta = np.zeros((cfg.restarts, N))
    for r in range(1, cfg.restarts):
        theta[r] = cfg.seed.generator(OPTIMIZER_KEY, r).uniform(0.0, TWO_PI, N)
    return np.ones((cfg.restarts, N)), wrap_phase(theta)


def _projected_norm(beta, d_theta, d_beta, absorptive):
    sq = np.sum(d_theta**2, axis=-1)
    if absorptive:
        blocked = ((beta <= 0.0) & (d_beta > 0)) | ((beta >= 1.0) & (d_beta < 0))
        sq = sq + np.sum(np.where(blocked, 0.0, d_beta) ** 2, axis=-1)
    return np.sqrt(sq)


def _descend(cs, params, beta, theta, cfg, absorptive):
    """Run batched projected gradient descent from the rows of (beta, theta)."""
    R = beta.shape[0]
    beta, theta = beta.copy(), theta.copy()
    P, d_theta, d_beta = batch_gradient(cs, params, beta, theta)
    if not absorptive:
        d_beta = np.zeros_like(d_beta)
    step_size = np.full(R, cfg.init_step)
    active = np.isfinite(P)
    plateau = np.zeros(R, dtype=int)
    iters = np.zeros(R, dtype=int)
    trace = [P.copy()]
    grow = 1.0 / cfg.backtrack_factor
    ladder = cfg.backtrack_factor ** np.arange(LADDER)

    for _ in range(cfg.max_iters):
        if not active.any():
            break
        iters[active] += 1
        pending = active.copy()
        accepted = np.zeros(R, dtype=bool)
        new_beta, new_theta, new_P = beta.copy(), theta.copy(), P.copy()
        s_theta, s_beta = np.zeros_like(theta), np.zeros_like(beta)
        rungs = 1
        while pending.any():
            idx = np.flatnonzero(pending)
            # backtracking ladder evaluated at once (trial step alone first);
            # the first Armijo-passing rung wins
            a = step_size[idx, None] * ladder[:rungs]
            cand_theta = theta[idx, None, :] - a[..., None] * d_theta[idx, None, :]
            if absorptive:
                cand_beta = np.clip(beta[idx, None, :] - a[..., None] * d_beta[idx, None, :], 0.0, 1.0)
            else:
                cand_beta = np.broadcast_to(beta[idx, None, :], cand_theta.shape)
            cand_theta = wrap_phase(cand_theta)
            cand_P = batch_objective(cs, params, cand_beta, cand_theta)
            # directional term uses the unwrapped phase displacement
            decrease = a * np.sum(d_theta[idx] ** 2, axis=1)[:, None]
            if absorptive:
                decrease -= np.sum(d_beta[idx, None, :] * (cand_beta - beta[idx, None, :]), axis=2)
            ok = (cand_P <= P[idx, None] - cfg.armijo_c * decrease) & (cand_P <= P[idx, None])
            has = ok.any(axis=1)
            k = np.argmax(ok, axis=1)
            rows = np.flatnonzero(has)
            good, kk = idx[rows], k[rows]
            new_beta[good] = cand_beta[rows, kk]
            new_theta[good] = cand_theta[rows, kk]
            new_P[good] = cand_P[rows, kk]
            s_theta[good] = -a[rows, kk, None] * d_theta[good]
            s_beta[good] = cand_beta[rows, kk] - beta[good]
            step_size[good] = a[rows, kk]
            accepted[good] = True
            pending[good] = False
            bad = idx[~has]
            step_size[bad] *= cfg.backtrack_factor ** rungs
            rungs = LADDER
            stuck = bad[step_size[bad] < MIN_STEP]
            pending[stuck] = False
            active[stuck] = False

        if accepted.any():
            acc = np.flatnonzero(accepted)
            with np.errstate(invalid="ignore"):
                rel = (P[acc] - new_P[acc]) / np.abs(P[acc])
            plateau[acc] = np.where(rel < cfg.rel_tol, plateau[acc] + 1, 0)
            beta[acc], theta[acc], P[acc] = new_beta[acc], new_theta[acc], new_P[acc]
            _, gt, gb = batch_gradient(cs, params, beta[acc], theta[acc])
            if not absorptive:
                gb = np.zeros_like(gb)
            # Barzilai-Borwein trial step, falling back to growth on non-positive curvature
            ss = np.sum(s_theta[acc] ** 2 + s_beta[acc] ** 2, axis=1)
            sy = np.sum(s_theta[acc] * (gt - d_theta[acc]) + s_beta[acc] * (gb - d_beta[acc]), axis=1)
            with np.errstate(divide="ignore", invalid="ignore"):
                bb = np.where(sy > 0, ss / sy, step_size[acc] * grow)
            step_size[acc] = np.clip(bb, MIN_STEP, MAX_STEP)
            d_theta[acc], d_beta[acc] = gt, gb
            # a plateau only ends a restart once it is also stationary
            pg = _projected_norm(beta[acc], d_theta[acc], d_beta[acc], absorptive)
            done = (plateau[acc] >= PLATEAU_STEPS) & (pg <= STATIONARY_TOL * (1.0 + np.abs(P[acc])))
            active[acc[done]] = False
        trace.append(P.copy())

    hit_max = active.copy()
    return beta, theta, P, iters, np.array(trace), hit_max


def _tournament(P: np.ndarray) -> int:
    # argmin returns the first minimum, so exact ties go to the lower index
    finite = np.isfinite(P)
    if not finite.any():
        return -1
    return int(np.argmin(np.where(finite, P, np.inf)))


def _result(cs, params, beta, theta, P, iters, trace, hit_max, best) -> OptimizationResult:
    if best < 0:
        return OptimizationResult(RisState(beta[0], theta[0]), Allocation.infeasible(), np.inf,
                                  int(iters.max(initial=0)), -1, trace[:, 0], False)
    ris = RisState(beta[best], theta[best])
    # trace rows repeat once a restart stops; keep only the iterations it used
    tr = trace[: iters[best] + 1, best]
    return OptimizationResult(ris, min_power_allocation(cs, ris, params), float(P[best]),
                              int(iters[best]), best, tr, bool(hit_max[best]))


def no_ris_baseline(cs: ChannelSet, params: SystemParams) -> OptimizationResult:
    """Closed-form solution with the surface removed entirely.

    Raises
    ------
    DegenerateChannel
        If a direct user channel vanishes.
    """
    bare = cs.without_ris()
    ris = RisState.empty()
    alloc = min_power_allocation(bare, ris, params)
    return OptimizationResult(ris, alloc, alloc.p1 + alloc.p2, 0, 0, np.array([alloc.p1 + alloc.p2]))


def optimize(cs: ChannelSet, params: SystemParams, cfg: OptimizerConfig | None = None,
             warm_start: RisState | None = None) -> OptimizationResult:
    """Minimize total user power over the surface configuration.

    Parameters
    ----------
    cs : ChannelSet
    params : SystemParams
        ``params.mode`` selects phase-only or absorptive operation.
    cfg : OptimizerConfig, optional
    warm_start : RisState, optional
        Phase-only solution to seed absorptive mode with. When omitted and
        ``cfg.warm_start_from_phase_only`` is set, it is computed here.
    """
    cfg = cfg or OptimizerConfig()
    mode = params.mode
    if mode is Mode.NO_RIS:
        raise ContractError("use no_ris_baseline for the no-RIS configuration")
    N = cs.N
    if N == 0:
        try:
            return no_ris_baseline(cs, params)
        except DegenerateChannel:
            return _result(cs, params, np.ones((1, 0)), np.zeros((1, 0)), np.array([np.inf]),
                           np.zeros(1, int), np.array([[np.inf]]), np.zeros(1, bool), -1)

    beta0, theta0 = _initial_points(N, cfg)
    absorptive = mode is Mode.ABSORPTIVE
    if absorptive:
        head_beta, head_theta = [np.zeros(N)], [np.zeros(N)]
        if warm_start is None and cfg.warm_start_from_phase_only:
            ph = optimize(cs, SystemParams(params.sigma2, params.Pj, params.T1, params.T2,
                                           N, cs.M, Mode.PHASE_ONLY), cfg)
            warm_start = ph.ris
        if warm_start is not None:
            if warm_start.N != N:
                raise ContractError("warm start has the wrong number of elements")
            head_beta.insert(0, warm_start.beta)
            head_theta.insert(0, warm_start.theta)
        beta0 = np.vstack([np.array(head_beta), beta0])
        theta0 = np.vstack([np.array(head_theta), theta0])

    beta, theta, P, iters, trace, hit_max = _descend(cs, params, beta0, theta0, cfg, absorptive)
    best = _tournament(P)
    res = _result(cs, params, beta, theta, P, iters, trace, hit_max, best)
    log.debug("mode=%s N=%d M=%d best restart %d objective %.6g after %d iterations",
              mode.value, N, cs.M, best, res.objective, res.iterations_used)
    return res


def projected_gradient_norm(cs: ChannelSet, ris: RisState, params: SystemParams) -> float:
    """Norm of the gradient with components pushing out of the feasible box removed."""
    _, d_theta, d_beta = batch_gradient(cs, params, ris.beta[None, :], ris.theta[None, :])
    return float(_projected_norm(ris.beta, d_theta[0], d_beta[0], params.mode is Mode.ABSORPTIVE))
