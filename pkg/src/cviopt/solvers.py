"""Solvers for convex optimization over Cartesian VI constraints.

Three routes are provided:

* :func:`run_rbirg` — the single-loop randomized block iteratively
  regularized gradient method.  Each step samples one block, takes a
  projected gradient step on F + eta_k * subgrad(f) restricted to that
  block, decays the step size and the regularization weight, and folds the
  iterate into a weighted running average.
* :func:`run_sr` — the classical sequential-regularization baseline: solve
  a strongly monotone regularized VI to a tolerance, shrink eta, repeat.
* :func:`tikhonov_point` / :func:`tikhonov_path` — solutions of the
  regularized VI for fixed eta, tracing the trajectory whose limit is the
  f-optimal VI solution.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .blocks import sample_block, sample_blocks
from .metrics import GapEstimatorConfig, dual_gap_estimate, natural_residual
from .problems import ProblemSpec
from .schedules import Schedule, validate_schedule
from .trace import RunTrace, TraceRecord

GRAD_F = "grad_f"
IDENTITY = "identity"


# ---------------------------------------------------------------------------
# Regularized map
# ---------------------------------------------------------------------------


class RegularizedMap:
    """G_eta(x) = F(x) + eta * grad f(x), or F(x) + eta * x (identity variant)."""

    def __init__(self, problem: ProblemSpec, eta: float, variant: str = GRAD_F):
        if eta <= 0:
            raise ValueError("regularization weight must be positive")
        if variant not in (GRAD_F, IDENTITY):
            raise ValueError(f"unknown regularization variant {variant!r}")
        self.problem = problem
        self.eta = float(eta)
        self.variant = variant

    def __call__(self, x: np.ndarray) -> np.ndarray:
        if self.variant == GRAD_F:
            return self.problem.F(x) + self.eta * self.problem.grad_f(x)
        return self.problem.F(x) + self.eta * x

    def block(self, x: np.ndarray, i: int) -> np.ndarray:
        sl = self.problem.structure.slices[i]
        if self.variant == GRAD_F:
            return self.problem.F_block(x, i) + self.eta * self.problem.grad_f_block(x, i)
        return self.problem.F_block(x, i) + self.eta * x[sl]

    def strong_monotonicity(self) -> float:
        if self.variant == IDENTITY:
            return self.eta
        (mu_f,) = self.problem.constants.require("mu_f")
        if mu_f <= 0:
            raise ValueError("grad_f regularization needs a strongly convex objective (mu_f > 0)")
        return self.eta * mu_f

    def lipschitz(self, rng: Optional[np.random.Generator] = None) -> tuple[float, bool]:
        """(L, estimated?) for the regularized map; samples a bound if L_F is unknown."""
        c = self.problem.constants
        if c.L_F is not None:
            L_F, est = c.L_F, False
        else:
            L_F, est = estimate_map_lipschitz(self.problem, rng), True
        if self.variant == IDENTITY:
            return L_F + self.eta, est
        if c.L_f is None:
            raise ValueError("grad_f regularization needs the gradient Lipschitz constant L_f")
        return L_F + self.eta * c.L_f, est


def estimate_map_lipschitz(problem: ProblemSpec, rng=None, n_pairs: int = 256,
                           safety: float = 1.2) -> float:
    """Sampled bound on the Lipschitz constant of F (flagged as an estimate)."""
    rng = rng or np.random.default_rng(1234)
    best = 1e-12
    for _ in range(n_pairs):
        if problem.is_bounded:
            u = problem.sample_feasible(rng)
            v = problem.sample_feasible(rng)
        else:
            u = problem.project(rng.standard_normal(problem.structure.n) * 3.0)
            v = problem.project(rng.standard_normal(problem.structure.n) * 3.0)
        dist = float(np.linalg.norm(u - v))
        if dist < 1e-12:
            continue
        best = max(best, float(np.linalg.norm(problem.F(u) - problem.F(v))) / dist)
    return safety * best


# ---------------------------------------------------------------------------
# The single-loop randomized block method
# ---------------------------------------------------------------------------


def rbirg_step(problem: ProblemSpec, x: np.ndarray, gamma: float, eta: float,
               rng: np.random.Generator, block: Optional[int] = None) -> tuple[np.ndarray, int]:
    """One sampled-block regularized projected-gradient update (out of place).

    Exactly one block changes: block i moves to the projection of
    x_i - gamma (F_i(x) + eta subgrad_i f(x)) onto its set.
    """
    i = sample_block(problem.structure, rng) if block is None else block
    sl = problem.structure.slices[i]
    g = problem.F_block(x, i) + eta * problem.grad_f_block(x, i)
    out = x.copy()
    out[sl] = problem.sets[i].project(x[sl] - gamma * g)
    return out, i


def _record_plan(n_iters: int, metric_cadence: Optional[int],
                 record_iters: Optional[Sequence[int]]) -> list[int]:
    if record_iters is not None:
        pts = sorted({int(k) for k in record_iters if 0 < int(k) <= n_iters})
    else:
        cadence = metric_cadence if metric_cadence else max(1, n_iters // 200)
        pts = list(range(cadence, n_iters + 1, cadence))
    if n_iters > 0 and (not pts or pts[-1] != n_iters):
        pts.append(n_iters)
    return pts


def _gap_seed(base: int, k: int) -> int:
    return int(np.random.SeedSequence((base, k)).generate_state(1)[0])


def _emit_records(problem: ProblemSpec, trace: RunTrace, snapshots, d: int,
                  gap_config: Optional[GapEstimatorConfig], wall_clock: bool):
    xstar = problem.known_solution
    for k, evals, wall_s, xk in snapshots:
        rec = TraceRecord(
            k=k,
            wall_ms=1000.0 * wall_s if wall_clock else 0.0,
            evals=evals,
            fme=evals / d,
        )
        rec.f_value = float(problem.f(xk))
        if gap_config is not None:
            rec.gap_estimate = dual_gap_estimate(problem, xk, gap_config.with_seed(_gap_seed(gap_config.seed, k)))
        rec.natural_residual = natural_residual(problem, xk)
        if xstar is not None:
            rec.dist_to_xstar = float(np.linalg.norm(xk - xstar))
        trace.append(rec)


def run_rbirg(problem: ProblemSpec, schedule: Schedule, *, max_iters: Optional[int] = None,
              budget_fme: Optional[float] = None, seed: int = 0, x0=None,
              metric_cadence: Optional[int] = None, record_iters: Optional[Sequence[int]] = None,
              gap_config: Optional[GapEstimatorConfig] = None, wall_clock: bool = True,
              require_valid_schedule: bool = True, metadata: Optional[dict] = None) -> RunTrace:
    """Run the randomized block method and emit metric records at x-bar.

    The budget is either an explicit iteration count or a cost budget in
    full-map equivalents (d block steps = 1 full map).  Metrics are
    evaluated at the weighted average iterate.  A NaN produced by any
    evaluator aborts the run with a diagnostic record.
    """
    report = validate_schedule(schedule)
    if require_valid_schedule and not report.ok:
        raise ValueError("schedule rejected: " + "; ".join(report.violations))
    structure = problem.structure
    d = structure.d
    if max_iters is None:
        if budget_fme is None:
            raise ValueError("need max_iters or budget_fme")
        max_iters = int(round(budget_fme * d))
    rng = np.random.default_rng(seed)
    x = problem.initial_point(rng, x0)

    ks = np.arange(max_iters + 1, dtype=float) + 1.0
    gammas = schedule.gamma0 * ks ** (-schedule.a)
    etas = schedule.eta0 * ks ** (-schedule.b)
    weights = gammas**schedule.r
    blocks = sample_blocks(structure, rng, max_iters)

    recs = _record_plan(max_iters, metric_cadence, record_iters)
    rec_ptr = 0
    next_rec = recs[rec_ptr] if recs else -1

    slices = structure.slices
    sets = problem.sets
    F_block = problem.F_block
    grad_block = problem.grad_f_block

    xbar = x.copy()
    S = weights[0]
    snapshots = []
    status = "completed"
    t0 = time.perf_counter()
    for k in range(max_iters):
        i = blocks[k]
        sl = slices[i]
        g = F_block(x, i) + etas[k] * grad_block(x, i)
        x[sl] = sets[i].project(x[sl] - gammas[k] * g)
        if not np.all(np.isfinite(x[sl])):
            status = f"aborted_nan_at_{k}"
            snapshots.append((k + 1, k + 1, time.perf_counter() - t0, xbar.copy()))
            break
        w = weights[k + 1]
        S += w
        xbar += (w / S) * (x - xbar)
        if k + 1 == next_rec:
            snapshots.append((k + 1, k + 1, time.perf_counter() - t0, xbar.copy()))
            rec_ptr += 1
            next_rec = recs[rec_ptr] if rec_ptr < len(recs) else -1

    trace = RunTrace(metadata={
        "solver": "rbirg",
        "problem": problem.name,
        "seed": seed,
        "gamma0": schedule.gamma0, "eta0": schedule.eta0,
        "a": schedule.a, "b": schedule.b, "r": schedule.r, "mode": schedule.mode,
        "max_iters": max_iters, "status": status,
        "final_x": x, "final_xbar": xbar,
    })
    if metadata:
        trace.metadata.update(metadata)
    if gap_config is not None:
        trace.metadata["gap_estimator"] = vars(gap_config).copy()
    _emit_records(problem, trace, snapshots, d, gap_config, wall_clock)
    return trace


# ---------------------------------------------------------------------------
# Strongly monotone regularized solves
# ---------------------------------------------------------------------------


@dataclass
class SolveResult:
    x: np.ndarray
    residual: float
    iterations: int
    converged: bool
    info: dict


def solve_regularized_vi(problem: ProblemSpec, eta: float, tol: float, max_iters: int,
                         variant: str = GRAD_F, x0=None, mu: Optional[float] = None,
                         L: Optional[float] = None,
                         callback: Optional[Callable[[int, np.ndarray], None]] = None) -> SolveResult:
    """Fixed-step projection method for the eta-regularized VI.

    The regularized map is mu-strongly monotone and L-Lipschitz, so
    x <- P_X(x - (mu/L^2) G(x)) contracts; iterate until the natural-map
    residual ||x - P_X(x - G(x))|| falls below tol.  The callback sees
    every iterate (used by the baseline's trace recording); each iteration
    costs one full map evaluation.
    """
    G = RegularizedMap(problem, eta, variant)
    estimated = False
    if mu is None:
        mu = G.strong_monotonicity()
    if L is None:
        L, estimated = G.lipschitz()
    step = mu / L**2
    x = problem.project(np.zeros(problem.structure.n)) if x0 is None else problem.project(np.asarray(x0, dtype=float))
    residual = np.inf
    it = 0
    for it in range(1, max_iters + 1):
        g = G(x)
        residual = float(np.linalg.norm(x - problem.project(x - g)))
        if residual <= tol:
            if callback is not None:
                callback(it, x)
            return SolveResult(x, residual, it, True,
                               {"eta": eta, "variant": variant, "step": step, "L_estimated": estimated})
        x = problem.project(x - step * g)
        if callback is not None:
            callback(it, x)
        if not np.all(np.isfinite(x)):
            return SolveResult(x, float("nan"), it, False,
                               {"eta": eta, "variant": variant, "step": step, "status": "nan"})
    g = G(x)
    residual = float(np.linalg.norm(x - problem.project(x - g)))
    return SolveResult(x, residual, max_iters, residual <= tol,
                       {"eta": eta, "variant": variant, "step": step, "L_estimated": estimated})


def extragradient_regularized_vi(problem: ProblemSpec, eta: float, tol: float, max_evals: int,
                                 variant: str = GRAD_F, x0=None, L: Optional[float] = None,
                                 callback: Optional[Callable[[int, np.ndarray], None]] = None) -> SolveResult:
    """Extragradient method for the regularized VI without strong monotonicity.

    Used when the regularized map is merely monotone (grad_f variant with a
    non-strongly-convex objective): predict with a half step, correct with
    the map at the predicted point.  Each iteration costs two full map
    evaluations, which is what the callback and the budget see.
    """
    G = RegularizedMap(problem, eta, variant)
    estimated = False
    if L is None:
        L, estimated = G.lipschitz()
    step = 0.9 / L
    x = problem.project(np.zeros(problem.structure.n)) if x0 is None else problem.project(np.asarray(x0, dtype=float))
    evals = 0
    residual = np.inf
    while evals + 2 <= max_evals:
        g = G(x)
        residual = float(np.linalg.norm(x - problem.project(x - g)))
        if residual <= tol:
            if callback is not None:
                callback(evals, x)
            return SolveResult(x, residual, evals, True,
                               {"eta": eta, "variant": variant, "step": step,
                                "engine": "extragradient", "evals": evals, "L_estimated": estimated})
        y = problem.project(x - step * g)
        x = problem.project(x - step * G(y))
        evals += 2
        if callback is not None:
            callback(evals, x)
        if not np.all(np.isfinite(x)):
            return SolveResult(x, float("nan"), evals, False,
                               {"eta": eta, "variant": variant, "engine": "extragradient",
                                "evals": evals, "status": "nan"})
    return SolveResult(x, residual, evals, residual <= tol,
                       {"eta": eta, "variant": variant, "step": step,
                        "engine": "extragradient", "evals": evals, "L_estimated": estimated})


def tikhonov_point(problem: ProblemSpec, eta: float, tol: float = 1e-10,
                   max_iters: int = 2_000_000, x0=None) -> SolveResult:
    """Solution of VI(X, F + eta grad f): one point of the Tikhonov trajectory."""
    return solve_regularized_vi(problem, eta, tol, max_iters, variant=GRAD_F, x0=x0)


def tikhonov_path(problem: ProblemSpec, etas: Sequence[float], tol: float = 1e-10,
                  max_iters: int = 2_000_000) -> list[SolveResult]:
    """Trajectory points for a decreasing eta sequence, warm-started in order."""
    out: list[SolveResult] = []
    x = None
    for eta in etas:
        res = tikhonov_point(problem, float(eta), tol=tol, max_iters=max_iters, x0=x)
        out.append(res)
        x = res.x
    return out


# ---------------------------------------------------------------------------
# Sequential regularization baseline
# ---------------------------------------------------------------------------


def run_sr(problem: ProblemSpec, *, eta0: float, rho: float = 0.5, budget_fme: float,
           seed: int = 0, x0=None, metric_cadence: Optional[int] = None,
           variant: str = IDENTITY, inner_tol: Optional[Callable[[float], float]] = None,
           gap_config: Optional[GapEstimatorConfig] = None, wall_clock: bool = True,
           max_outer: int = 64, metadata: Optional[dict] = None) -> RunTrace:
    """Two-loop baseline: solve the eta_t-regularized VI, shrink eta_t, repeat.

    Each inner iteration costs one full map evaluation, so the shared cost
    clock with the block method is the full-map-equivalent count.  Inner
    solves are warm-started; the default inner tolerance is
    max(1e-8, 0.1 * eta_t).  A stage that exhausts the remaining budget
    before reaching its tolerance is recorded as a failure and ends the run.
    """
    if not (0.0 < rho < 1.0):
        raise ValueError("decay factor rho must lie in (0, 1)")
    if inner_tol is None:
        inner_tol = lambda eta: max(1e-8, 0.1 * eta)
    budget = int(round(budget_fme))
    cadence = metric_cadence if metric_cadence else max(1, budget // 200)
    rng = np.random.default_rng(seed)
    x = problem.initial_point(rng, x0)
    mu_f = problem.constants.mu_f
    strongly = variant == IDENTITY or (mu_f is not None and mu_f > 0)

    snapshots = []
    next_grid = [cadence]  # next record point on the shared eval clock
    consumed = 0
    stages = []
    t0 = time.perf_counter()
    eta = float(eta0)
    status = "completed"
    for t in range(max_outer):
        if consumed >= budget:
            break
        remaining = budget - consumed
        stage_offset = consumed

        def cb(evals_in_stage, xt, _off=stage_offset):
            kk = _off + evals_in_stage
            while next_grid[0] <= kk and next_grid[0] <= budget:
                snapshots.append((next_grid[0], next_grid[0], time.perf_counter() - t0, xt.copy()))
                next_grid[0] += cadence

        if strongly:
            res = solve_regularized_vi(problem, eta, inner_tol(eta), remaining,
                                       variant=variant, x0=x, callback=cb)
            used = res.iterations
        else:
            res = extragradient_regularized_vi(problem, eta, inner_tol(eta), remaining,
                                               variant=variant, x0=x, callback=cb)
            used = res.info["evals"]
            if used == 0:  # budget too small for another predictor-corrector pair
                status = "budget_exhausted"
                break
        consumed += used
        stages.append({"eta": eta, "evals": used,
                       "residual": res.residual, "converged": res.converged})
        x = res.x
        if not res.converged:
            status = f"inner_stage_{t}_unconverged"
            break
        eta *= rho

    # A finished (or stopped) run holds its point for the rest of the grid so
    # replications stay record-aligned.
    while next_grid[0] <= budget:
        snapshots.append((next_grid[0], next_grid[0], time.perf_counter() - t0, x.copy()))
        next_grid[0] += cadence

    trace = RunTrace(metadata={
        "solver": "sr", "problem": problem.name, "seed": seed,
        "eta0": eta0, "rho": rho, "variant": variant, "budget_fme": budget,
        "inner_engine": "fixed_step_projection" if strongly else "extragradient",
        "stages": stages, "status": status, "final_x": x,
        "inner_tol_rule": "max(1e-8, 0.1*eta)",
    })
    if metadata:
        trace.metadata.update(metadata)
    if gap_config is not None:
        trace.metadata["gap_estimator"] = vars(gap_config).copy()
    _emit_records(problem, trace, snapshots, 1, gap_config, wall_clock)
    return trace


# ---------------------------------------------------------------------------
# Accelerated solver for potential (gradient) maps without strong monotonicity
# ---------------------------------------------------------------------------


def solve_potential_vi(problem: ProblemSpec, tol: float, max_iters: int = 200_000,
                       x0=None, L: Optional[float] = None, check_every: int = 25) -> SolveResult:
    """Solve VI(X, F) when F is the gradient of a known convex potential.

    Runs an accelerated projected-gradient descent on the potential with a
    function-value restart, stopping on the natural-map residual.  Needs
    problem.potential; the step is 1/L with L from the problem's stored
    Lipschitz bound unless given.
    """
    if problem.potential is None:
        raise ValueError("problem carries no potential; use a monotone-VI solver instead")
    if L is None:
        L = problem.extras.get("lipschitz_bound") or problem.constants.L_F
        if L is None:
            L = estimate_map_lipschitz(problem)
    step = 1.0 / L
    x = problem.project(np.zeros(problem.structure.n)) if x0 is None else problem.project(np.asarray(x0, dtype=float))
    x_prev = x.copy()
    tk = 1.0
    phi_prev = problem.potential(x)
    residual = np.inf
    for it in range(1, max_iters + 1):
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * tk * tk))
        z = x + ((tk - 1.0) / t_next) * (x - x_prev)
        x_next = problem.project(z - step * problem.F(z))
        phi = problem.potential(x_next)
        if phi > phi_prev:  # restart the momentum
            tk = 1.0
            x_next = problem.project(x - step * problem.F(x))
            phi = problem.potential(x_next)
        else:
            tk = t_next
        x_prev, x = x, x_next
        phi_prev = phi
        if it % check_every == 0 or it == max_iters:
            residual = float(np.linalg.norm(x - problem.project(x - problem.F(x))))
            if residual <= tol:
                return SolveResult(x, residual, it, True, {"step": step})
    return SolveResult(x, residual, max_iters, residual <= tol, {"step": step})
