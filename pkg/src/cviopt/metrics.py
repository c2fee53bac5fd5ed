"""Accuracy metrics, theoretical rate-bound evaluators, and diagnostics.

Solution quality for a VI-constrained problem has two axes: infeasibility
(how far x is from solving the inner VI) and suboptimality (objective gap
against the known optimum).  Infeasibility is measured either by the dual
gap function sup_y F(y)'(x - y), estimated from below by sampling plus
projected ascent, or by the natural-map residual ||x - P_X(x - F(x))||.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .blocks import sample_blocks
from .problems import ProblemSpec
from .schedules import BOUNDED, Schedule

# ---------------------------------------------------------------------------
# Dual gap estimation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GapEstimatorConfig:
    """Budget of the sampled lower-bound estimator of the dual gap."""

    n_samples: int = 2000
    n_restarts: int = 8
    ascent_iters: int = 200
    ascent_step: float = 1e-2
    seed: int = 0
    fd_step: float = 1e-7

    def __post_init__(self):
        if min(self.n_samples, self.n_restarts, self.ascent_iters) < 1:
            raise ValueError("estimator counts must all be >= 1")
        if self.ascent_step <= 0:
            raise ValueError("ascent step must be positive")

    def with_seed(self, seed: int) -> "GapEstimatorConfig":
        return GapEstimatorConfig(
            self.n_samples, self.n_restarts, self.ascent_iters, self.ascent_step, seed, self.fd_step
        )


def dual_gap_estimate(problem: ProblemSpec, x: np.ndarray, cfg: GapEstimatorConfig) -> float:
    """Lower bound on GAP(x) = sup_{y in X} F(y)'(x - y).

    Takes the best value of psi(y) = F(y)'(x - y) over random feasible
    samples and over projected-ascent refinements started from the best
    samples, floored at zero.  Every reported value is psi evaluated
    exactly at a feasible point, so the estimate never exceeds the true
    gap.  Requires a bounded feasible set.
    """
    if not problem.is_bounded:
        raise ValueError(
            "dual gap estimation needs a bounded feasible set; "
            "use natural_residual for unbounded problems"
        )
    x = problem.structure.check_vector(x)
    rng = np.random.default_rng(cfg.seed)

    Y = problem.sample_feasible_batch(rng, cfg.n_samples)
    FY = problem.F_columns(Y)
    psi = np.einsum("ij,ij->j", FY, x[:, None] - Y)
    best = float(psi.max())

    n_restarts = min(cfg.n_restarts, cfg.n_samples)
    order = np.argsort(psi)[::-1][:n_restarts]
    P = Y[:, order].copy()

    n = x.size
    for _ in range(cfg.ascent_iters):
        FP = problem.F_columns(P)
        diff = x[:, None] - P
        vals = np.einsum("ij,ij->j", FP, diff)
        best = max(best, float(vals.max()))
        if problem.jac_T_vec_batch is not None:
            grad = problem.jac_T_vec_batch(P, diff) - FP
        elif problem.jac_T_vec is not None:
            grad = np.stack(
                [problem.jac_T_vec(P[:, j], diff[:, j]) for j in range(P.shape[1])], axis=1
            ) - FP
        else:
            # Central differences of psi, batched through the F evaluator.
            h = cfg.fd_step * (1.0 + np.abs(P))
            grad = np.empty_like(P)
            for j in range(P.shape[1]):
                E = np.eye(n) * h[:, j]
                pts = np.concatenate([P[:, j : j + 1] + E, P[:, j : j + 1] - E], axis=1)
                fd = np.einsum("ij,ij->j", problem.F_columns(pts), x[:, None] - pts)
                grad[:, j] = (fd[:n] - fd[n:]) / (2.0 * h[:, j])
        P = problem.project_batch(P + cfg.ascent_step * grad)
    FP = problem.F_columns(P)
    vals = np.einsum("ij,ij->j", FP, x[:, None] - P)
    best = max(best, float(vals.max()))
    return max(0.0, best)


# ---------------------------------------------------------------------------
# Residual and objective metrics
# ---------------------------------------------------------------------------


def natural_residual(problem: ProblemSpec, x: np.ndarray) -> float:
    """||x - P_X(x - F(x))||; zero exactly at VI solutions."""
    x = problem.structure.check_vector(x)
    return float(np.linalg.norm(x - problem.project(x - problem.F(x))))


def suboptimality(problem: ProblemSpec, x: np.ndarray) -> float:
    """f(x) - f(x*) against the problem's reference optimum (may be negative)."""
    return float(problem.f(x)) - problem.optimal_value()


# ---------------------------------------------------------------------------
# Theoretical rate bounds for the averaged iterate (bounded sets)
# ---------------------------------------------------------------------------


def averaging_threshold(r: float) -> int:
    """Smallest iteration count at which the rate bounds start to apply."""
    return math.ceil(2.0 ** (2.0 / (1.0 - r)) - 1.0 - 1e-12)


@dataclass(frozen=True)
class PredictedBounds:
    suboptimality: float
    gap: float


def predicted_bounds(schedule: Schedule, n_iter: int, *, M: float, C_F: float,
                     C_f: float, p_min: float) -> PredictedBounds:
    """Evaluate the averaged-iterate error bounds at iteration n_iter.

    Valid for the bounded regime (step exponent 0.5, regularization
    exponent 0 < b < 0.5, averaging exponent 0 <= r < 1) and for
    n_iter >= 2^(2/(1-r)) - 1.  Both bounds are evaluated exactly as
    stated, with no hidden constants:

        subopt <= (2-r)/(p_min eta0) (4M^2/gamma0
                  + gamma0 (C_F^2 + eta0^2 C_f^2)/(0.5 - 0.5r + b)) (N+1)^(b-0.5)
        gap    <= (2-r)/p_min (4M^2/gamma0
                  + gamma0 (C_F^2 + eta0^2 C_f^2)/(0.5 - 0.5r)
                  + 2 p_min C_f M eta0/(1 - 0.5r - b)) (N+1)^(-b)
    """
    if schedule.mode != BOUNDED or schedule.a != 0.5 or not (0.0 < schedule.b < 0.5):
        raise ValueError("rate bounds hold only in the bounded regime (a=0.5, 0<b<0.5)")
    if not (0.0 <= schedule.r < 1.0):
        raise ValueError("averaging exponent must lie in [0, 1)")
    kmin = averaging_threshold(schedule.r)
    if n_iter < kmin:
        raise ValueError(f"bounds need n_iter >= {kmin} for r={schedule.r}, got {n_iter}")
    g0, e0, b, r = schedule.gamma0, schedule.eta0, schedule.b, schedule.r
    mix = C_F**2 + e0**2 * C_f**2
    sub = ((2.0 - r) / (p_min * e0)) * (4.0 * M**2 / g0 + g0 * mix / (0.5 - 0.5 * r + b))
    sub *= float(n_iter + 1) ** (-(0.5 - b))
    gap = (2.0 - r) / p_min * (
        4.0 * M**2 / g0
        + g0 * mix / (0.5 - 0.5 * r)
        + 2.0 * p_min * C_f * M * e0 / (1.0 - 0.5 * r - b)
    )
    gap *= float(n_iter + 1) ** (-b)
    return PredictedBounds(suboptimality=sub, gap=gap)


# ---------------------------------------------------------------------------
# Randomized-block error moments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockMoments:
    mean_map_err: np.ndarray
    mean_grad_err: np.ndarray
    msq_map_err: float
    msq_grad_err: float
    n_draws: int

    def stderr_map(self) -> float:
        """Standard error of the map-error sample mean (norm scale)."""
        var = max(self.msq_map_err - float(self.mean_map_err @ self.mean_map_err), 0.0)
        return math.sqrt(var / self.n_draws)

    def stderr_grad(self) -> float:
        var = max(self.msq_grad_err - float(self.mean_grad_err @ self.mean_grad_err), 0.0)
        return math.sqrt(var / self.n_draws)


def block_sampling_moments(problem: ProblemSpec, x: np.ndarray, n_draws: int,
                           rng: np.random.Generator) -> BlockMoments:
    """Sample moments of the single-block estimator errors at a point.

    For a drawn block i, the error of the importance-weighted one-block
    map estimate is F(x) - E_i F_i(x)/p_i (and likewise for the
    subgradient).  The draws enter only through their counts, so the
    sample statistics are aggregated exactly.
    """
    structure = problem.structure
    x = structure.check_vector(x)
    d, n = structure.d, structure.n
    Fx = problem.F(x)
    gx = problem.grad_f(x)
    Dmap = np.tile(Fx, (d, 1))
    Dgrad = np.tile(gx, (d, 1))
    for i, sl in enumerate(structure.slices):
        w = 1.0 - 1.0 / structure.probs[i]
        Dmap[i, sl] = w * Fx[sl]
        Dgrad[i, sl] = w * gx[sl]
    draws = sample_blocks(structure, rng, n_draws)
    counts = np.bincount(draws, minlength=d).astype(float)
    mean_map = counts @ Dmap / n_draws
    mean_grad = counts @ Dgrad / n_draws
    msq_map = float(counts @ np.sum(Dmap**2, axis=1) / n_draws)
    msq_grad = float(counts @ np.sum(Dgrad**2, axis=1) / n_draws)
    return BlockMoments(mean_map, mean_grad, msq_map, msq_grad, n_draws)


# ---------------------------------------------------------------------------
# Harmonic-sum bounds and empirical rate slopes
# ---------------------------------------------------------------------------


def harmonic_threshold(alpha: float) -> int:
    return math.ceil(2.0 ** (1.0 / (1.0 - alpha)) - 1.0 - 1e-12)


@dataclass(frozen=True)
class HarmonicCheck:
    total: float
    lower: float
    upper: float
    ok: bool


def harmonic_bounds_check(alpha: float, N: int) -> HarmonicCheck:
    """Exact sum of (k+1)^(-alpha), k = 0..N, against its two-sided bounds.

    Needs 0 <= alpha < 1 and N >= 2^(1/(1-alpha)) - 1; the bounds are
    (N+1)^(1-alpha)/(2(1-alpha)) <= sum <= (N+1)^(1-alpha)/(1-alpha).
    """
    if not (0.0 <= alpha < 1.0):
        raise ValueError("alpha must lie in [0, 1)")
    kmin = harmonic_threshold(alpha)
    if N < kmin:
        raise ValueError(f"harmonic bounds need N >= {kmin} for alpha={alpha}, got {N}")
    total = math.fsum((k + 1.0) ** (-alpha) for k in range(N + 1))
    scale = float(N + 1) ** (1.0 - alpha) / (1.0 - alpha)
    lower, upper = 0.5 * scale, scale
    tol = 1e-12 * max(1.0, total)
    return HarmonicCheck(total, lower, upper, lower <= total + tol and total <= upper + tol)


def rate_slope(ks, values, window_fraction: float = 0.5) -> float:
    """Least-squares slope of log(metric) vs log(N+1) on the trailing window.

    The window keeps records with N >= (1 - window_fraction) * N_max.
    Nonpositive metric values are excluded; fewer than 10 surviving points
    is an error.
    """
    ks = np.asarray(ks, dtype=float)
    values = np.asarray(values, dtype=float)
    if ks.shape != values.shape:
        raise ValueError("ks and values must have equal length")
    cutoff = (1.0 - window_fraction) * ks.max()
    keep = (ks >= cutoff) & (values > 0.0) & np.isfinite(values)
    if keep.sum() < 10:
        raise ValueError(f"need >= 10 positive records in the window, have {int(keep.sum())}")
    slope = np.polyfit(np.log(ks[keep] + 1.0), np.log(values[keep]), 1)[0]
    return float(slope)


def trace_rate_slope(trace, field: str, window_fraction: float = 0.5) -> float:
    return rate_slope(trace.ks, trace.column(field), window_fraction)
