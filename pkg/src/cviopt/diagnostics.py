"""Self-contained diagnostic suites behind the `diag` CLI subcommand.

Each suite checks a structural property of the machinery on a seeded
instance and returns (name, ok, detail) rows: the zero-mean and bounded
second moment of the single-block estimator errors, the two-sided
harmonic-sum bounds, and the successive-difference bound along a
Tikhonov trajectory.
"""

from __future__ import annotations

import numpy as np

from .metrics import block_sampling_moments, harmonic_bounds_check, harmonic_threshold
from .problems import benchmark_cournot, scalar_tikhonov_instance
from .solvers import tikhonov_path


def moments_suite(seed: int = 7, n_points: int = 5, n_draws: int = 20000) -> list[tuple[str, bool, str]]:
    problem = benchmark_cournot(seed=seed)
    C_F, C_f = problem.constants.require("C_F", "C_f")
    p_min = problem.structure.p_min
    cap_map = (1.0 / p_min - 1.0) * C_F**2
    cap_grad = (1.0 / p_min - 1.0) * C_f**2
    rng = np.random.default_rng(seed + 1)
    rows = []
    for t in range(n_points):
        x = problem.sample_feasible(rng)
        mom = block_sampling_moments(problem, x, n_draws, rng)
        mean_ok = (np.linalg.norm(mom.mean_map_err) <= 3.0 * mom.stderr_map()
                   and np.linalg.norm(mom.mean_grad_err) <= 3.0 * mom.stderr_grad())
        msq_ok = mom.msq_map_err <= cap_map and mom.msq_grad_err <= cap_grad
        rows.append((f"block-moments point {t}", bool(mean_ok and msq_ok),
                     f"|mean|={np.linalg.norm(mom.mean_map_err):.3e} "
                     f"msq={mom.msq_map_err:.3e} cap={cap_map:.3e}"))
    return rows


def harmonic_suite(alphas=None, Ns=(100, 1000, 10000)) -> list[tuple[str, bool, str]]:
    if alphas is None:
        alphas = [round(0.1 * i, 1) for i in range(10)]
    rows = []
    for alpha in alphas:
        kmin = harmonic_threshold(alpha)
        for N in sorted({kmin, *[N for N in Ns if N >= kmin]}):
            chk = harmonic_bounds_check(alpha, N)
            rows.append((f"harmonic alpha={alpha} N={N}", chk.ok,
                         f"{chk.lower:.6g} <= {chk.total:.6g} <= {chk.upper:.6g}"))
    return rows


def tikhonov_step_suite(n_steps: int = 50) -> list[tuple[str, bool, str]]:
    """Successive trajectory differences against (Cbar/mu_f)|1 - eta_{k-1}/eta_k|."""
    problem = scalar_tikhonov_instance()
    etas = [(k + 1.0) ** (-0.3) for k in range(n_steps + 1)]
    path = tikhonov_path(problem, etas, tol=1e-12)
    pts = [res.x for res in path]
    cbar = max(float(np.linalg.norm(problem.grad_f(p))) for p in pts)
    mu_f = problem.constants.mu_f
    rows = []
    ok_all = True
    worst = 0.0
    for k in range(1, len(etas)):
        diff = float(np.linalg.norm(pts[k] - pts[k - 1]))
        bound = (cbar / mu_f) * abs(1.0 - etas[k - 1] / etas[k])
        ok_all &= diff <= bound + 1e-12
        worst = max(worst, diff - bound)
    rows.append(("tikhonov successive-difference bound", bool(ok_all),
                 f"max(diff - bound) = {worst:.3e}, Cbar = {cbar:.4f}"))
    return rows


def run_all(verbose: bool = True) -> bool:
    suites = [
        ("single-block error moments", moments_suite()),
        ("harmonic-sum bounds", harmonic_suite()),
        ("tikhonov trajectory steps", tikhonov_step_suite()),
    ]
    all_ok = True
    for title, rows in suites:
        for name, ok, detail in rows:
            all_ok &= ok
            if verbose:
                print(f"[{'PASS' if ok else 'FAIL'}] {title}: {name} ({detail})")
    return all_ok
