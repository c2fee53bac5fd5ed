"""Experiment harness: configured, replicated solver comparisons.

An experiment is described by an INI-style config file (exact grammar in
the README): a problem section, a gap-estimator section, and one section
per solver, each listing (gamma0:eta0) cells.  Every (solver, cell)
combination is run for the configured number of replications with seeds
derived from the master seed, per-run traces are written as CSV, and
aggregate curves (sample mean and standard error per record) feed the
comparison and bound-verification reports.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .metrics import GapEstimatorConfig, averaging_threshold, predicted_bounds
from .problems import ProblemSpec, benchmark_cournot, benchmark_l1_instance, benchmark_unbounded_instance
from .schedules import BOUNDED, UNBOUNDED, Schedule, validate_schedule
from .solvers import run_rbirg, run_sr
from .trace import RunTrace

RUN_COLUMNS = [
    "solver", "cell", "replication", "k", "evals_full_map_equiv", "wall_ms",
    "f_value", "gap_estimate", "natural_residual", "dist_to_xstar",
]

AGG_COLUMNS = [
    "solver", "cell", "k", "evals_full_map_equiv",
    "f_value_mean", "f_value_stderr", "gap_estimate_mean", "gap_estimate_stderr",
    "natural_residual_mean", "natural_residual_stderr",
    "dist_to_xstar_mean", "dist_to_xstar_stderr",
]


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass
class SolverSpec:
    label: str
    method: str  # "rbirg" | "sr"
    cells: list[tuple[float, float]]  # (gamma0, eta0); gamma0 ignored by sr
    a: float = 0.5
    b: float = 0.25
    r: float = 0.0
    mode: str = BOUNDED
    rho: float = 0.5
    variant: str = "identity"


@dataclass
class ExperimentConfig:
    name: str
    problem: dict
    solvers: list[SolverSpec]
    replications: int = 25
    master_seed: int = 0
    budget_fme: float = 1000.0
    metric_cadence_fme: Optional[float] = None
    output_dir: str = "out"
    workers: int = 1
    wall_clock: bool = True
    svg: bool = False
    gap: GapEstimatorConfig = field(default_factory=GapEstimatorConfig)

    def validate(self):
        if self.replications < 1:
            raise ValueError("replication count must be >= 1")
        if self.budget_fme <= 0:
            raise ValueError("budget must be positive")
        for s in self.solvers:
            if s.method == "rbirg":
                for g0, e0 in s.cells:
                    rep = validate_schedule(Schedule(g0, e0, s.a, s.b, s.r, s.mode))
                    if not rep.ok:
                        raise ValueError(f"solver {s.label} cell {g0}:{e0} rejected: "
                                         + "; ".join(rep.violations))


def _parse_cells(text: str) -> list[tuple[float, float]]:
    cells = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        g, e = part.split(":")
        cells.append((float(g), float(e)))
    if not cells:
        raise ValueError("solver section lists no cells")
    return cells


def parse_config(path: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    with open(path) as fh:
        cp.read_file(fh)
    exp = cp["experiment"]
    prob = dict(cp["problem"]) if cp.has_section("problem") else {}
    gap_kwargs = {}
    if cp.has_section("gap_estimator"):
        sec = cp["gap_estimator"]
        gap_kwargs = {
            "n_samples": sec.getint("n_samples", 2000),
            "n_restarts": sec.getint("n_restarts", 8),
            "ascent_iters": sec.getint("ascent_iters", 200),
            "ascent_step": sec.getfloat("ascent_step", 1e-2),
            "seed": sec.getint("seed", 0),
        }
    solvers = []
    for section in cp.sections():
        if not section.startswith("solver."):
            continue
        sec = cp[section]
        method = sec.get("method")
        if method not in ("rbirg", "sr"):
            raise ValueError(f"section [{section}]: unknown method {method!r}")
        solvers.append(SolverSpec(
            label=section.split(".", 1)[1],
            method=method,
            cells=_parse_cells(sec.get("cells")),
            a=sec.getfloat("a", 0.5),
            b=sec.getfloat("b", 0.25),
            r=sec.getfloat("r", 0.0),
            mode=sec.get("mode", BOUNDED),
            rho=sec.getfloat("rho", 0.5),
            variant=sec.get("variant", "identity"),
        ))
    if not solvers:
        raise ValueError("config lists no solver sections")
    cfg = ExperimentConfig(
        name=exp.get("name", "experiment"),
        problem=prob,
        solvers=solvers,
        replications=exp.getint("replications", 25),
        master_seed=exp.getint("master_seed", 0),
        budget_fme=exp.getfloat("budget_fme", 1000.0),
        metric_cadence_fme=exp.getfloat("metric_cadence_fme", fallback=None),
        output_dir=exp.get("output_dir", "out"),
        workers=exp.getint("workers", 1),
        wall_clock=exp.getboolean("wall_clock", True),
        svg=exp.getboolean("svg", False),
        gap=GapEstimatorConfig(**gap_kwargs) if gap_kwargs else GapEstimatorConfig(),
    )
    cfg.validate()
    return cfg


def build_problem(problem_cfg: dict) -> ProblemSpec:
    """Instantiate the problem named by a config section (all keys strings)."""
    kind = problem_cfg.get("kind", "cournot")
    get = lambda key, default: type(default)(problem_cfg.get(key, default))
    if kind == "cournot":
        return benchmark_cournot(
            seed=get("instance_seed", 0),
            d=get("firms", 4),
            J=get("nodes", 3),
            alpha=get("alpha", 50.0),
            beta=get("beta", 0.05),
            cap=get("cap", 120.0),
            sigma=get("sigma", 1.01),
            slope_range=(get("slope_min", 10.0), get("slope_max", 50.0)),
        )
    if kind == "l1_affine_box":
        return benchmark_l1_instance(
            seed=get("instance_seed", 0),
            n=get("n", 8),
            d=get("blocks", 4),
            m=get("rows", 3),
            box=get("box", 1.0),
        )
    if kind == "strongly_convex_unbounded":
        return benchmark_unbounded_instance(
            seed=get("instance_seed", 0),
            n=get("n", 6),
            d=get("blocks", 3),
        )
    raise ValueError(f"unknown problem kind {kind!r}")


_PROBLEM_CACHE: dict = {}


def _cached_problem(problem_cfg_items: tuple) -> ProblemSpec:
    if problem_cfg_items not in _PROBLEM_CACHE:
        _PROBLEM_CACHE[problem_cfg_items] = build_problem(dict(problem_cfg_items))
    return _PROBLEM_CACHE[problem_cfg_items]


# ---------------------------------------------------------------------------
# Seed derivation and single-run execution
# ---------------------------------------------------------------------------


def derive_seed(master_seed: int, cell_id: str, replication: int) -> int:
    """Stable per-run seed: hash of (master seed, cell id, replication)."""
    digest = hashlib.sha256(cell_id.encode("utf-8")).digest()
    cell_word = int.from_bytes(digest[:8], "little")
    ss = np.random.SeedSequence((int(master_seed), cell_word, int(replication)))
    return int(ss.generate_state(1)[0])


def cell_name(gamma0: float, eta0: float) -> str:
    return f"g{gamma0:g}_e{eta0:g}"


def _run_one(job: dict) -> tuple[str, str, int, RunTrace]:
    problem = _cached_problem(job["problem_items"])
    solver = job["solver"]
    seed = job["seed"]
    gap_cfg = GapEstimatorConfig(**job["gap"]) if job["gap"] is not None else None
    if solver["method"] == "rbirg":
        schedule = Schedule(solver["gamma0"], solver["eta0"], solver["a"],
                            solver["b"], solver["r"], solver["mode"])
        trace = run_rbirg(
            problem, schedule,
            budget_fme=job["budget_fme"], seed=seed,
            metric_cadence=job["cadence_iters"], gap_config=gap_cfg,
            wall_clock=job["wall_clock"],
            metadata={"label": solver["label"], "cell": job["cell"], "replication": job["rep"]},
        )
    else:
        trace = run_sr(
            problem, eta0=solver["eta0"], rho=solver["rho"],
            variant=solver["variant"], budget_fme=job["budget_fme"], seed=seed,
            metric_cadence=job["cadence_fme"], gap_config=gap_cfg,
            wall_clock=job["wall_clock"],
            metadata={"label": solver["label"], "cell": job["cell"], "replication": job["rep"]},
        )
    trace.metadata.pop("final_x", None)
    trace.metadata.pop("final_xbar", None)
    return solver["label"], job["cell"], job["rep"], trace


def _jobs(cfg: ExperimentConfig) -> list[dict]:
    problem_items = tuple(sorted(cfg.problem.items()))
    problem = _cached_problem(problem_items)
    d = problem.structure.d
    cadence_fme = cfg.metric_cadence_fme or max(1.0, cfg.budget_fme / 200.0)
    jobs = []
    for spec in cfg.solvers:
        for g0, e0 in spec.cells:
            cell = cell_name(g0, e0)
            cell_id = f"{spec.label}:{cell}"
            for rep in range(cfg.replications):
                jobs.append({
                    "problem_items": problem_items,
                    "solver": {
                        "label": spec.label, "method": spec.method, "gamma0": g0, "eta0": e0,
                        "a": spec.a, "b": spec.b, "r": spec.r, "mode": spec.mode,
                        "rho": spec.rho, "variant": spec.variant,
                    },
                    "cell": cell,
                    "rep": rep,
                    "seed": derive_seed(cfg.master_seed, cell_id, rep),
                    "budget_fme": cfg.budget_fme,
                    "cadence_iters": max(1, int(round(cadence_fme * d))),
                    "cadence_fme": max(1, int(round(cadence_fme))),
                    "gap": vars(cfg.gap).copy() if problem.is_bounded else None,
                    "wall_clock": cfg.wall_clock,
                })
    return jobs


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

_METRICS = ["f_value", "gap_estimate", "natural_residual", "dist_to_xstar"]


@dataclass
class AggregateCurve:
    label: str
    cell: str
    method: str
    ks: np.ndarray
    fme: np.ndarray
    stats: dict  # metric -> (mean array, stderr array)
    n_reps: int


def aggregate_traces(label: str, cell: str, method: str, traces: list[RunTrace]) -> AggregateCurve:
    """Record-aligned sample mean and standard error across replications.

    Replications of a cell share the same cadence; runs that aborted early
    are truncated to the shortest common record list (their diagnostic is
    kept in the per-run file).
    """
    n_common = min(len(t) for t in traces)
    if n_common == 0:
        raise ValueError(f"cell {cell}: a replication produced no records")
    ks = traces[0].ks[:n_common]
    fme = traces[0].column("fme")[:n_common]
    stats = {}
    n = len(traces)
    for metric in _METRICS:
        data = np.stack([t.column(metric)[:n_common] for t in traces])
        mean = data.mean(axis=0)
        stderr = data.std(axis=0, ddof=1) / np.sqrt(n) if n > 1 else np.zeros(n_common)
        stats[metric] = (mean, stderr)
    return AggregateCurve(label, cell, method, ks, fme, stats, n)


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_run_csv(path: str, label: str, cell: str, rep: int, trace: RunTrace):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RUN_COLUMNS)
        for rec in trace.records:
            w.writerow([
                label, cell, rep, rec.k, _fmt(rec.fme), _fmt(rec.wall_ms),
                _fmt(rec.f_value), _fmt(rec.gap_estimate),
                _fmt(rec.natural_residual), _fmt(rec.dist_to_xstar),
            ])


def write_aggregate_csv(path: str, agg: AggregateCurve):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(AGG_COLUMNS)
        for idx in range(len(agg.ks)):
            row = [agg.label, agg.cell, int(agg.ks[idx]), _fmt(float(agg.fme[idx]))]
            for metric in _METRICS:
                mean, stderr = agg.stats[metric]
                row.extend([_fmt(float(mean[idx])), _fmt(float(stderr[idx]))])
            w.writerow(row)


def read_aggregate_csv(path: str) -> AggregateCurve:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"empty aggregate file {path}")
    ks = np.array([int(r["k"]) for r in rows])
    fme = np.array([float(r["evals_full_map_equiv"]) for r in rows])
    stats = {}
    for metric in _METRICS:
        mean = np.array([float(r[f"{metric}_mean"]) for r in rows])
        stderr = np.array([float(r[f"{metric}_stderr"]) for r in rows])
        stats[metric] = (mean, stderr)
    label, cell = rows[0]["solver"], rows[0]["cell"]
    method = "sr" if "sr" in label else "rbirg"
    return AggregateCurve(label, cell, method, ks, fme, stats, 0)


# ---------------------------------------------------------------------------
# Experiment driver
# ---------------------------------------------------------------------------


def run_experiment(cfg: ExperimentConfig, write_files: bool = True) -> dict:
    """Execute all cells and replications; return aggregates keyed by (label, cell).

    Runs execute concurrently up to cfg.workers; all file output is written
    by the parent after collection, in deterministic order.
    """
    jobs = _jobs(cfg)
    results: dict[tuple[str, str], dict[int, RunTrace]] = {}
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(_run_one, jobs, chunksize=1))
    else:
        outcomes = [_run_one(job) for job in jobs]
    for label, cell, rep, trace in outcomes:
        results.setdefault((label, cell), {})[rep] = trace

    aggregates: dict[tuple[str, str], AggregateCurve] = {}
    method_of = {s.label: s.method for s in cfg.solvers}
    for (label, cell), reps in sorted(results.items()):
        traces = [reps[j] for j in sorted(reps)]
        aggregates[(label, cell)] = aggregate_traces(label, cell, method_of[label], traces)

    if write_files:
        out = cfg.output_dir
        os.makedirs(os.path.join(out, "runs"), exist_ok=True)
        os.makedirs(os.path.join(out, "agg"), exist_ok=True)
        for (label, cell), reps in sorted(results.items()):
            for j in sorted(reps):
                write_run_csv(os.path.join(out, "runs", f"{label}__{cell}__rep{j:03d}.csv"),
                              label, cell, j, reps[j])
        for key, agg in sorted(aggregates.items()):
            write_aggregate_csv(os.path.join(out, "agg", f"{agg.label}__{agg.cell}.csv"), agg)
        if cfg.svg:
            emit_svg(cfg, aggregates)
    return {"aggregates": aggregates, "traces": results}


# ---------------------------------------------------------------------------
# Comparison report
# ---------------------------------------------------------------------------


@dataclass
class CompareRow:
    cell: str
    label: str
    baseline: str
    final_gap: float
    final_gap_baseline: float
    final_f: float
    final_f_baseline: float
    au_log_gap: float
    au_log_gap_baseline: float
    dominance: bool
    stability: float  # trailing-20% relative oscillation of mean f


def _interp_curve(fme_src, vals_src, fme_dst):
    return np.interp(fme_dst, fme_src, vals_src)


def _au_log(fme, gap):
    pos = gap > 0
    if pos.sum() < 2:
        return float("nan")
    return float(np.trapezoid(np.log(gap[pos]), fme[pos]))


def compare_report(aggregates, trailing: float = 0.5) -> list[CompareRow]:
    """Per-cell comparison of every non-baseline solver against the sr curve.

    Dominance means the solver's mean gap estimate sits strictly below the
    baseline's on the trailing fraction of the shared budget axis
    (resampled onto the coarser grid when the axes differ).
    """
    by_cell: dict[str, list[AggregateCurve]] = {}
    for agg in (aggregates.values() if isinstance(aggregates, dict) else aggregates):
        by_cell.setdefault(agg.cell, []).append(agg)
    rows: list[CompareRow] = []
    for cell, aggs in sorted(by_cell.items()):
        baselines = [a for a in aggs if a.method == "sr"]
        contenders = [a for a in aggs if a.method != "sr"]
        if not baselines or not contenders:
            continue
        base = baselines[0]
        for agg in contenders:
            # Resample onto the coarser of the two budget grids.
            grid = base.fme if len(base.fme) <= len(agg.fme) else agg.fme
            g_a = _interp_curve(agg.fme, agg.stats["gap_estimate"][0], grid)
            g_b = _interp_curve(base.fme, base.stats["gap_estimate"][0], grid)
            tail = grid >= (1.0 - trailing) * grid[-1]
            dominance = bool(np.all(g_a[tail] < g_b[tail]))
            f_mean = agg.stats["f_value"][0]
            t20 = agg.fme >= 0.8 * agg.fme[-1]
            seg = f_mean[t20]
            stability = float((seg.max() - seg.min()) / max(abs(seg.mean()), 1e-300))
            rows.append(CompareRow(
                cell=cell, label=agg.label, baseline=base.label,
                final_gap=float(agg.stats["gap_estimate"][0][-1]),
                final_gap_baseline=float(base.stats["gap_estimate"][0][-1]),
                final_f=float(f_mean[-1]),
                final_f_baseline=float(base.stats["f_value"][0][-1]),
                au_log_gap=_au_log(agg.fme, agg.stats["gap_estimate"][0]),
                au_log_gap_baseline=_au_log(base.fme, base.stats["gap_estimate"][0]),
                dominance=dominance,
                stability=stability,
            ))
    return rows


def write_compare_csv(path: str, rows: list[CompareRow]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["cell", "solver", "baseline", "final_gap", "final_gap_baseline",
                    "final_f", "final_f_baseline", "au_log_gap", "au_log_gap_baseline",
                    "dominance", "stability"])
        for r in rows:
            w.writerow([r.cell, r.label, r.baseline, _fmt(r.final_gap), _fmt(r.final_gap_baseline),
                        _fmt(r.final_f), _fmt(r.final_f_baseline), _fmt(r.au_log_gap),
                        _fmt(r.au_log_gap_baseline), int(r.dominance), _fmt(r.stability)])


# ---------------------------------------------------------------------------
# Bound verification report
# ---------------------------------------------------------------------------


@dataclass
class BoundRow:
    k: int
    subopt_mean: float
    subopt_stderr: float
    subopt_bound: float
    subopt_violation: bool
    gap_mean: float
    gap_stderr: float
    gap_bound: float
    gap_violation: bool


def bound_check_report(agg: AggregateCurve, problem: ProblemSpec,
                       schedule: Schedule) -> list[BoundRow]:
    """Mean curves side by side with the theoretical bounds, with flags.

    A violation is flagged when mean - 3 * stderr exceeds the bound.
    Records before the averaging threshold are excluded.  Note the gap
    column is a lower-bound estimate of the true gap, so its flag can only
    fire if even the underestimate crosses the bound.
    """
    M, C_F, C_f = problem.constants.require("M", "C_F", "C_f")
    fstar = problem.optimal_value()
    p_min = problem.structure.p_min
    kmin = averaging_threshold(schedule.r)
    rows = []
    f_mean, f_err = agg.stats["f_value"]
    g_mean, g_err = agg.stats["gap_estimate"]
    for idx, k in enumerate(agg.ks):
        if k < kmin:
            continue
        bounds = predicted_bounds(schedule, int(k), M=M, C_F=C_F, C_f=C_f, p_min=p_min)
        sub_m = float(f_mean[idx]) - fstar
        sub_e = float(f_err[idx])
        gap_m, gap_e = float(g_mean[idx]), float(g_err[idx])
        rows.append(BoundRow(
            k=int(k),
            subopt_mean=sub_m, subopt_stderr=sub_e, subopt_bound=bounds.suboptimality,
            subopt_violation=bool(sub_m - 3.0 * sub_e > bounds.suboptimality),
            gap_mean=gap_m, gap_stderr=gap_e, gap_bound=bounds.gap,
            gap_violation=bool(gap_m - 3.0 * gap_e > bounds.gap),
        ))
    return rows


def write_bounds_csv(path: str, rows: list[BoundRow]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "subopt_mean", "subopt_stderr", "subopt_bound", "subopt_violation",
                    "gap_mean", "gap_stderr", "gap_bound", "gap_violation"])
        for r in rows:
            w.writerow([r.k, _fmt(r.subopt_mean), _fmt(r.subopt_stderr), _fmt(r.subopt_bound),
                        int(r.subopt_violation), _fmt(r.gap_mean), _fmt(r.gap_stderr),
                        _fmt(r.gap_bound), int(r.gap_violation)])


# ---------------------------------------------------------------------------
# Optional SVG output
# ---------------------------------------------------------------------------


def emit_svg(cfg: ExperimentConfig, aggregates: dict):
    """Self-contained log-scale line charts per cell (needs matplotlib)."""
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    out = os.path.join(cfg.output_dir, "plots")
    os.makedirs(out, exist_ok=True)
    cells = sorted({agg.cell for agg in aggregates.values()})
    for cell in cells:
        for metric, fname in (("gap_estimate", "gap"), ("f_value", "objective")):
            fig, ax = plt.subplots(figsize=(5, 3.4))
            for (label, c), agg in sorted(aggregates.items()):
                if c != cell:
                    continue
                mean = agg.stats[metric][0]
                pos = mean > 0
                if metric == "gap_estimate" and pos.any():
                    ax.semilogy(agg.fme[pos], mean[pos], label=label)
                else:
                    ax.plot(agg.fme, mean, label=label)
            ax.set_xlabel("full-map-equivalent evaluations")
            ax.set_ylabel(f"sample mean {metric.replace('_', ' ')}")
            ax.set_title(f"{cfg.name}: {cell}")
            ax.legend(fontsize=7)
            fig.tight_layout()
            fig.savefig(os.path.join(out, f"{fname}_{cell}.svg"))
            plt.close(fig)
