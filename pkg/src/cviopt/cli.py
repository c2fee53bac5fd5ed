"""Command-line entry points: run, compare, bounds, diag."""

from __future__ import annotations

import argparse
import glob
import os
import sys

from .harness import (
    bound_check_report,
    build_problem,
    compare_report,
    parse_config,
    read_aggregate_csv,
    run_experiment,
    write_bounds_csv,
    write_compare_csv,
)
from .schedules import Schedule


def _cmd_run(args) -> int:
    cfg = parse_config(args.config)
    if args.svg:
        cfg.svg = True
    result = run_experiment(cfg)
    rows = compare_report(result["aggregates"])
    if rows:
        path = os.path.join(cfg.output_dir, "compare.csv")
        write_compare_csv(path, rows)
        for r in rows:
            print(f"cell {r.cell}: {r.label} final gap {r.final_gap:.4g} vs "
                  f"{r.baseline} {r.final_gap_baseline:.4g}; dominance={r.dominance}; "
                  f"stability={r.stability:.3%}")
    aborted = [
        (label, cell, rep)
        for (label, cell), reps in result["traces"].items()
        for rep, tr in reps.items()
        if tr.metadata.get("status", "completed") not in ("completed",)
        and not tr.metadata.get("status", "").startswith("inner_stage")
    ]
    for label, cell, rep in aborted:
        print(f"warning: run {label}/{cell}/rep{rep} aborted", file=sys.stderr)
    print(f"wrote {cfg.output_dir}/runs, {cfg.output_dir}/agg")
    return 1 if aborted else 0


def _cmd_compare(args) -> int:
    aggs = {}
    for path in sorted(glob.glob(os.path.join(args.dir, "agg", "*.csv"))):
        agg = read_aggregate_csv(path)
        aggs[(agg.label, agg.cell)] = agg
    if not aggs:
        print(f"no aggregate files under {args.dir}/agg", file=sys.stderr)
        return 1
    rows = compare_report(aggs)
    write_compare_csv(os.path.join(args.dir, "compare.csv"), rows)
    for r in rows:
        print(f"cell {r.cell}: {r.label} vs {r.baseline}: "
              f"final gap {r.final_gap:.4g} / {r.final_gap_baseline:.4g}, "
              f"au-log-gap {r.au_log_gap:.4g} / {r.au_log_gap_baseline:.4g}, "
              f"dominance={r.dominance}")
    return 0


def _cmd_bounds(args) -> int:
    cfg = parse_config(args.config)
    problem = build_problem(cfg.problem)
    any_violation = False
    wrote = 0
    for spec in cfg.solvers:
        if spec.method != "rbirg":
            continue
        for g0, e0 in spec.cells:
            cell = f"g{g0:g}_e{e0:g}"
            path = os.path.join(args.dir, "agg", f"{spec.label}__{cell}.csv")
            if not os.path.exists(path):
                print(f"missing aggregate {path}", file=sys.stderr)
                return 1
            agg = read_aggregate_csv(path)
            schedule = Schedule(g0, e0, spec.a, spec.b, spec.r, spec.mode)
            rows = bound_check_report(agg, problem, schedule)
            out = os.path.join(args.dir, f"bounds_{spec.label}__{cell}.csv")
            write_bounds_csv(out, rows)
            wrote += 1
            viol = sum(r.subopt_violation or r.gap_violation for r in rows)
            any_violation |= viol > 0
            print(f"{spec.label}/{cell}: {len(rows)} records checked, {viol} violations")
    if wrote == 0:
        print("config has no block-method solver sections to check", file=sys.stderr)
        return 1
    return 1 if any_violation else 0


def _cmd_diag(args) -> int:
    from . import diagnostics

    ok = diagnostics.run_all(verbose=True)
    print("diagnostics:", "all passed" if ok else "FAILURES present")
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cviopt",
        description="Replicated experiments for VI-constrained convex optimization solvers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured experiment")
    p_run.add_argument("config")
    p_run.add_argument("--svg", action="store_true", help="also emit SVG charts")
    p_run.set_defaults(fn=_cmd_run)

    p_cmp = sub.add_parser("compare", help="comparison report from an output directory")
    p_cmp.add_argument("dir")
    p_cmp.set_defaults(fn=_cmd_compare)

    p_bnd = sub.add_parser("bounds", help="check aggregates against the theoretical bounds")
    p_bnd.add_argument("dir")
    p_bnd.add_argument("config")
    p_bnd.set_defaults(fn=_cmd_bounds)

    p_diag = sub.add_parser("diag", help="run the diagnostic suites")
    p_diag.set_defaults(fn=_cmd_diag)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
