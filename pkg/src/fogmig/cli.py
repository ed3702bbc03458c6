"""Command line interface: single runs, parameter sweeps, planner oracle checks."""

from __future__ import annotations

import argparse
import sys

from .harness import (FeasibilityError, RunConfig, emit_results,
                      run_simulation, sweep)
from .model import ScenarioError, load_scenario
from .planner import PlacementError, PlannerError, compare_planners


def _add_common(p):
    p.add_argument("--scenario", required=True, help="scenario document path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--slots", type=int, default=None,
                   help="override the scenario's slot budget")
    p.add_argument("--out", default=None,
                   help="output directory (default: $FOGMIG_OUT or ./results)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fogmig",
        description="Discrete-time component migration simulator for "
                    "hybrid cloud/fog networks")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate one scenario with one planner")
    _add_common(run_p)
    run_p.add_argument("--planner", default="acm",
                       choices=["acm", "none", "random", "exact"])
    run_p.add_argument("--p-move", type=float, default=1.0,
                       help="per-VNF move probability for the random planner")
    run_p.add_argument("--check", action="store_true",
                       help="emit the per-slot feasibility report as CSV")

    sweep_p = sub.add_parser("sweep", help="sweep a workload parameter")
    _add_common(sweep_p)
    sweep_p.add_argument("--param", required=True,
                         choices=["user-connections", "connected-vnfs"])
    sweep_p.add_argument("--values", required=True,
                         help="comma separated sweep values, e.g. 1,2,3")
    sweep_p.add_argument("--planners", default="acm,none,random",
                         help="comma separated planner ids")
    sweep_p.add_argument("--reps", type=int, default=30,
                         help="replications per sweep point")
    sweep_p.add_argument("--p-move", type=float, default=1.0)

    oracle_p = sub.add_parser(
        "oracle", help="compare the greedy planner against exhaustive search "
                       "on a tiny scenario")
    _add_common(oracle_p)
    return parser


def _cmd_run(args) -> int:
    config = RunConfig(scenario_path=args.scenario, planner=args.planner,
                       seed=args.seed, slots=args.slots, p_move=args.p_move,
                       check=args.check, out_dir=args.out)
    metrics = run_simulation(config)
    row = metrics.rows[0]
    print(f"planner={row.planner} scenario={row.scenario} seed={row.seed}")
    for req in row.report.rows:
        print(f"  request {req.request_id}: proc={req.processing:.6g} "
              f"com={req.communication:.6g} mig={req.migration:.6g} "
              f"total={req.total:.6g}")
    print(f"  makespan={row.makespan:.6g} migrations={row.migrations} "
          f"mean/slot={row.mean_migrations_per_slot:.6g} slots={row.slots} "
          f"completed={row.completed}")
    written = emit_results(metrics, args.out)
    if args.check and row.check_report is not None:
        check_path = written[0].parent / "feasibility.csv"
        check_path.write_text(row.check_report.to_csv(), encoding="utf-8")
        written.append(check_path)
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_sweep(args) -> int:
    values = tuple(int(v) for v in args.values.split(",") if v != "")
    planners = tuple(p for p in args.planners.split(",") if p != "")
    config = RunConfig(scenario_path=args.scenario, planners=planners,
                       seed=args.seed, slots=args.slots, reps=args.reps,
                       sweep_param=args.param, sweep_values=values,
                       p_move=args.p_move, out_dir=args.out)
    metrics = sweep(config)
    for s in metrics.summary():
        print(f"{s.planner} {s.sweep_param}={s.sweep_value}: "
              f"makespan {s.mean_makespan:.6g} +- {s.std_makespan:.3g}, "
              f"migrations/slot {s.mean_migrations_per_slot:.6g}")
    for path in emit_results(metrics, args.out):
        print(f"wrote {path}")
    return 0


def _cmd_oracle(args) -> int:
    scenario = load_scenario(args.scenario)
    mismatches, total = compare_planners(scenario, args.seed, args.slots)
    print(f"compared {total} per-VNF choices: "
          f"{total - len(mismatches)} agree, {len(mismatches)} differ")
    for m in mismatches:
        print(f"  slot {m[0]} request {m[1]} vnf {m[2]}: "
              f"greedy chose {m[3]}, exhaustive chose {m[4]}")
    return 0 if not mismatches else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_oracle(args)
    except (ScenarioError, PlannerError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FeasibilityError, PlacementError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
