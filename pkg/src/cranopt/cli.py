"""Command-line harness: instance generation, single solves, the reference
algorithm, the exhaustive oracle, figure-style sweeps, and comparisons.

Exit codes: 0 success, 1 usage/input error, 2 infeasible, 3 internal error.
Every command writes its outputs under --out together with a run manifest
(command, resolved config, seed, version, wall time). CSV bodies are
reproducible; timestamps and wall times live in the manifest and the
solve-time column only.
"""

from __future__ import annotations

import argparse
import csv
import json
import subprocess
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .baseline import PowerGrid, baseline_solve, brute_force_oracle
from .errors import (CertifiedInfeasibleError, CranoptError,
                     InstanceTooLargeError, InvariantViolationError,
                     ParseError)
from .scenario import (Scenario, generate_scenario, load_scenario,
                       save_scenario)
from .solver import SolverConfig, outer_solve
from .sweeps import (SweepSpec, run_rate_sweep, run_user_sweep,
                     sweep_means, write_mean_csv, write_sweep_csv)

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def _version_string() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"],
                             capture_output=True, text=True, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return f"v{__version__}"


def _write_manifest(out_dir: Path, command: str, scenario, seed, extra=None,
                    wall_time=0.0, outputs=()):
    doc = {
        "command": command,
        "config": asdict(scenario.config) if scenario is not None else None,
        "seed": seed,
        "version": _version_string(),
        "wall_time_s": wall_time,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "outputs": sorted(str(p) for p in outputs),
    }
    if doc["config"] is not None:
        doc["config"]["antennas_range"] = list(doc["config"]["antennas_range"])
        doc["config"]["bbu_load_range"] = list(doc["config"]["bbu_load_range"])
    if extra:
        doc.update(extra)
    path = out_dir / "manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, default=str)
    return path


def _load_instance(path, seed) -> Scenario:
    scenario = load_scenario(path)
    if seed is not None and seed != scenario.config.rng_seed:
        from dataclasses import replace
        scenario = generate_scenario(replace(scenario.config, rng_seed=seed))
    return scenario


def _write_solution_csv(path, scenario, solution):
    alloc = solution.allocation
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["user", "rrh", "bbu", "power_w", "rate_bpshz"])
        for n in range(scenario.config.num_users):
            col = alloc.alpha[:, n]
            if col.max() > 0.5:
                r = int(col.argmax())
                b = int(alloc.beta[r].argmax()) if alloc.beta[r].sum() > 0.5 else -1
                w.writerow([n, r, b, f"{alloc.p[r, n]:.9g}",
                            f"{solution.per_user_rates[n]:.9g}"])
            else:
                w.writerow([n, -1, -1, "0", "0"])


def _summary(solution):
    return {
        "utility": solution.utility,
        "total_tx_power": solution.total_tx_power,
        "throughput": solution.throughput,
        "energy_efficiency": solution.energy_efficiency,
        "active_rrh_count": solution.active_rrh_count,
        "feasible": bool(solution.report.ok),
    }


def _cmd_generate(args, out_dir):
    scenario = _load_instance(args.config, args.seed)
    dest = out_dir / "scenario.json"
    save_scenario(scenario, dest)
    return scenario, {"status": "ok"}, [dest]


def _cmd_solve(args, out_dir, algo):
    scenario = _load_instance(args.config, args.seed)
    solve = outer_solve if algo == "proposed" else baseline_solve
    solution = solve(scenario, SolverConfig())
    sol_path = out_dir / "solution.csv"
    trace_path = out_dir / "trace.csv"
    _write_solution_csv(sol_path, scenario, solution)
    solution.trace.to_csv(trace_path)
    return scenario, {"status": "ok", "algo": algo,
                      "summary": _summary(solution)}, [sol_path, trace_path]


def _cmd_oracle(args, out_dir):
    scenario = _load_instance(args.config, args.seed)
    grid = PowerGrid.default(scenario.config.p_max, levels=args.oracle_grid)
    solution = brute_force_oracle(scenario, grid)
    sol_path = out_dir / "solution.csv"
    _write_solution_csv(sol_path, scenario, solution)
    return scenario, {"status": "ok", "algo": "oracle",
                      "grid_levels": list(grid.levels),
                      "summary": _summary(solution)}, [sol_path]


def _cmd_sweep(args, out_dir):
    scenario = _load_instance(args.config, args.seed)
    values = tuple(
        int(v) if args.sweep_param == "users" else float(v)
        for v in args.values.split(","))
    spec = SweepSpec(param=args.sweep_param, values=values, seeds=args.seeds,
                     base=scenario.config)
    extra = {"status": "ok", "sweep_param": args.sweep_param,
             "values": list(values), "seeds": args.seeds}
    if args.sweep_param == "users":
        rows = run_user_sweep(spec)
    else:
        rows, violations = run_rate_sweep(spec)
        extra["monotonicity_violations"] = [list(v) for v in violations]
    sweep_path = out_dir / "sweep.csv"
    mean_path = out_dir / "sweep_mean.csv"
    write_sweep_csv(rows, sweep_path)
    write_mean_csv(rows, mean_path)
    return scenario, extra, [sweep_path, mean_path]


def _cmd_compare(args, out_dir):
    sweep_path = out_dir / "sweep.csv"
    if not sweep_path.exists():
        raise ParseError(f"{sweep_path} not found; run a sweep into --out first")
    with open(sweep_path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    by_point = {}
    for row in rows:
        key = (row["value"], row["seed"])
        by_point.setdefault(key, {})[row["algo"]] = row
    out_path = out_dir / "comparison.csv"
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["value", "seed", "status", "proposed_tx", "baseline_tx",
                    "tx_ratio", "proposed_utility", "baseline_utility",
                    "utility_ratio", "proposed_active", "baseline_active"])
        for (value, seed), algos in sorted(
                by_point.items(), key=lambda kv: (str(kv[0][0]), int(kv[0][1]))):
            prop, base = algos.get("proposed"), algos.get("baseline")
            if prop is None or base is None:
                continue
            ok = prop["status"] == "ok" and base["status"] == "ok"
            def ratio(a, b):
                try:
                    return f"{float(a) / float(b):.9g}"
                except (ValueError, ZeroDivisionError):
                    return "nan"
            w.writerow([
                value, seed, "ok" if ok else "infeasible",
                prop["total_tx_power"], base["total_tx_power"],
                ratio(prop["total_tx_power"], base["total_tx_power"]),
                prop["utility"], base["utility"],
                ratio(prop["utility"], base["utility"]),
                prop["active_rrh_count"], base["active_rrh_count"],
            ])
    return None, {"status": "ok", "points": len(by_point)}, [out_path]


def build_parser() -> _Parser:
    parser = _Parser(prog="cranopt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required,
                       help="scenario or config JSON file")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config's rng_seed")
        p.add_argument("--out", required=True, help="output directory")

    common(sub.add_parser("generate", help="materialize a scenario file"))
    common(sub.add_parser("solve", help="run the two-step solver"))
    common(sub.add_parser("baseline", help="run the max-SINR reference"))
    oracle = sub.add_parser("oracle", help="exhaustive search on tiny instances")
    common(oracle)
    oracle.add_argument("--oracle-grid", type=int, default=6,
                        help="number of positive grid power levels")
    sweep = sub.add_parser("sweep", help="run a figure-style sweep")
    common(sweep)
    sweep.add_argument("--sweep-param", choices=("users", "rate"),
                       required=True)
    sweep.add_argument("--values", required=True,
                       help="comma-separated sweep values")
    sweep.add_argument("--seeds", type=int, default=5)
    comp = sub.add_parser("compare",
                          help="summarize proposed vs baseline from a sweep")
    comp.add_argument("--out", required=True,
                      help="directory containing sweep.csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    try:
        if args.command == "generate":
            scenario, extra, outputs = _cmd_generate(args, out_dir)
        elif args.command == "solve":
            scenario, extra, outputs = _cmd_solve(args, out_dir, "proposed")
        elif args.command == "baseline":
            scenario, extra, outputs = _cmd_solve(args, out_dir, "baseline")
        elif args.command == "oracle":
            scenario, extra, outputs = _cmd_oracle(args, out_dir)
        elif args.command == "sweep":
            scenario, extra, outputs = _cmd_sweep(args, out_dir)
        elif args.command == "compare":
            scenario, extra, outputs = _cmd_compare(args, out_dir)
        else:  # pragma: no cover - argparse enforces the choices
            parser.error(f"unknown command {args.command!r}")
    except (ParseError, InvariantViolationError, InstanceTooLargeError,
            FileNotFoundError, ValueError) as exc:
        print(f"cranopt: error: {exc}", file=sys.stderr)
        return 1
    except CertifiedInfeasibleError as exc:
        seed = getattr(args, "seed", None)
        _write_manifest(out_dir, args.command, None, seed,
                        {"status": "infeasible", "detail": str(exc)},
                        time.perf_counter() - t0)
        print(f"cranopt: infeasible: {exc}", file=sys.stderr)
        return 2
    except CranoptError as exc:
        print(f"cranopt: internal error: {exc}", file=sys.stderr)
        return 3
    manifest = _write_manifest(out_dir, args.command, scenario,
                               getattr(args, "seed", None), extra,
                               time.perf_counter() - t0, outputs)
    print(f"wrote {', '.join(str(p) for p in list(outputs) + [manifest])}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
