"""Experiment sweeps over user count and rate requirement, with CSV output.

Each sweep point runs both algorithms on freshly generated instances, one
per seed. Infeasible points are recorded as rows with a status column, never
dropped, so row counts stay at algorithms x values x seeds. CSV bodies are
deterministic apart from the solve-time column, which reports wall time.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .baseline import baseline_solve
from .errors import CertifiedInfeasibleError, CranoptError
from .scenario import ScenarioConfig, generate_scenario
from .solver import SolverConfig, outer_solve

__all__ = ["SweepSpec", "SWEEP_COLUMNS", "run_user_sweep", "run_rate_sweep",
           "write_sweep_csv", "write_mean_csv", "sweep_means"]

SWEEP_COLUMNS = ("param", "value", "seed", "algo", "status", "total_tx_power",
                 "throughput", "ee", "active_rrh_count", "utility",
                 "solve_time_ms")


@dataclass(frozen=True)
class SweepSpec:
    param: str                      # "users" | "rate"
    values: tuple
    seeds: int = 5
    base: ScenarioConfig = field(default_factory=ScenarioConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.param not in ("users", "rate"):
            raise ValueError("param must be 'users' or 'rate'")
        if not self.values:
            raise ValueError("value list must be nonempty")
        if self.seeds < 1:
            raise ValueError("seeds must be >= 1")


def _configure(spec: SweepSpec, value, seed: int) -> ScenarioConfig:
    if spec.param == "users":
        return replace(spec.base, num_users=int(value), rng_seed=seed)
    return replace(spec.base, rate_req=float(value), rng_seed=seed)


def _run_point(scenario, algo: str, solver_config: SolverConfig):
    t0 = time.perf_counter()
    try:
        if algo == "proposed":
            sol = outer_solve(scenario, solver_config)
        else:
            sol = baseline_solve(scenario, solver_config)
        ms = 1000.0 * (time.perf_counter() - t0)
        return {"status": "ok", "total_tx_power": sol.total_tx_power,
                "throughput": sol.throughput, "ee": sol.energy_efficiency,
                "active_rrh_count": sol.active_rrh_count,
                "utility": sol.utility, "solve_time_ms": ms}
    except CertifiedInfeasibleError:
        ms = 1000.0 * (time.perf_counter() - t0)
        return {"status": "infeasible", "total_tx_power": float("nan"),
                "throughput": float("nan"), "ee": float("nan"),
                "active_rrh_count": 0, "utility": float("nan"),
                "solve_time_ms": ms}


def _run_sweep(spec: SweepSpec):
    rows = []
    for value in spec.values:
        for seed in range(spec.seeds):
            scenario = generate_scenario(_configure(spec, value, seed))
            for algo in ("proposed", "baseline"):
                rec = {"param": spec.param, "value": value, "seed": seed,
                       "algo": algo}
                rec.update(_run_point(scenario, algo, spec.solver))
                rows.append(rec)
    return rows


def run_user_sweep(spec: SweepSpec):
    """Sweep the user count; rows as in SWEEP_COLUMNS."""
    if spec.param != "users":
        raise ValueError("run_user_sweep needs a 'users' spec")
    return _run_sweep(spec)


def run_rate_sweep(spec: SweepSpec):
    """Sweep the per-user rate requirement at fixed user count. Also checks
    (and reports) that the mean proposed power is nondecreasing in the
    requirement, within 2% relative tolerance."""
    if spec.param != "rate":
        raise ValueError("run_rate_sweep needs a 'rate' spec")
    rows = _run_sweep(spec)
    means = sweep_means(rows)
    seq = [means[(v, "proposed")]["total_tx_power"] for v in spec.values
           if (v, "proposed") in means]
    violations = []
    for a, b, va, vb in zip(seq, seq[1:], spec.values, spec.values[1:]):
        if not (np.isnan(a) or np.isnan(b)) and b < a * (1 - 0.02):
            violations.append((va, vb, a, b))
    return rows, violations


def sweep_means(rows):
    """Mean metrics per (value, algo) over the seeds with ok status."""
    groups = {}
    for row in rows:
        groups.setdefault((row["value"], row["algo"]), []).append(row)
    out = {}
    for key, members in groups.items():
        ok = [m for m in members if m["status"] == "ok"]
        agg = {"count_ok": len(ok), "count": len(members)}
        for col in ("total_tx_power", "throughput", "ee", "active_rrh_count",
                    "utility"):
            agg[col] = (float(np.mean([m[col] for m in ok])) if ok
                        else float("nan"))
        out[key] = agg
    return out


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def write_sweep_csv(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_COLUMNS)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in SWEEP_COLUMNS])


def write_mean_csv(rows, path):
    means = sweep_means(rows)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["value", "algo", "count", "count_ok", "total_tx_power",
                    "throughput", "ee", "active_rrh_count", "utility"])
        for (value, algo) in sorted(means, key=lambda k: (str(k[0]), k[1])):
            m = means[(value, algo)]
            w.writerow([_fmt(value), algo, m["count"], m["count_ok"],
                        _fmt(m["total_tx_power"]), _fmt(m["throughput"]),
                        _fmt(m["ee"]), _fmt(m["active_rrh_count"]),
                        _fmt(m["utility"])])
