"""Two-step solver: alternating association and power subproblems, integer
rounding, feasibility repair, and switch-off consolidation.

The alternation runs entirely inside the high-SINR surrogate model, which is
self-consistent but sizes powers optimistically at low rate targets. The
returned solution must instead satisfy the exact shared-antenna rate model,
so the repair stage rescales powers to hit the exact per-user targets (plus
a small safety margin) before validating. Switching under-used RRHs off is
what actually saves cost once the state is integer; the relaxed on-off
variables cannot see that fixed cost, so a greedy consolidation pass tries
each active RRH, re-solves the power subproblem without it, and keeps the
cheapest feasible outcome.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import gp as gpmod
from .errors import CertifiedInfeasibleError, StepInfeasibleError
from .rates import Allocation, exact_rate_matrix, utility, throughput
from .scenario import Scenario, validate_solution
from .subproblems import (Step1Iterate, Step2Iterate, alpha_var, beta_var,
                          build_step1_gp, build_step2_gp, gamma_table, p_var,
                          s_var, sigma_var, step2_values_to_powers, y_var)

__all__ = [
    "SolverConfig",
    "TraceRow",
    "SolveTrace",
    "Solution",
    "step1_solve",
    "step2_solve",
    "round_allocation",
    "repair_feasibility",
    "outer_solve",
]


@dataclass(frozen=True)
class SolverConfig:
    eps1: float = 1e-3        # association change
    eps2: float = 1e-3        # fronthaul-assignment change
    eps3: float = 1e-3        # on-off change
    eps4: float = 1e-3        # power change (Watt, max-norm)
    max_inner_iter: int = 12
    max_outer_iter: int = 50
    margin: float = 0.02      # relative rate-target inflation for repair
    rounding: str = "argmax"
    gp_tol_feas: float = 1e-8
    gp_tol_opt: float = 1e-6
    gp_max_iter: int = 20000
    alpha_floor: float = 1e-6
    p_floor: float = 1e-12
    consolidate: bool = True
    trim_rounds: int = 60

    def __post_init__(self):
        for name in ("eps1", "eps2", "eps3", "eps4"):
            if not 0 < getattr(self, name) < 1:
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.max_inner_iter < 1 or self.max_outer_iter < 1:
            raise ValueError("iteration caps must be >= 1")


@dataclass(frozen=True)
class TraceRow:
    outer: int
    step: str       # "assoc" | "power"
    inner: int
    objective: float
    change_norm: float
    gp_status: str


@dataclass
class SolveTrace:
    rows: list = field(default_factory=list)
    outer_criteria: list = field(default_factory=list)
    events: list = field(default_factory=list)

    def log(self, msg):
        self.events.append(msg)

    def inner_objectives(self):
        """Objective sequences grouped by (outer, step), in trace order."""
        groups = {}
        for row in self.rows:
            groups.setdefault((row.outer, row.step), []).append(row.objective)
        return groups

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["outer", "step", "inner", "objective", "change_norm",
                        "gp_status"])
            for r in self.rows:
                w.writerow([r.outer, r.step, r.inner, f"{r.objective:.9g}",
                            f"{r.change_norm:.9g}", r.gp_status])


@dataclass(frozen=True)
class Solution:
    allocation: Allocation
    utility: float
    per_user_rates: np.ndarray
    report: object
    trace: SolveTrace

    @property
    def total_tx_power(self) -> float:
        return float((self.allocation.alpha * self.allocation.p).sum())

    @property
    def throughput(self) -> float:
        return float(self.per_user_rates.sum())

    @property
    def energy_efficiency(self) -> float:
        return self.throughput / self.utility

    @property
    def active_rrh_count(self) -> int:
        return int(round(self.allocation.y.sum()))


# ---------------------------------------------------------------------------
# initialization
# ---------------------------------------------------------------------------

def _interference_aware_powers(scenario, assoc, rate_targets, rounds=80):
    """Fixed point of p = gamma_tgt (sigma2 + I(p)) / h on a single-server
    association, targeting the high-SINR per-user rates. Diverging instances
    are capped at the RRH budget and surface later as infeasibility."""
    cfg = scenario.config
    h = scenario.channel
    srv = assoc.argmax(axis=0)
    idx = np.arange(cfg.num_users)
    n_r = assoc.sum(axis=1)
    gamma_tgt = n_r[srv] * (2.0 ** rate_targets) / scenario.antennas[srv]
    hn = h[srv, idx]
    p = gamma_tgt * cfg.noise_power / hn
    for _ in range(rounds):
        mat = np.zeros((cfg.num_rrhs, cfg.num_users))
        mat[srv, idx] = p
        row = mat.sum(axis=1)
        m = h * (row[:, None] - mat)
        i_n = m.sum(axis=0) - m[srv, idx]
        p_new = gamma_tgt * (cfg.noise_power + i_n) / hn
        if p_new.max() > cfg.p_max:
            p_new = np.minimum(p_new, cfg.p_max)
        if np.max(np.abs(p_new - p)) <= 1e-14 * (1.0 + p.max()):
            p = p_new
            break
        p = p_new
    mat = np.zeros((cfg.num_rrhs, cfg.num_users))
    mat[srv, idx] = p
    return mat


def _initial_state(scenario, config):
    """Warm start: almost-integer association on each user's best max-SINR
    RRH, even fronthaul split, everything on, and interference-aware powers
    on the tentative serving pairs (with a little headroom so the relaxed
    rate constraints start strictly feasible)."""
    from .baseline import max_sinr_association  # deferred: avoids a cycle

    cfg = scenario.config
    r_cnt, n_cnt, b_cnt = cfg.num_rrhs, cfg.num_users, cfg.num_bbus
    p_ref = np.full((r_cnt, n_cnt), cfg.p_max / n_cnt)
    assoc = max_sinr_association(scenario, p_ref)
    spread = 0.02
    alpha0 = np.full((r_cnt, n_cnt), spread / max(r_cnt - 1, 1))
    alpha0[assoc > 0.5] = 0.9
    if r_cnt == 1:
        alpha0[:] = 0.9
    beta0 = np.full((r_cnt, b_cnt), 1.0 / b_cnt)
    y0 = np.ones(r_cnt)
    p0 = _interference_aware_powers(
        scenario, assoc, scenario.rate_req * (1.0 + config.margin))
    return Step1Iterate(alpha0, beta0, y0), p0, assoc


# ---------------------------------------------------------------------------
# inner loops
# ---------------------------------------------------------------------------

def _objective_slack(prev_obj):
    return 1e-6 * max(1.0, abs(prev_obj))


def _probe_power(scenario, p_fixed):
    """Signal power assumed for pairs that currently transmit nothing, when
    the association step prices a re-assignment. Matching the scale of the
    powers actually in use keeps hypothetical links comparable to real ones;
    the budget split is only used before any power has been allocated."""
    p_fixed = np.asarray(p_fixed)
    pos = p_fixed[p_fixed > 0]
    if pos.size == 0:
        return scenario.config.p_max / scenario.config.num_users
    return float(pos.mean())


def step1_solve(scenario, p_fixed, init: Step1Iterate, config: SolverConfig,
                trace: SolveTrace | None = None, outer: int = 0):
    """Iterate the association subproblem at frozen powers until the iterate
    stops moving (or stops improving)."""
    trace = trace if trace is not None else SolveTrace()
    cfg = scenario.config
    cur = init
    prev_obj = math.inf
    warm = None
    p_ref = _probe_power(scenario, p_fixed)
    for t1 in range(1, config.max_inner_iter + 1):
        built = build_step1_gp(scenario, p_fixed, cur, p_ref=p_ref,
                               alpha_floor=config.alpha_floor)
        x0 = dict(built.expansion) if warm is None else warm
        sol = gpmod.solve(built.gp, tol_feas=config.gp_tol_feas,
                          tol_opt=config.gp_tol_opt,
                          max_iter=config.gp_max_iter, x0=x0)
        if sol.status == "infeasible-detected" or not sol.values:
            if t1 == 1:
                raise StepInfeasibleError(
                    "association subproblem infeasible at the first iteration")
            trace.log(f"outer {outer}: assoc GP infeasible at inner {t1}, "
                      "keeping previous iterate")
            break
        if sol.objective_value > prev_obj + _objective_slack(prev_obj):
            trace.log(f"outer {outer}: assoc objective stopped improving at "
                      f"inner {t1}, iterate discarded")
            break
        alpha = np.array([[sol.values[alpha_var(r, n)] for n in range(cfg.num_users)]
                          for r in range(cfg.num_rrhs)])
        beta = np.array([[sol.values[beta_var(r, b)] for b in range(cfg.num_bbus)]
                         for r in range(cfg.num_rrhs)])
        y = np.array([sol.values[y_var(r)] for r in range(cfg.num_rrhs)])
        d_alpha = float(np.max(np.abs(alpha - cur.alpha)))
        d_beta = float(np.max(np.abs(beta - cur.beta)))
        d_y = float(np.max(np.abs(y - cur.y)))
        change = max(d_alpha, d_beta, d_y)
        trace.rows.append(TraceRow(outer, "assoc", t1, sol.objective_value,
                                   change, sol.status))
        cur = Step1Iterate(np.clip(alpha, config.alpha_floor, 1.0),
                           np.clip(beta, config.alpha_floor, 1.0),
                           np.clip(y, config.alpha_floor, 1.0))
        prev_obj = sol.objective_value
        warm = dict(sol.values)
        if d_alpha <= config.eps1 and d_beta <= config.eps2 and d_y <= config.eps3:
            break
    return cur, trace


def step2_solve(scenario, fixed_assoc: Allocation, init: Step2Iterate,
                config: SolverConfig, trace: SolveTrace | None = None,
                outer: int = 0, rate_targets=None):
    """Iterate the power subproblem at a frozen integer association. The
    subproblem is exact within the surrogate rate model, so it converges in
    one productive solve plus one confirming solve."""
    trace = trace if trace is not None else SolveTrace()
    scen = scenario
    if rate_targets is not None:
        scen = replace(scenario, rate_req=np.asarray(rate_targets, dtype=float))
    p_cur = np.asarray(init.p, dtype=float)
    prev_obj = math.inf
    for t2 in range(1, config.max_inner_iter + 1):
        built = build_step2_gp(scen, fixed_assoc, Step2Iterate(p_cur),
                               p_floor=config.p_floor)
        if not built.gp.bounds:
            # nothing is served; the zero power matrix is the fixed point
            trace.rows.append(TraceRow(outer, "power", t2, utility(
                fixed_assoc.replace_p(np.zeros_like(p_cur)), scenario), 0.0,
                "optimal"))
            return np.zeros_like(p_cur), trace
        sol = gpmod.solve(built.gp, tol_feas=config.gp_tol_feas,
                          tol_opt=config.gp_tol_opt,
                          max_iter=config.gp_max_iter, x0=built.expansion)
        if sol.status == "infeasible-detected" or not sol.values:
            if t2 == 1:
                raise StepInfeasibleError(
                    "power subproblem infeasible at the first iteration")
            trace.log(f"outer {outer}: power GP infeasible at inner {t2}")
            break
        if sol.objective_value > prev_obj + _objective_slack(prev_obj):
            trace.log(f"outer {outer}: power objective stopped improving at "
                      f"inner {t2}, iterate discarded")
            break
        p_new = step2_values_to_powers(scen, fixed_assoc, sol.values)
        change = float(np.max(np.abs(p_new - p_cur)))
        trace.rows.append(TraceRow(outer, "power", t2, sol.objective_value,
                                   change, sol.status))
        p_cur = p_new
        prev_obj = sol.objective_value
        if change <= config.eps4:
            break
    return p_cur, trace


# ---------------------------------------------------------------------------
# rounding / repair / consolidation
# ---------------------------------------------------------------------------

def round_allocation(alpha, beta, y):
    """Integer projection of a relaxed association state.

    Each user goes to its largest-mass RRH (ties to the lowest index, via
    argmax), an RRH is on exactly when it serves someone, and each active
    RRH keeps its largest-mass BBU. Powers are not touched here.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    r_cnt, n_cnt = alpha.shape
    a_int = np.zeros_like(alpha)
    a_int[alpha.argmax(axis=0), np.arange(n_cnt)] = 1.0
    y_int = (a_int.sum(axis=1) > 0).astype(float)
    b_int = np.zeros_like(beta)
    for r in range(r_cnt):
        if y_int[r] > 0:
            b_int[r, int(beta[r].argmax())] = 1.0
    return a_int, b_int, y_int


def _fit_bbus(scenario, alloc: Allocation) -> Allocation:
    """Deterministic greedy fronthaul refit: active RRHs in decreasing order
    of target load, each to the BBU with the most remaining headroom
    (measured in required-rate units)."""
    cfg = scenario.config
    target_load = np.array([
        float(scenario.rate_req[alloc.alpha[r] > 0.5].sum())
        for r in range(cfg.num_rrhs)])
    beta = np.zeros_like(alloc.beta)
    room = scenario.bbu_capacity.astype(float).copy()
    order = sorted(np.flatnonzero(alloc.y > 0.5),
                   key=lambda r: (-target_load[r], r))
    for r in order:
        b = int(np.argmax(room))
        beta[r, b] = 1.0
        room[b] -= target_load[r]
    return Allocation(alloc.alpha, beta, alloc.y, alloc.p)


def _solve_powers_robust(scenario, fixed, p_init, config, trace, outer,
                         rate_targets=None):
    """Step-2 solve with deterministic fallbacks.

    The load cap freezes interference at the starting powers, so starting
    from powers far below the subproblem's own operating point (e.g. after a
    trim) can make the first build spuriously infeasible; retrying from the
    interference-aware fixed point restores self-consistency. A
    capacity-aware fronthaul refit handles bad BBU roundings the same way.
    """
    targets = scenario.rate_req if rate_targets is None else rate_targets
    fp = _interference_aware_powers(scenario, fixed.alpha, targets)
    attempts = [(fixed, p_init), (fixed, fp)]
    refit = _fit_bbus(scenario, fixed)
    if not np.array_equal(refit.beta, fixed.beta):
        attempts += [(refit, p_init), (refit, fp)]
    last = None
    for k, (assoc, p0) in enumerate(attempts):
        try:
            p_new, _ = step2_solve(scenario, assoc, Step2Iterate(p0), config,
                                   trace, outer, rate_targets=rate_targets)
            if k > 0:
                trace.log(f"outer {outer}: power subproblem needed fallback "
                          f"start #{k}")
            return assoc, p_new
        except StepInfeasibleError as exc:
            last = exc
    raise last


def _trim_powers(scenario, alloc: Allocation, targets, rounds=60):
    """Rescale served powers so the exact rates meet the per-user targets
    with as little transmit power as possible. A standard-interference
    fixed point: monotone and convergent whenever the targets are jointly
    supportable; rows that would exceed the RRH budget are scaled back."""
    cfg = scenario.config
    p = alloc.p.copy()
    served = alloc.alpha > 0.5
    if not served.any():
        return p
    goal = np.asarray(targets, dtype=float)
    for _ in range(rounds):
        work = alloc.replace_p(p)
        rates = exact_rate_matrix(work, scenario)
        ratio = np.ones_like(p)
        mask = served & (p > 0)
        with np.errstate(divide="ignore", over="ignore"):
            want = np.broadcast_to(2.0 ** goal[None, :] - 1.0, p.shape)
            have = 2.0 ** rates - 1.0
            ratio[mask] = want[mask] / have[mask]
        ratio[~np.isfinite(ratio)] = 1.0
        p_new = p * ratio
        rowsum = p_new.sum(axis=1)
        over = rowsum > cfg.p_max
        if over.any():
            p_new[over] *= (cfg.p_max / rowsum[over])[:, None] * (1 - 1e-12)
        if np.max(np.abs(p_new - p)) <= 1e-15 * (1.0 + p.max()):
            p = p_new
            break
        p = p_new
    return p


def _bbu_loads(scenario, alloc):
    rates = exact_rate_matrix(alloc, scenario)
    contrib = (alloc.alpha * rates)
    return np.array([float((alloc.beta[:, b][:, None] * contrib).sum())
                     for b in range(scenario.config.num_bbus)])


def repair_feasibility(scenario, allocation: Allocation,
                       config: SolverConfig | None = None,
                       trace: SolveTrace | None = None) -> Allocation:
    """Drive an integer allocation to exact-model feasibility.

    Moves, tried in rounds (at most R + N): rescale powers to the exact
    rate targets; move the least-loaded RRH off an overloaded BBU to the
    one with most slack; re-solve powers with an inflated rate target;
    activate the best switched-off RRH for the worst user. Raises
    CertifiedInfeasibleError when the moves are exhausted.
    """
    config = config or SolverConfig()
    trace = trace if trace is not None else SolveTrace()
    cfg = scenario.config
    if validate_solution(scenario, allocation).ok:
        return allocation

    alloc = allocation
    targets = scenario.rate_req * (1.0 + config.margin)
    trimmed = False
    inflations = 0
    budget = cfg.num_rrhs + cfg.num_users
    for _ in range(budget):
        report = validate_solution(scenario, alloc)
        if report.ok:
            return alloc

        if not trimmed:
            alloc = alloc.replace_p(_trim_powers(scenario, alloc, targets,
                                                 config.trim_rounds))
            trimmed = True
            trace.log("repair: rescaled powers to exact-rate targets")
            continue

        if not report.family_ok("bbu_load_capacity"):
            loads = _bbu_loads(scenario, alloc)
            slack = scenario.bbu_capacity - loads
            b_bad = int(np.argmin(slack))
            rrhs_on_b = [r for r in range(cfg.num_rrhs)
                         if alloc.beta[r, b_bad] > 0.5]
            if rrhs_on_b and cfg.num_bbus > 1:
                rates = exact_rate_matrix(alloc, scenario)
                per_rrh = (alloc.alpha * rates).sum(axis=1)
                r_move = min(rrhs_on_b, key=lambda r: (per_rrh[r], r))
                b_to = int(np.argmax(np.where(np.arange(cfg.num_bbus) == b_bad,
                                              -np.inf, slack)))
                beta = alloc.beta.copy()
                beta[r_move] = 0.0
                beta[r_move, b_to] = 1.0
                alloc = Allocation(alloc.alpha, beta, alloc.y, alloc.p)
                trace.log(f"repair: moved RRH {r_move} to BBU {b_to}")
                continue
            raise CertifiedInfeasibleError(
                "BBU overload with no redistribution left")

        if not report.family_ok("user_min_rate"):
            if inflations < 6:
                inflations += 1
                targets = targets * (1.0 + config.margin)
                try:
                    alloc, p_new = _solve_powers_robust(
                        scenario, alloc, alloc.p, config, trace, 0,
                        rate_targets=targets)
                    alloc = alloc.replace_p(_trim_powers(
                        scenario, alloc.replace_p(p_new), targets,
                        config.trim_rounds))
                    trace.log(f"repair: re-solved powers at inflated targets "
                              f"(x{(1 + config.margin) ** inflations:.3f})")
                    continue
                except StepInfeasibleError:
                    trace.log("repair: inflated power subproblem infeasible")
            # activate the best off RRH for the worst-served user
            shortfall = np.array([c.slack for c in report.checks["user_min_rate"]])
            n_bad = int(np.argmax(shortfall))
            off = np.flatnonzero(alloc.y < 0.5)
            if off.size == 0:
                raise CertifiedInfeasibleError(
                    "rate shortfall with every RRH already active")
            r_new = off[int(np.argmax(scenario.channel[off, n_bad]))]
            alpha = alloc.alpha.copy()
            alpha[:, n_bad] = 0.0
            alpha[r_new, n_bad] = 1.0
            y = alloc.y.copy()
            y[r_new] = 1.0
            beta = alloc.beta.copy()
            loads = _bbu_loads(scenario, alloc)
            beta[r_new] = 0.0
            beta[r_new, int(np.argmax(scenario.bbu_capacity - loads))] = 1.0
            alloc = Allocation(alpha, beta, y, alloc.p)
            try:
                alloc, p_new = _solve_powers_robust(
                    scenario, alloc, alloc.p, config, trace, 0,
                    rate_targets=targets)
            except StepInfeasibleError as exc:
                raise CertifiedInfeasibleError(
                    f"activation of RRH {r_new} did not restore feasibility") from exc
            alloc = alloc.replace_p(_trim_powers(scenario,
                                                 alloc.replace_p(p_new),
                                                 targets, config.trim_rounds))
            trace.log(f"repair: activated RRH {r_new} for user {n_bad}")
            continue

        if not report.family_ok("rrh_power_budget"):
            p = alloc.p.copy()
            rowsum = p.sum(axis=1)
            over = rowsum > cfg.p_max
            p[over] *= (cfg.p_max / rowsum[over])[:, None] * (1 - 1e-12)
            alloc = alloc.replace_p(p)
            trimmed = True
            trace.log("repair: clipped an over-budget RRH power row")
            continue

        raise CertifiedInfeasibleError(
            f"structural constraint violation: {sorted(report.violations())}")

    raise CertifiedInfeasibleError("repair budget exhausted")


def _consolidate(scenario, alloc: Allocation, config: SolverConfig,
                 trace: SolveTrace) -> Allocation:
    """Greedy best-improvement switch-off of active RRHs.

    The relaxed on-off variables price antennas linearly in association
    mass, so they never see the fixed saving of an integer switch-off; this
    pass realizes it, accepting only candidates that survive the full
    power-resolve + repair pipeline with a strictly lower cost.
    """
    cfg = scenario.config
    best = alloc
    best_util = utility(alloc, scenario)
    improved = True
    while improved and best.y.sum() > 1:
        improved = False
        active = [r for r in range(cfg.num_rrhs) if best.y[r] > 0.5]
        order = sorted(active, key=lambda r: (best.alpha[r].sum(), r))
        candidates = []
        for r_off in order:
            rest = [r for r in active if r != r_off]
            gains = scenario.channel[rest]
            alpha = best.alpha.copy()
            moved = np.flatnonzero(best.alpha[r_off] > 0.5)
            alpha[r_off] = 0.0
            for n in moved:
                alpha[rest[int(np.argmax(gains[:, n]))], n] = 1.0
            y = best.y.copy()
            y[r_off] = 0.0
            beta = best.beta.copy()
            beta[r_off] = 0.0
            if np.any(alpha.sum(axis=1) > scenario.antennas):
                continue
            cand = Allocation(alpha, beta, y, best.p)
            try:
                cand, p_new = _solve_powers_robust(
                    scenario, cand, cand.p, config, SolveTrace(), 0)
                cand = repair_feasibility(scenario, cand.replace_p(p_new),
                                          config, SolveTrace())
            except (StepInfeasibleError, CertifiedInfeasibleError):
                continue
            cand_util = utility(cand, scenario)
            if cand_util < best_util * (1 - 1e-12):
                candidates.append((cand_util, r_off, cand))
        if candidates:
            cand_util, r_off, cand = min(candidates, key=lambda t: (t[0], t[1]))
            trace.log(f"consolidation: switched off RRH {r_off} "
                      f"(utility {best_util:.6g} -> {cand_util:.6g})")
            best, best_util = cand, cand_util
            improved = True
    return best


# ---------------------------------------------------------------------------
# outer loop
# ---------------------------------------------------------------------------

def outer_solve(scenario: Scenario, config: SolverConfig | None = None) -> Solution:
    """Full pipeline: alternate the two subproblems to convergence, project
    to integers, repair against the exact rate model, consolidate the active
    set, and validate. Deterministic for fixed inputs."""
    config = config or SolverConfig()
    trace = SolveTrace()
    iterate, p_cur, assoc0 = _initial_state(scenario, config)
    cfg = scenario.config

    # integer fallback state: the warm-start association with its powers
    _, b0_int, y0_int = round_allocation(iterate.alpha, iterate.beta, iterate.y)
    fixed = Allocation(assoc0, b0_int, np.ones(cfg.num_rrhs), p_cur)

    alpha_prev, beta_prev, y_prev = iterate.alpha, iterate.beta, iterate.y
    p_prev = p_cur
    for outer in range(1, config.max_outer_iter + 1):
        iterate, _ = step1_solve(scenario, p_cur, iterate, config, trace, outer)
        a_int, b_int, y_int = round_allocation(iterate.alpha, iterate.beta,
                                               iterate.y)
        candidate = Allocation(a_int, b_int, y_int, p_cur)
        try:
            candidate, p_new = _solve_powers_robust(
                scenario, candidate, p_cur, config, trace, outer)
        except StepInfeasibleError:
            trace.log(f"outer {outer}: rounded association rejected "
                      "(power subproblem infeasible), keeping previous")
            break
        fixed = candidate
        p_cur = p_new
        crit = {
            "d_alpha": float(np.max(np.abs(iterate.alpha - alpha_prev))),
            "d_beta": float(np.max(np.abs(iterate.beta - beta_prev))),
            "d_y": float(np.max(np.abs(iterate.y - y_prev))),
            "d_p": float(np.max(np.abs(p_cur - p_prev))),
        }
        crit["converged"] = (crit["d_alpha"] <= config.eps1
                             and crit["d_beta"] <= config.eps2
                             and crit["d_y"] <= config.eps3
                             and crit["d_p"] <= config.eps4)
        trace.outer_criteria.append(crit)
        alpha_prev, beta_prev, y_prev = iterate.alpha, iterate.beta, iterate.y
        p_prev = p_cur
        if crit["converged"]:
            break

    alloc = Allocation(fixed.alpha, fixed.beta, fixed.y, p_cur)
    alloc = repair_feasibility(scenario, alloc, config, trace)
    if config.consolidate:
        alloc = _consolidate(scenario, alloc, config, trace)

    report = validate_solution(scenario, alloc)
    assert report.ok, "returned allocation failed exact-model validation"
    rates = (alloc.alpha * exact_rate_matrix(alloc, scenario)).sum(axis=0)
    return Solution(alloc, utility(alloc, scenario), rates, report, trace)
