"""Max-SINR reference algorithm and an exhaustive oracle for tiny instances.

The reference scheme mirrors traditional operation: every RRH stays on, each
user attaches to the RRH with the best received SINR under an even power
split, and only the fronthaul assignment and the transmit powers are
optimized (with the same machinery the two-step solver uses). The oracle
enumerates every association, fronthaul assignment, and gridded power
combination, evaluating the exact rate model, and is the ground truth the
solver is judged against on small cases.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import gp as gpmod
from .errors import (CertifiedInfeasibleError, InstanceTooLargeError,
                     InvariantViolationError, StepInfeasibleError)
from .rates import Allocation, exact_rate_matrix, interference_matrix, utility
from .scenario import Scenario, validate_solution
from .solver import (SolveTrace, Solution, SolverConfig, TraceRow,
                     repair_feasibility, step2_solve)
from .subproblems import Step2Iterate, beta_var, build_bbu_assignment_gp

__all__ = [
    "PowerGrid",
    "max_sinr_association",
    "baseline_solve",
    "brute_force_oracle",
]

ENUMERATION_BUDGET = 10 ** 8


@dataclass(frozen=True)
class PowerGrid:
    """Strictly increasing power levels in [0, p_max], always including 0."""

    levels: tuple

    def __post_init__(self):
        lv = tuple(float(x) for x in self.levels)
        object.__setattr__(self, "levels", lv)
        if not lv:
            raise InvariantViolationError("power grid needs at least one level")
        if any(b <= a for a, b in zip(lv, lv[1:])):
            raise InvariantViolationError("grid levels must strictly increase")
        if lv[0] < 0:
            raise InvariantViolationError("grid levels must be nonnegative")
        if 0.0 not in lv:
            raise InvariantViolationError("grid must include the zero level")

    @staticmethod
    def default(p_max: float, levels: int = 6, p_min: float = 1e-9) -> "PowerGrid":
        return PowerGrid((0.0,) + tuple(np.geomspace(p_min, p_max, levels)))


def max_sinr_association(scenario: Scenario, p_ref) -> np.ndarray:
    """0/1 association matrix sending each user to its best-SINR RRH at the
    reference powers; ties break to the lowest RRH index."""
    p_ref = np.asarray(p_ref, dtype=float)
    if np.any(p_ref <= 0):
        raise ValueError("reference powers must be positive")
    i_mat = interference_matrix(p_ref, scenario.channel)
    sinr = p_ref * scenario.channel / (scenario.config.noise_power + i_mat)
    assoc = np.zeros_like(p_ref)
    assoc[sinr.argmax(axis=0), np.arange(scenario.config.num_users)] = 1.0
    return assoc


def baseline_solve(scenario: Scenario, config: SolverConfig | None = None) -> Solution:
    """Reference pipeline: fixed max-SINR association, all RRHs on,
    fronthaul assignment via the analytic-center restriction of the
    association subproblem, then the usual power subproblem and repair."""
    config = config or SolverConfig()
    cfg = scenario.config
    trace = SolveTrace()
    p_even = np.full((cfg.num_rrhs, cfg.num_users), cfg.p_max / cfg.num_users)
    alpha = max_sinr_association(scenario, p_even)
    y = np.ones(cfg.num_rrhs)

    from .solver import (_fit_bbus, _interference_aware_powers,
                         _solve_powers_robust)
    p_cur = _interference_aware_powers(scenario, alpha, scenario.rate_req)
    beta_relaxed = np.full((cfg.num_rrhs, cfg.num_bbus), 1.0 / cfg.num_bbus)
    fixed = _fit_bbus(scenario, Allocation(alpha, np.zeros_like(beta_relaxed),
                                           y, p_cur))

    beta_prev = beta_relaxed
    p_prev = p_cur
    for outer in range(1, config.max_outer_iter + 1):
        built = build_bbu_assignment_gp(scenario, alpha, y, beta_relaxed, p_cur)
        sol = gpmod.solve(built.gp, tol_feas=config.gp_tol_feas,
                          tol_opt=config.gp_tol_opt,
                          max_iter=config.gp_max_iter, x0=built.expansion)
        if sol.status == "infeasible-detected" or not sol.values:
            trace.log(f"outer {outer}: fronthaul assignment subproblem "
                      "infeasible, keeping previous assignment")
            break
        beta_relaxed = np.array(
            [[sol.values[beta_var(r, b)] for b in range(cfg.num_bbus)]
             for r in range(cfg.num_rrhs)])
        trace.rows.append(TraceRow(
            outer, "assoc", 1, sol.objective_value,
            float(np.max(np.abs(beta_relaxed - beta_prev))), sol.status))
        b_int = np.zeros_like(beta_relaxed)
        for r in range(cfg.num_rrhs):
            b_int[r, int(beta_relaxed[r].argmax())] = 1.0
        candidate = Allocation(alpha, b_int, y, p_cur)
        try:
            candidate, p_new = _solve_powers_robust(
                scenario, candidate, p_cur, config, trace, outer)
        except StepInfeasibleError:
            trace.log(f"outer {outer}: power subproblem infeasible for the "
                      "reference assignment, falling back to repair")
            break
        fixed, p_cur = candidate, p_new
        d_beta = float(np.max(np.abs(beta_relaxed - beta_prev)))
        d_p = float(np.max(np.abs(p_cur - p_prev)))
        trace.outer_criteria.append({"d_beta": d_beta, "d_p": d_p,
                                     "converged": d_beta <= config.eps2
                                     and d_p <= config.eps4})
        beta_prev, p_prev = beta_relaxed, p_cur
        if trace.outer_criteria[-1]["converged"]:
            break

    alloc = Allocation(fixed.alpha, fixed.beta, fixed.y, p_cur)
    alloc = repair_feasibility(scenario, alloc, config, trace)
    report = validate_solution(scenario, alloc)
    assert report.ok, "reference allocation failed exact-model validation"
    rates = (alloc.alpha * exact_rate_matrix(alloc, scenario)).sum(axis=0)
    return Solution(alloc, utility(alloc, scenario), rates, report, trace)


# ---------------------------------------------------------------------------
# exhaustive oracle
# ---------------------------------------------------------------------------

def _enumeration_size(r_cnt, n_cnt, b_cnt, levels):
    return (r_cnt ** n_cnt) * (b_cnt ** r_cnt) * (levels ** n_cnt)


def brute_force_oracle(scenario: Scenario, grid: PowerGrid | None = None) -> Solution:
    """Exhaustive minimum-utility search over servers, BBUs, and grid powers.

    Evaluates the exact rate model for every candidate; returns the cheapest
    feasible configuration (lexicographically first among ties, following
    enumeration order). Raises InstanceTooLargeError over budget and
    CertifiedInfeasibleError when nothing on the grid is feasible.
    """
    cfg = scenario.config
    grid = grid or PowerGrid.default(cfg.p_max)
    r_cnt, n_cnt, b_cnt = cfg.num_rrhs, cfg.num_users, cfg.num_bbus
    size = _enumeration_size(r_cnt, n_cnt, b_cnt, len(grid.levels))
    if size > ENUMERATION_BUDGET:
        raise InstanceTooLargeError(
            f"enumeration would need {size:.3g} > {ENUMERATION_BUDGET:.0e} evaluations")

    allow_unserved = bool(np.all(scenario.rate_req <= 0))
    server_choices = list(range(r_cnt)) + ([None] if allow_unserved else [])
    levels = [lv for lv in grid.levels]
    omega = cfg.resolved_omega

    best = None
    best_key = None
    for servers in itertools.product(server_choices, repeat=n_cnt):
        alpha = np.zeros((r_cnt, n_cnt))
        for n, r in enumerate(servers):
            if r is not None:
                alpha[r, n] = 1.0
        y = (alpha.sum(axis=1) > 0).astype(float)
        n_r = alpha.sum(axis=1)
        if np.any(n_r > omega * y) or np.any(n_r > scenario.antennas):
            continue
        antenna_cost = cfg.cost_per_antenna * float((y * scenario.antennas).sum())
        if best is not None and antenna_cost >= best_key[0]:
            continue  # powers only add cost
        served = [n for n, r in enumerate(servers) if r is not None]
        active = [int(r) for r in np.flatnonzero(y > 0.5)]
        bbu_options = [[None] + list(range(b_cnt)) for _ in active]

        for p_combo in itertools.product(levels, repeat=len(served)):
            p = np.zeros((r_cnt, n_cnt))
            for n, pw in zip(served, p_combo):
                p[servers[n], n] = pw
            if np.any(p.sum(axis=1) > cfg.p_max + 1e-12):
                continue
            total_power = float(p.sum())
            util = antenna_cost + total_power
            if best is not None and util >= best_key[0]:
                continue
            cand = Allocation(alpha, np.zeros((r_cnt, b_cnt)), y, p)
            rates = exact_rate_matrix(cand, scenario)
            user_rate = (alpha * rates).sum(axis=0)
            if np.any(user_rate + 1e-12 < scenario.rate_req):
                continue
            load_per_rrh = (alpha * rates).sum(axis=1)
            # find the lexicographically first feasible BBU assignment
            chosen = None
            for combo in itertools.product(*bbu_options) if active else [()]:
                loads = np.zeros(b_cnt)
                ok = True
                for r, b in zip(active, combo):
                    if b is not None:
                        loads[b] += load_per_rrh[r]
                if np.all(loads <= scenario.bbu_capacity + 1e-12):
                    chosen = combo
                    ok = True
                    break
            if chosen is None:
                continue
            beta = np.zeros((r_cnt, b_cnt))
            for r, b in zip(active, chosen):
                if b is not None:
                    beta[r, b] = 1.0
            key = (util, servers, p_combo)
            if best_key is None or key < best_key:
                best = Allocation(alpha, beta, y, p)
                best_key = key

    if best is None:
        raise CertifiedInfeasibleError("no grid configuration is feasible")
    report = validate_solution(scenario, best)
    assert report.ok, "oracle winner failed validation"
    rates = (best.alpha * exact_rate_matrix(best, scenario)).sum(axis=0)
    return Solution(best, utility(best, scenario), rates, report, SolveTrace())
