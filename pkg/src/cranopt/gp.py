"""Monomial/posynomial algebra and a solver for GP standard-form programs.

A geometric program is stored symbolically (positive-coefficient power-law
terms over named positive variables) and solved after the usual change of
variables x = exp(v), under which posynomials become log-sum-exp functions
and monomials become affine. The solver is a plain two-phase log-barrier
method: phase 1 minimizes the maximum constraint violation to find a strictly
feasible point (or certify that none exists inside the bounds), phase 2
follows the central path with damped Newton steps. Everything is
deterministic: identical programs produce identical solutions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import InvariantViolationError

__all__ = [
    "Monomial",
    "Posynomial",
    "GpProgram",
    "GpSolution",
    "LogProgram",
    "agma_monomialize",
    "log_transform",
    "solve",
    "gp_to_json",
    "gp_from_json",
]


# ---------------------------------------------------------------------------
# symbolic layer
# ---------------------------------------------------------------------------

def _clean_exponents(exponents):
    return {v: float(e) for v, e in sorted(exponents.items()) if e != 0.0}


@dataclass(frozen=True)
class Monomial:
    """c * prod(x_v ** a_v) with c > 0. Zero exponents are not stored."""

    coef: float
    exponents: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.coef > 0.0) or not math.isfinite(self.coef):
            raise InvariantViolationError(
                f"monomial coefficient must be positive and finite, got {self.coef}")
        object.__setattr__(self, "exponents", _clean_exponents(self.exponents))

    def value(self, point):
        out = math.log(self.coef)
        for v, a in self.exponents.items():
            x = point[v]
            if not x > 0.0:
                raise ValueError(f"variable {v!r} must be assigned a positive value")
            out += a * math.log(x)
        return math.exp(out)

    def variables(self):
        return set(self.exponents)

    def times(self, other: "Monomial") -> "Monomial":
        exps = dict(self.exponents)
        for v, a in other.exponents.items():
            exps[v] = exps.get(v, 0.0) + a
        return Monomial(self.coef * other.coef, exps)

    def power(self, p: float) -> "Monomial":
        return Monomial(self.coef ** p, {v: a * p for v, a in self.exponents.items()})

    def inverse(self) -> "Monomial":
        return self.power(-1.0)


@dataclass(frozen=True)
class Posynomial:
    """Nonempty sum of monomials."""

    terms: tuple = ()

    def __post_init__(self):
        if isinstance(self.terms, Monomial):
            object.__setattr__(self, "terms", (self.terms,))
        else:
            object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise InvariantViolationError("posynomial needs at least one term")
        for t in self.terms:
            if not isinstance(t, Monomial):
                raise InvariantViolationError("posynomial terms must be monomials")

    def value(self, point):
        return float(sum(t.value(point) for t in self.terms))

    def variables(self):
        out = set()
        for t in self.terms:
            out |= t.variables()
        return out

    def times_monomial(self, m: Monomial) -> "Posynomial":
        return Posynomial(tuple(t.times(m) for t in self.terms))


def eval_posynomial(p: Posynomial | Monomial, point) -> float:
    """Evaluate a posynomial (or bare monomial) at a positive assignment."""
    if isinstance(p, Monomial):
        p = Posynomial((p,))
    missing = p.variables() - set(point)
    if missing:
        raise ValueError(f"missing assignment for variables {sorted(missing)}")
    return p.value(point)


def agma_monomialize(g: Posynomial, x0) -> tuple[Monomial, np.ndarray]:
    """Best monomial lower bound of a posynomial around x0.

    The weights are each term's share of g(x0); the returned monomial
    prod((u_i/w_i)**w_i) equals g at x0 and never exceeds g elsewhere
    (weighted AM-GM). Single-term posynomials come back unchanged.
    """
    vals = np.array([t.value(x0) for t in g.terms])
    total = vals.sum()
    if not total > 0.0:
        raise ValueError("posynomial must be positive at the expansion point")
    w = vals / total
    log_coef = 0.0
    exps: dict = {}
    for t, wi in zip(g.terms, w):
        if wi <= 0.0:
            continue
        log_coef += wi * (math.log(t.coef) - math.log(wi))
        for v, a in t.exponents.items():
            exps[v] = exps.get(v, 0.0) + wi * a
    return Monomial(math.exp(log_coef), exps), w


# ---------------------------------------------------------------------------
# programs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GpProgram:
    """min objective s.t. each inequality <= 1, each equality == 1,
    lo <= x <= hi elementwise (all variables bounded, bounds positive)."""

    objective: Posynomial
    inequalities: tuple = ()
    equalities: tuple = ()
    bounds: dict = field(default_factory=dict)
    names: tuple = ()  # optional per-inequality labels, for diagnostics

    def __post_init__(self):
        object.__setattr__(self, "inequalities", tuple(self.inequalities))
        object.__setattr__(self, "equalities", tuple(self.equalities))
        used = self.objective.variables()
        for c in self.inequalities:
            used |= c.variables()
        for m in self.equalities:
            used |= m.variables()
        for v in sorted(used):
            if v not in self.bounds:
                raise InvariantViolationError(f"variable {v!r} has no bounds entry")
        for v, (lo, hi) in self.bounds.items():
            if not lo > 0.0:
                raise InvariantViolationError(f"lower bound of {v!r} must be positive")
        if self.names and len(self.names) != len(self.inequalities):
            raise InvariantViolationError("names must match inequalities one-to-one")

    def variables(self):
        return tuple(sorted(self.bounds))


@dataclass(frozen=True)
class GpSolution:
    values: dict
    objective_value: float
    status: str  # "optimal" | "max-iterations" | "infeasible-detected"
    feasibility_residual: float
    stationarity_residual: float
    duality_gap: float = float("nan")
    newton_iterations: int = 0


# ---------------------------------------------------------------------------
# log-domain transform
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogFunction:
    """f(v) = logsumexp(A v + b) + c.v + d; affine when A has no rows."""

    A: object  # csr_matrix, shape (nterms, nvar); nterms may be 0
    b: np.ndarray
    c: np.ndarray
    d: float

    def value(self, v):
        v = np.asarray(v, dtype=float)
        out = float(self.c @ v) + self.d
        if self.A.shape[0]:
            z = self.A @ v + self.b
            zmax = z.max()
            out += zmax + math.log(np.exp(z - zmax).sum())
        return out


@dataclass(frozen=True)
class LogProgram:
    variables: tuple
    objective: LogFunction
    inequalities: tuple  # each LogFunction, constraint f(v) <= 0
    equalities: tuple    # each (a, c0): a.v + c0 == 0
    lower: np.ndarray    # log of original lower bounds
    upper: np.ndarray


def _compile_function(posy: Posynomial, index: dict, fixed: dict) -> LogFunction:
    """Compile a posynomial into log-sum-exp-plus-affine form.

    Exponents shared by every term are split off into the affine part, which
    keeps the A rows sparse even after a constraint has been multiplied
    through by a monomial. Variables in `fixed` are substituted out.
    """
    n = len(index)
    rows = []
    logs = []
    for t in posy.terms:
        lc = math.log(t.coef)
        row = {}
        for vname, a in t.exponents.items():
            if vname in fixed:
                lc += a * math.log(fixed[vname])
            else:
                row[index[vname]] = a
        rows.append(row)
        logs.append(lc)
    # common affine part: per-variable min exponent across all terms
    common = {}
    first = rows[0]
    for j, a in first.items():
        m = a
        ok = True
        for row in rows[1:]:
            rj = row.get(j, 0.0)
            if rj == 0.0 and a > 0:
                m = min(m, 0.0)
            m = min(m, rj)
        if m != 0.0:
            common[j] = m
    c = np.zeros(n)
    for j, m in common.items():
        c[j] = m
    if len(rows) == 1:
        # fully affine
        for j, a in rows[0].items():
            c[j] = a
        return LogFunction(sp.csr_matrix((0, n)), np.zeros(0), c, logs[0])
    data, ri, ci = [], [], []
    for i, row in enumerate(rows):
        for j, a in row.items():
            a -= common.get(j, 0.0)
            if a != 0.0:
                data.append(a)
                ri.append(i)
                ci.append(j)
        # common vars absent from this row still need the -common entry
        for j, m in common.items():
            if j not in row:
                data.append(-m)
                ri.append(i)
                ci.append(j)
    A = sp.csr_matrix((data, (ri, ci)), shape=(len(rows), n))
    return LogFunction(A, np.array(logs), c, 0.0)


def log_transform(gp: GpProgram) -> LogProgram:
    """Exact convex reformulation under x = exp(v).

    Posynomial objective/inequalities become log-sum-exp functions (<= 0 for
    the former <= 1 constraints), monomial equalities become affine
    equalities, bounds become a box in v. No approximation is involved.
    """
    variables = gp.variables()
    index = {v: j for j, v in enumerate(variables)}
    obj = _compile_function(gp.objective, index, {})
    ineqs = tuple(_compile_function(c, index, {}) for c in gp.inequalities)
    eqs = []
    for m in gp.equalities:
        f = _compile_function(Posynomial((m,)), index, {})
        eqs.append((f.c, f.d))
    lower = np.array([math.log(gp.bounds[v][0]) for v in variables])
    upper = np.array([math.log(gp.bounds[v][1]) for v in variables])
    return LogProgram(variables, obj, ineqs, tuple(eqs), lower, upper)


# ---------------------------------------------------------------------------
# barrier solver
# ---------------------------------------------------------------------------

class _Stack:
    """All inequality LSE terms stacked into one sparse matrix for fast
    batched evaluation; per-row constraint ids drive segment reductions."""

    def __init__(self, fns, n):
        self.m = len(fns)
        self.n = n
        blocks, bs, owner = [], [], []
        self.C = np.zeros((self.m, n))
        self.dvec = np.zeros(self.m)
        for i, f in enumerate(fns):
            self.C[i] = f.c
            self.dvec[i] = f.d
            if f.A.shape[0]:
                blocks.append(f.A)
                bs.append(f.b)
                owner.append(np.full(f.A.shape[0], i))
        if blocks:
            self.A = sp.vstack(blocks, format="csr")
            self.b = np.concatenate(bs)
            self.owner = np.concatenate(owner)
        else:
            self.A = sp.csr_matrix((0, n))
            self.b = np.zeros(0)
            self.owner = np.zeros(0, dtype=int)
        self.nrows = self.A.shape[0]
        # selector matrix mapping rows -> constraints
        if self.nrows:
            self.sel = sp.csr_matrix(
                (np.ones(self.nrows), (self.owner, np.arange(self.nrows))),
                shape=(self.m, self.nrows))
            # segment boundaries (rows are grouped by construction)
            change = np.flatnonzero(np.diff(self.owner)) + 1
            self.seg_starts = np.concatenate(([0], change))
            self.seg_owner = self.owner[self.seg_starts]
        else:
            self.sel = sp.csr_matrix((self.m, 0))
            self.seg_starts = np.zeros(0, dtype=int)
            self.seg_owner = np.zeros(0, dtype=int)

    def values_weights(self, v):
        """Constraint values f(v) and softmax row weights."""
        f = self.C @ v + self.dvec
        w = np.zeros(self.nrows)
        if self.nrows:
            z = self.A @ v + self.b
            zmax = np.maximum.reduceat(z, self.seg_starts)
            ez = np.exp(z - zmax[self.owner_seg_expand()])
            sums = np.add.reduceat(ez, self.seg_starts)
            w = ez / sums[self.owner_seg_expand()]
            lse = zmax + np.log(sums)
            f = f.copy()
            f[self.seg_owner] += lse
        return f, w

    def owner_seg_expand(self):
        # maps each row to its position in the reduceat outputs
        if not hasattr(self, "_ose"):
            ose = np.zeros(self.nrows, dtype=int)
            if self.nrows:
                ose[self.seg_starts] = 1
                ose[0] = 0
                ose = np.cumsum(ose)
            self._ose = ose
        return self._ose

    def gradients(self, w):
        """Per-constraint full gradients (m x n dense)."""
        G = self.C.copy()
        if self.nrows:
            WA = self.A.multiply(w[:, None])
            G += np.asarray((self.sel @ WA).todense())
        return G

    def hessian_lse(self, w, coef_per_cons):
        """sum_i coef_i * (A_i' W_i A_i) as a dense matrix. The subtracted
        g g' rank-one parts are handled by the caller via gradients()."""
        if not self.nrows:
            return np.zeros((self.n, self.n))
        scale = coef_per_cons[self.owner] * w
        M = (self.A.multiply(scale[:, None])).T @ self.A
        return np.asarray(M.todense())


def _project_onto_equalities(v, E, e0):
    if E is None or not len(E):
        return v
    r = E @ v + e0
    # least-norm correction
    dv, *_ = np.linalg.lstsq(E, -r, rcond=None)
    return v + dv


def _newton(stack, obj_stack, box_lo, box_hi, E, e0, v, t, obj_weight,
            max_steps, newton_tol=1e-11):
    """Damped Newton for min obj_weight*f0(v) + barrier(v) s.t. Ev+e0=0.

    Returns (v, steps, converged). obj_weight is t for phase-2 centering and
    the barrier includes LSE inequality constraints plus box terms.
    """
    n = len(v)
    neq = 0 if E is None else len(E)
    steps = 0

    def barrier_state(vv):
        f, w = stack.values_weights(vv)
        slo = vv - box_lo
        shi = box_hi - vv
        ok = (f < 0).all() and (slo > 0).all() and (shi > 0).all()
        return f, w, slo, shi, ok

    def merit(vv, f0val, f, slo, shi):
        return (obj_weight * f0val - np.log(-f).sum()
                - np.log(slo).sum() - np.log(shi).sum())

    for _ in range(max_steps):
        f, w, slo, shi, ok = barrier_state(v)
        if not ok:
            raise FloatingPointError("barrier iterate left the domain")
        f0, w0 = obj_stack.values_weights(v)
        f0val = f0[0]
        G0 = obj_stack.gradients(w0)[0]

        theta = 1.0 / (-f)
        G = stack.gradients(w)                      # m x n
        Glse = G - stack.C                           # LSE parts only
        grad = obj_weight * G0 + G.T @ theta
        grad += -1.0 / slo + 1.0 / shi

        H = stack.hessian_lse(w, theta)
        H -= Glse.T @ (Glse * theta[:, None])
        H += G.T @ (G * (theta ** 2)[:, None])
        # objective curvature
        H0 = obj_stack.hessian_lse(w0, np.array([1.0]))
        G0l = (obj_stack.gradients(w0) - obj_stack.C)[0]
        H += obj_weight * (H0 - np.outer(G0l, G0l))
        diag = 1.0 / slo ** 2 + 1.0 / shi ** 2
        H[np.diag_indices_from(H)] += diag

        if neq:
            K = np.zeros((n + neq, n + neq))
            K[:n, :n] = H
            K[:n, n:] = E.T
            K[n:, :n] = E
            rhs = np.concatenate([-grad, np.zeros(neq)])
            try:
                sol = np.linalg.solve(K, rhs)
            except np.linalg.LinAlgError:
                K[:n, :n] += 1e-10 * np.eye(n)
                sol = np.linalg.solve(K, rhs)
            dv = sol[:n]
        else:
            try:
                dv = np.linalg.solve(H, -grad)
            except np.linalg.LinAlgError:
                H[np.diag_indices_from(H)] += 1e-10
                dv = np.linalg.solve(H, -grad)

        lam2 = float(-grad @ dv)
        steps += 1
        if lam2 / 2.0 <= newton_tol:
            return v, steps, True

        # backtracking: stay in the domain, then Armijo
        m0 = merit(v, f0val, f, slo, shi)
        step = 1.0
        for _bt in range(70):
            vn = v + step * dv
            fn, wn, slon, shin, okn = barrier_state(vn)
            if okn:
                f0n, _ = obj_stack.values_weights(vn)
                if merit(vn, f0n[0], fn, slon, shin) <= m0 - 0.25 * step * lam2:
                    break
            step *= 0.5
        else:
            return v, steps, True  # no progress possible at float precision
        v = vn
    return v, steps, False


def _solve_compiled(variables, obj, ineqs, eqs, lower, upper, x0, gap_tol,
                    max_iter):
    """Two-phase barrier on compiled log-domain data.

    Returns (v or None, status_hint, newton_count, gap)."""
    n = len(variables)
    E = np.array([a for a, _ in eqs]) if eqs else None
    e0 = np.array([c for _, c in eqs]) if eqs else None

    stack = _Stack(ineqs, n)
    obj_stack = _Stack([obj], n)

    # initial point
    if x0 is not None:
        v = np.clip(x0, lower + 1e-9, upper - 1e-9)
        mid = 0.5 * (lower + upper)
        v = np.where(upper - lower < 2.5e-9, mid, v)
    else:
        v = 0.5 * (lower + upper)
    v = _project_onto_equalities(v, E, e0)

    newton_count = 0
    f, _ = stack.values_weights(v)
    inside_box = (v > lower).all() and (v < upper).all()
    strictly_ok = inside_box and (len(f) == 0 or (f < -1e-9).all())

    if not strictly_ok:
        # phase 1: min s  s.t. f_i(v) <= s, lo - v <= s, v - hi <= s
        fns1 = []
        for g in ineqs:
            fns1.append(LogFunction(
                sp.hstack([g.A, sp.csr_matrix((g.A.shape[0], 1))], format="csr"),
                g.b, np.concatenate([g.c, [-1.0]]), g.d))
        for j in range(n):
            clo = np.zeros(n + 1)
            clo[j] = -1.0
            clo[n] = -1.0
            fns1.append(LogFunction(sp.csr_matrix((0, n + 1)), np.zeros(0),
                                    clo, lower[j]))
            chi = np.zeros(n + 1)
            chi[j] = 1.0
            chi[n] = -1.0
            fns1.append(LogFunction(sp.csr_matrix((0, n + 1)), np.zeros(0),
                                    chi, -upper[j]))
        viol = max(float(f.max(initial=-np.inf)),
                   float((lower - v).max()), float((v - upper).max()))
        s0 = viol + max(1.0, 0.1 * abs(viol))
        v1 = np.concatenate([v, [s0]])
        span = float((upper - lower).max(initial=1.0))
        box1_lo = np.concatenate([lower - span - 10.0, [-(span + 100.0)]])
        box1_hi = np.concatenate([upper + span + 10.0, [s0 + 10.0]])
        E1 = None if E is None else np.hstack([E, np.zeros((len(E), 1))])
        obj1 = _Stack([LogFunction(sp.csr_matrix((0, n + 1)), np.zeros(0),
                                   np.eye(n + 1)[n], 0.0)], n + 1)
        stack1 = _Stack(fns1, n + 1)
        m1 = stack1.m
        t = 1.0
        certified = False
        while newton_count < max_iter:
            v1, used, _ = _newton(stack1, obj1, box1_lo, box1_hi, E1, e0, v1,
                                  t, t, max_steps=60)
            newton_count += used
            s = v1[n]
            if s < -1e-7:
                break  # strictly feasible point found
            if m1 / t < 1e-9:
                # converged phase 1 with s* > 0 (up to gap): no feasible point
                certified = s - m1 / t > 0.0
                break
            t *= 30.0
        s = v1[n]
        if s >= -1e-7:
            return None, ("infeasible-detected" if certified or s > 1e-7
                          else "max-iterations"), newton_count, float("nan")
        v = v1[:n]

    # phase 2
    m_total = stack.m + 2 * n
    constant_obj = obj.A.shape[0] == 0 and not obj.c.any()
    t = 1.0
    gap = m_total / t
    while newton_count < max_iter:
        v, used, _ = _newton(stack, obj_stack, lower, upper, E, e0, v, t, t,
                             max_steps=60)
        newton_count += used
        gap = m_total / t
        if constant_obj or gap <= gap_tol:
            break
        t *= 30.0
    status_hint = "optimal" if (gap <= gap_tol or constant_obj) else "max-iterations"
    return v, status_hint, newton_count, gap


def solve(gp: GpProgram, tol_feas: float = 1e-8, tol_opt: float = 1e-6,
          max_iter: int = 20000, x0: dict | None = None) -> GpSolution:
    """Solve a GP to the stated residual tolerances.

    x0 optionally warm-starts the barrier with a positive assignment (it does
    not need to be feasible). Deterministic for identical inputs.
    """
    if not (tol_feas > 0 and tol_opt > 0):
        raise ValueError("tolerances must be positive")
    variables = gp.variables()
    for vname, (lo, hi) in gp.bounds.items():
        if lo > hi:
            return GpSolution({}, float("nan"), "infeasible-detected",
                              float("inf"), float("inf"))

    fixed = {v: gp.bounds[v][0] for v in variables
             if gp.bounds[v][1] <= gp.bounds[v][0]}
    free = tuple(v for v in variables if v not in fixed)
    index = {v: j for j, v in enumerate(free)}

    obj = _compile_function(gp.objective, index, fixed)
    ineqs = [_compile_function(c, index, fixed) for c in gp.inequalities]
    eqs = []
    for m in gp.equalities:
        f = _compile_function(Posynomial((m,)), index, fixed)
        eqs.append((f.c, f.d))

    def build_values(vvec):
        out = dict(fixed)
        for vname, j in index.items():
            out[vname] = math.exp(vvec[j])
        return out

    def residuals(vvec):
        feas = 0.0
        for fn in ineqs:
            feas = max(feas, math.expm1(fn.value(vvec)))
        for a, c0 in eqs:
            feas = max(feas, abs(math.expm1(float(a @ vvec) + c0)))
        return max(feas, 0.0)

    if not free:
        values = dict(fixed)
        feas = residuals(np.zeros(0))
        status = "optimal" if feas <= tol_feas else "infeasible-detected"
        return GpSolution(values, gp.objective.value(values), status, feas, 0.0)

    lower = np.array([math.log(gp.bounds[v][0]) for v in free])
    upper = np.array([math.log(gp.bounds[v][1]) for v in free])
    x0vec = None
    if x0 is not None:
        x0vec = np.array([math.log(max(x0.get(v, math.exp(
            0.5 * (lower[j] + upper[j]))), 1e-300)) for j, v in enumerate(free)])

    gap_tol = min(tol_opt, 1e-7)
    v, hint, newton_count, gap = _solve_compiled(
        free, obj, ineqs, eqs, lower, upper, x0vec, gap_tol, max_iter)
    if v is None:
        return GpSolution({}, float("nan"), hint, float("inf"), float("inf"),
                          newton_iterations=newton_count)

    values = build_values(v)
    feas = residuals(v)

    # stationarity of the log-domain program at the final central point
    stack = _Stack(ineqs, len(free))
    obj_stack = _Stack([obj], len(free))
    f, w = stack.values_weights(v)
    f0, w0 = obj_stack.values_weights(v)
    t_final = (stack.m + 2 * len(free)) / gap if gap and math.isfinite(gap) and gap > 0 else 1e12
    lam = 1.0 / (t_final * (-f)) if stack.m else np.zeros(0)
    G = stack.gradients(w)
    r = obj_stack.gradients(w0)[0]
    if stack.m:
        r = r + G.T @ lam
    slo = v - lower
    shi = upper - v
    r += -1.0 / (t_final * slo) + 1.0 / (t_final * shi)
    if eqs:
        E = np.array([a for a, _ in eqs])
        nu, *_ = np.linalg.lstsq(E.T, -r, rcond=None)
        r = r + E.T @ nu
    stat = float(np.abs(r).max())

    status = "optimal" if (hint == "optimal" and feas <= tol_feas
                           and stat <= tol_opt) else "max-iterations"
    return GpSolution(values, gp.objective.value(values), status, feas, stat,
                      duality_gap=gap, newton_iterations=newton_count)


# ---------------------------------------------------------------------------
# debug dump
# ---------------------------------------------------------------------------

def _mono_to_obj(m: Monomial):
    return {"coef": m.coef, "exponents": dict(m.exponents)}


def gp_to_json(gp: GpProgram, path):
    """Dump a program to a structured text file for offline inspection."""
    doc = {
        "objective": [_mono_to_obj(t) for t in gp.objective.terms],
        "inequalities": [[_mono_to_obj(t) for t in c.terms]
                         for c in gp.inequalities],
        "equalities": [_mono_to_obj(m) for m in gp.equalities],
        "bounds": {v: list(b) for v, b in sorted(gp.bounds.items())},
        "names": list(gp.names),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)


def gp_from_json(path) -> GpProgram:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)

    def mono(o):
        return Monomial(o["coef"], o["exponents"])

    return GpProgram(
        objective=Posynomial(tuple(mono(t) for t in doc["objective"])),
        inequalities=tuple(Posynomial(tuple(mono(t) for t in c))
                           for c in doc["inequalities"]),
        equalities=tuple(mono(m) for m in doc["equalities"]),
        bounds={v: (b[0], b[1]) for v, b in doc["bounds"].items()},
        names=tuple(doc.get("names", ())),
    )
