"""Builders for the convexified association and power subproblems.

Step 1 (association/fronthaul/on-off with powers frozen) is not a GP as
written: the user-rate and load constraints mix signs once the shared-antenna
penalty log2(N_r) is linearized around the previous iterate. Each such
constraint is assembled mechanically as a signed polynomial, split by
coefficient sign, and the side that must be lower-bounded is replaced by its
arithmetic-geometric-mean monomial at the previous iterate. The resulting
programs are inner approximations: anything feasible for them is feasible for
the pre-monomialization constraint, with equality at the expansion point.

Step 2 (powers with the association frozen to integers) needs no iteration
weights at all: with indicators as exponents, the high-SINR rate constraint
is a plain posynomial bound and the per-BBU load cap is a single monomial.

Two auxiliary variables per RRH keep the programs sparse and the
approximation one-sided: a row-mass upper bound s_r >= max(sum_n alpha, 1)
carries the linearization's quadratic penalty, and a monomial lower bound
sigma_r <= sum_n alpha carries the load relief. The floor at one user keeps
the relaxed antenna-sharing model from rewarding fictional sub-unit loads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (DegenerateWeightsError, ExpansionPointError,
                     InvalidAssociationError, ModelDomainError)
from .gp import GpProgram, Monomial, Posynomial, agma_monomialize
from .rates import interference_matrix

__all__ = [
    "Step1Iterate",
    "Step2Iterate",
    "AgmaWeights",
    "ConstraintRecord",
    "BuiltProgram",
    "LogUsersLinearization",
    "alpha_var", "beta_var", "y_var", "p_var",
    "gamma_table",
    "dc_linearize_log_users",
    "compute_weights_step1",
    "build_step1_gp",
    "build_step2_gp",
    "build_bbu_assignment_gp",
]

LN2 = math.log(2.0)

ALPHA_FLOOR = 1e-6
P_FLOOR = 1e-12
# A user that must be served carries one unit of association mass in the
# binary model. The relaxed pin leaves this much slack below 1, both to keep
# a strict interior against the at-most-one-RRH cap (the monomial lower
# bound of the column sum never exceeds the sum itself) and to let mass
# concentrate across iterations (the bound is only tight along the previous
# iterate's proportions).
MASS_SLACK = 0.1


def alpha_var(r, n):
    return f"alpha[{r},{n}]"


def beta_var(r, b):
    return f"beta[{r},{b}]"


def y_var(r):
    return f"y[{r}]"


def s_var(r):
    return f"mass_hi[{r}]"


def sigma_var(r):
    return f"mass_lo[{r}]"


def p_var(r, n):
    return f"p[{r},{n}]"


@dataclass(frozen=True)
class Step1Iterate:
    """Relaxed association state from the previous pass (all entries in
    (0, 1]; strictly positive so it can serve as a GP expansion point)."""

    alpha: np.ndarray
    beta: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        for name in ("alpha", "beta", "y"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if np.any(arr <= 0) or np.any(arr > 1):
                raise ExpansionPointError(f"{name} entries must lie in (0, 1]")


@dataclass(frozen=True)
class Step2Iterate:
    """Previous power matrix; zero entries mean the pair is not served."""

    p: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.p, dtype=float)
        object.__setattr__(self, "p", arr)
        if np.any(arr < 0):
            raise ExpansionPointError("powers must be nonnegative")


@dataclass
class AgmaWeights:
    """Iteration-dependent monomialization weights, grouped per constraint.

    lam/phi: per (r, n), the rate and linearization-offset shares of user
    n's min-rate group. i_val/psi/xi/rho: per-BBU load group (normalizer,
    capacity share, frozen-log shares, quadratic shares). mu/varphi: the
    two shares of each RRH's fronthaul coupling.
    """

    lam: dict = field(default_factory=dict)
    phi: dict = field(default_factory=dict)
    i_val: dict = field(default_factory=dict)
    psi: dict = field(default_factory=dict)
    xi: dict = field(default_factory=dict)
    rho: dict = field(default_factory=dict)
    mu: dict = field(default_factory=dict)
    varphi: dict = field(default_factory=dict)

    def rate_group_sum(self, n):
        return (sum(w for (r, nn), w in self.lam.items() if nn == n)
                + sum(w for (r, nn), w in self.phi.items() if nn == n))

    def load_group_sum(self, b):
        return (self.psi.get(b, 0.0)
                + sum(w for (r, n, bb), w in self.xi.items() if bb == b)
                + sum(w for (r, n, bb), w in self.rho.items() if bb == b))


@dataclass(frozen=True)
class ConstraintRecord:
    """One built constraint plus what it approximates.

    For monomialized constraints the pre-approximation form is
    keep(x)/agma_side(x) <= 1 and the built form keep(x)/monomial(x) <= 1;
    exact constraints carry only the built posynomial.
    """

    name: str
    built: Posynomial
    keep: Posynomial | None = None
    agma_side: Posynomial | None = None
    monomial: Monomial | None = None

    @property
    def exact(self) -> bool:
        return self.agma_side is None

    def built_value(self, point) -> float:
        return self.built.value(point)

    def original_value(self, point) -> float:
        if self.exact:
            return self.built.value(point)
        return self.keep.value(point) / self.agma_side.value(point)


@dataclass(frozen=True)
class BuiltProgram:
    gp: GpProgram
    records: tuple
    weights: AgmaWeights | None
    expansion: dict  # variable name -> value, including auxiliaries


# ---------------------------------------------------------------------------
# shared pieces
# ---------------------------------------------------------------------------

def gamma_table(scenario, p_fixed, p_ref=None) -> np.ndarray:
    """Per-pair SINR at frozen powers.

    Interference comes from the powers actually transmitted (zero rows stay
    zero); the signal numerator of a pair that currently transmits nothing
    uses the probe power p_ref, so the association step can still price a
    re-assignment. Defaults to an even share of the RRH budget.
    """
    p_fixed = np.asarray(p_fixed, dtype=float)
    if p_ref is None:
        p_ref = scenario.config.p_max / scenario.config.num_users
    signal = np.where(p_fixed > 0.0, p_fixed, p_ref)
    i_mat = interference_matrix(p_fixed, scenario.channel)
    return signal * scenario.channel / (scenario.config.noise_power + i_mat)


@dataclass(frozen=True)
class LogUsersLinearization:
    """First-order expansion of log2(N_r) in the association row."""

    base_rowsum: float
    slope: float  # 1 / (base * ln 2)

    @property
    def constant(self) -> float:
        return math.log2(self.base_rowsum) - self.base_rowsum * self.slope

    def value(self, rowsum: float) -> float:
        return math.log2(self.base_rowsum) + (rowsum - self.base_rowsum) * self.slope


def dc_linearize_log_users(prev: Step1Iterate, r: int) -> LogUsersLinearization:
    """Tangent of log2 at the previous row mass; exact in value and first
    derivative at the expansion point, and an upper bound elsewhere."""
    rowsum = float(np.sum(prev.alpha[r]))
    if not rowsum > 0.0:
        raise ExpansionPointError(f"previous association row {r} sums to zero")
    return LogUsersLinearization(rowsum, 1.0 / (rowsum * LN2))


def _ratio_constraint(name, numerator_terms, group_terms, expansion):
    """numerator <= group  -->  numerator * agma(group)^-1 <= 1."""
    if not group_terms:
        raise DegenerateWeightsError(
            f"{name}: the monomialized side has no positive terms")
    group = Posynomial(tuple(group_terms))
    mono, w = agma_monomialize(group, expansion)
    numerator = Posynomial(tuple(numerator_terms))
    built = numerator.times_monomial(mono.inverse())
    rec = ConstraintRecord(name, built, keep=numerator, agma_side=group,
                           monomial=mono)
    return rec, w


# ---------------------------------------------------------------------------
# step 1: association / fronthaul / on-off at frozen powers
# ---------------------------------------------------------------------------

def _step1_system(scenario, p_fixed, prev: Step1Iterate, p_ref,
                  alpha_floor, fixed_alpha=None, fixed_y=None):
    """Assemble every step-1 constraint once; the program builder and the
    weight extractor both consume this.

    When fixed_alpha/fixed_y are given (the max-SINR reference algorithm's
    BBU-assignment pass), only the fronthaul assignment stays free: the
    min-rate and on-off-switch families collapse to constant predicates and
    are dropped, row masses are frozen integers so the antenna-sharing
    penalty needs no linearization, and switched-off RRHs get no fronthaul
    variables at all.
    """
    cfg = scenario.config
    big_r, big_n, big_b = cfg.num_rrhs, cfg.num_users, cfg.num_bbus
    gamma = gamma_table(scenario, p_fixed, p_ref)
    with np.errstate(divide="ignore"):
        a_coef = np.log2(scenario.antennas[:, None] * gamma)
    if not np.all(np.isfinite(a_coef)):
        raise ModelDomainError("nonpositive SINR in the frozen-power table")

    restricted = fixed_alpha is not None
    if restricted:
        alpha0 = np.asarray(fixed_alpha, dtype=float)
        y0 = np.asarray(fixed_y, dtype=float)
        beta_rows = [r for r in range(big_r) if y0[r] > 0.5]
    else:
        alpha0, y0 = prev.alpha, prev.y
        beta_rows = list(range(big_r))
    beta0 = prev.beta
    n0 = alpha0.sum(axis=1)
    nhat0 = np.maximum(n0, 1.0)

    expansion = {}
    weights = AgmaWeights()
    records = []
    bounds = {}

    if not restricted:
        for r in range(big_r):
            for n in range(big_n):
                bounds[alpha_var(r, n)] = (alpha_floor, 1.0)
                expansion[alpha_var(r, n)] = float(alpha0[r, n])
            bounds[y_var(r)] = (alpha_floor, 1.0)
            expansion[y_var(r)] = float(y0[r])
            bounds[s_var(r)] = (1.0, float(big_n))
            expansion[s_var(r)] = float(nhat0[r])
            bounds[sigma_var(r)] = (1e-9, float(big_n))
            expansion[sigma_var(r)] = float(n0[r])
    for r in beta_rows:
        for b in range(big_b):
            bounds[beta_var(r, b)] = (alpha_floor, 1.0)
            expansion[beta_var(r, b)] = float(beta0[r, b])

    def alpha_mono(coef, r, n, extra=None):
        """coef * alpha[r,n] * extra, with alpha folded into the coefficient
        when the association is frozen. None when the folded term vanishes."""
        exps = dict(extra or {})
        c = coef
        if restricted:
            c = coef * alpha0[r, n]
            if c == 0.0:
                return None
        else:
            exps[alpha_var(r, n)] = exps.get(alpha_var(r, n), 0.0) + 1.0
        return Monomial(c, exps)

    # linearization of log2(N_r) at the (floored) previous row mass:
    # log2(N) ~= log2(nhat0) + (N - nhat0) * g, so the per-pair rate becomes
    # a_coef + d_r - g * mass with d_r = 1/ln2 - log2(nhat0).
    g_slope = 1.0 / (nhat0 * LN2)
    d_r = 1.0 / LN2 - np.log2(nhat0)

    if not restricted:
        # minimum-rate constraint per user (monomialized ratio form). The
        # requirement is scaled by the guaranteed column mass (1 - slack) so
        # the per-unit-mass rate demanded stays exactly the true requirement;
        # the integer projection then re-imposes the full value.
        for n in range(big_n):
            rsv = float(scenario.rate_req[n]) * (1.0 - MASS_SLACK)
            pos, neg, tags = [], [], []
            for r in range(big_r):
                rate_term = alpha_mono(abs(a_coef[r, n]), r, n)
                if a_coef[r, n] > 0:
                    pos.append(rate_term)
                    tags.append(("lam", (r, n)))
                elif a_coef[r, n] < 0:
                    neg.append(rate_term)
                if d_r[r] > 0:
                    pos.append(alpha_mono(d_r[r], r, n))
                    tags.append(("phi", (r, n)))
                elif d_r[r] < 0:
                    neg.append(alpha_mono(-d_r[r], r, n))
                neg.append(alpha_mono(g_slope[r], r, n, {s_var(r): 1.0}))
            if rsv > 0:
                neg.insert(0, Monomial(rsv))
            rec, w = _ratio_constraint(f"user_min_rate[{n}]", neg, pos, expansion)
            records.append(rec)
            for (kind, key), wi in zip(tags, w):
                getattr(weights, kind)[key] = float(wi)

            # every user with a requirement carries one unit of mass: the
            # binary model serves each such user from exactly one RRH, so the
            # relaxation pins the column sum to 1 from below (monomialized)
            if rsv > 0:
                srv_rec, _ = _ratio_constraint(
                    f"serve_user[{n}]", [Monomial(1.0 - MASS_SLACK)],
                    [alpha_mono(1.0, r, n) for r in range(big_r)], expansion)
                records.append(srv_rec)

        for n in range(big_n):
            records.append(ConstraintRecord(
                f"one_rrh_per_user[{n}]",
                Posynomial(tuple(alpha_mono(1.0, r, n) for r in range(big_r)))))

        omega = float(cfg.resolved_omega)
        for r in range(big_r):
            terms = tuple(alpha_mono(1.0 / omega, r, n, {y_var(r): -1.0})
                          for n in range(big_n))
            records.append(ConstraintRecord(f"association_requires_on[{r}]",
                                            Posynomial(terms)))

        # auxiliary row-mass envelopes: s_r >= sum_n alpha (and >= 1 via its
        # bound); sigma_r <= its monomial lower bound <= sum_n alpha
        for r in range(big_r):
            mass = tuple(alpha_mono(1.0, r, n, {s_var(r): -1.0})
                         for n in range(big_n))
            records.append(ConstraintRecord(f"served_mass_cap[{r}]",
                                            Posynomial(mass)))
            rec, _ = _ratio_constraint(
                f"served_mass_floor[{r}]", [Monomial(1.0, {sigma_var(r): 1.0})],
                [alpha_mono(1.0, r, n) for n in range(big_n)], expansion)
            records.append(rec)

    for r in beta_rows:
        records.append(ConstraintRecord(
            f"one_bbu_per_rrh[{r}]",
            Posynomial(tuple(Monomial(1.0, {beta_var(r, b): 1.0})
                             for b in range(big_b)))))

    # fronthaul only on active RRHs: sum_b beta + 1 <= y + 1, with the right
    # side monomialized when y is a variable
    for r in beta_rows:
        keep = [Monomial(1.0, {beta_var(r, b): 1.0}) for b in range(big_b)]
        keep.append(Monomial(1.0))
        if restricted:
            records.append(ConstraintRecord(
                f"fronthaul_requires_on[{r}]",
                Posynomial(tuple(keep)).times_monomial(
                    Monomial(1.0 / (1.0 + float(y0[r]))))))
            weights.mu[r] = 1.0 / (1.0 + float(y0[r]))
            weights.varphi[r] = float(y0[r]) / (1.0 + float(y0[r]))
        else:
            group = [Monomial(1.0), Monomial(1.0, {y_var(r): 1.0})]
            rec, w = _ratio_constraint(f"fronthaul_requires_on[{r}]", keep,
                                       group, expansion)
            records.append(rec)
            weights.mu[r] = float(w[0])
            weights.varphi[r] = float(w[1])

    # per-BBU load cap
    for b in range(big_b):
        cap = float(scenario.bbu_capacity[b])
        keep, group = [], [Monomial(cap)]
        tags = [("psi", b)]
        for r in beta_rows:
            for n in range(big_n):
                base = {beta_var(r, b): 1.0}
                rate = alpha_mono(abs(a_coef[r, n]), r, n, base)
                if rate is not None and a_coef[r, n] != 0.0:
                    (keep if a_coef[r, n] > 0 else group).append(rate)
                    if a_coef[r, n] < 0:
                        tags.append(("xi", (r, n, b)))
                if restricted:
                    # frozen mass: the antenna-sharing penalty is the
                    # constant log2(nhat0), moved to the capacity side
                    off_c = math.log2(nhat0[r])
                    if off_c > 0:
                        off = alpha_mono(off_c, r, n, base)
                        if off is not None:
                            group.append(off)
                            tags.append(("xi", (r, n, b)))
                else:
                    if d_r[r] > 0:
                        keep.append(alpha_mono(d_r[r], r, n, base))
                    elif d_r[r] < 0:
                        group.append(alpha_mono(-d_r[r], r, n, base))
                        tags.append(("xi", (r, n, b)))
                    group.append(alpha_mono(
                        g_slope[r], r, n,
                        {beta_var(r, b): 1.0, sigma_var(r): 1.0}))
                    tags.append(("rho", (r, n, b)))
        if not keep:
            continue
        rec, w = _ratio_constraint(f"bbu_load_capacity[{b}]", keep, group,
                                   expansion)
        records.append(rec)
        weights.i_val[b] = float(Posynomial(tuple(group)).value(expansion))
        for (kind, key), wi in zip(tags, w):
            getattr(weights, kind)[key] = float(wi)

    return records, weights, bounds, expansion, a_coef


def _objective_step1(scenario, p_fixed, p_ref, fixed_alpha=None, fixed_y=None):
    cfg = scenario.config
    p_eff = np.where(np.asarray(p_fixed) > 0.0, p_fixed,
                     cfg.p_max / cfg.num_users if p_ref is None else p_ref)
    terms = []
    if fixed_alpha is None:
        for r in range(cfg.num_rrhs):
            for n in range(cfg.num_users):
                terms.append(Monomial(float(p_eff[r, n]), {alpha_var(r, n): 1.0}))
            if cfg.cost_per_antenna > 0:
                terms.append(Monomial(cfg.cost_per_antenna * float(scenario.antennas[r]),
                                      {y_var(r): 1.0}))
    else:
        const = float((np.asarray(fixed_alpha) * p_eff).sum())
        const += cfg.cost_per_antenna * float(
            (np.asarray(fixed_y) * scenario.antennas).sum())
        terms.append(Monomial(max(const, 1e-30)))
    return Posynomial(tuple(terms))


def compute_weights_step1(prev: Step1Iterate, scenario, p_fixed,
                          p_ref=None) -> AgmaWeights:
    """Monomialization weights at the previous iterate (canonical recipe:
    each weight is its term's share of the group value)."""
    _, weights, _, _, _ = _step1_system(scenario, p_fixed, prev, p_ref,
                                        ALPHA_FLOOR)
    return weights


def build_step1_gp(scenario, p_fixed, prev: Step1Iterate, p_ref=None,
                   alpha_floor: float = ALPHA_FLOOR) -> BuiltProgram:
    """GP over relaxed association, fronthaul assignment, and on-off state
    at frozen powers."""
    records, weights, bounds, expansion, _ = _step1_system(
        scenario, p_fixed, prev, p_ref, alpha_floor)
    objective = _objective_step1(scenario, p_fixed, p_ref)
    gp = GpProgram(objective=objective,
                   inequalities=tuple(r.built for r in records),
                   bounds=bounds,
                   names=tuple(r.name for r in records))
    return BuiltProgram(gp, tuple(records), weights, expansion)


def build_bbu_assignment_gp(scenario, fixed_alpha, fixed_y, prev_beta,
                            p_fixed, p_ref=None,
                            alpha_floor: float = ALPHA_FLOOR) -> BuiltProgram:
    """The association-frozen restriction of the step-1 program: only the
    fronthaul assignment is free. Its objective is constant, so the solve
    lands at the analytic center of the load/assignment constraints, which
    spreads RRHs towards the roomier BBUs."""
    prev = Step1Iterate(alpha=np.full_like(np.asarray(fixed_alpha, dtype=float),
                                           0.5),
                        beta=np.asarray(prev_beta, dtype=float),
                        y=np.maximum(np.asarray(fixed_y, dtype=float), 1e-6))
    records, weights, bounds, expansion, _ = _step1_system(
        scenario, p_fixed, prev, p_ref, alpha_floor,
        fixed_alpha=np.asarray(fixed_alpha, dtype=float),
        fixed_y=np.asarray(fixed_y, dtype=float))
    objective = _objective_step1(scenario, p_fixed, p_ref,
                                 fixed_alpha=fixed_alpha, fixed_y=fixed_y)
    gp = GpProgram(objective=objective,
                   inequalities=tuple(r.built for r in records),
                   bounds=bounds,
                   names=tuple(r.name for r in records))
    return BuiltProgram(gp, tuple(records), weights, expansion)


# ---------------------------------------------------------------------------
# step 2: power allocation at a frozen integer association
# ---------------------------------------------------------------------------

def _served_pairs(alloc):
    alpha = np.asarray(alloc.alpha)
    return [(int(r), int(n)) for r, n in zip(*np.nonzero(alpha > 0.5))]


def check_association(scenario, alloc):
    """Structural preconditions on a frozen integer association."""
    cfg = scenario.config
    a = np.asarray(alloc.alpha)
    b = np.asarray(alloc.beta)
    y = np.asarray(alloc.y)
    if a.max(initial=0) > 1 or a.min(initial=0) < 0:
        raise InvalidAssociationError("association entries must be binary")
    if np.any(a.sum(axis=0) > 1.0 + 1e-9):
        raise InvalidAssociationError("a user is associated to several RRHs")
    if np.any(b.sum(axis=1) > 1.0 + 1e-9):
        raise InvalidAssociationError("an RRH is assigned to several BBUs")
    if np.any(b.sum(axis=1) > y + 1e-9):
        raise InvalidAssociationError("fronthaul enabled on a switched-off RRH")
    if np.any(a.sum(axis=1) > cfg.resolved_omega * y + 1e-9):
        raise InvalidAssociationError("users associated to a switched-off RRH")
    unserved = np.flatnonzero((a.sum(axis=0) < 0.5) & (scenario.rate_req > 0))
    if unserved.size:
        raise InvalidAssociationError(
            f"users {unserved.tolist()} have a rate requirement but no RRH")
    n_r = a.sum(axis=1)
    if np.any(n_r > scenario.antennas):
        raise InvalidAssociationError("more served users than antennas on an RRH")


def build_step2_gp(scenario, fixed_assoc, prev: Step2Iterate,
                   p_floor: float = P_FLOOR) -> BuiltProgram:
    """GP over the served transmit powers only.

    Powers are expressed in units of the noise floor, which cancels the
    noise out of the rate constraints and keeps the per-BBU load monomial's
    coefficient within floating-point range. Exact within the high-SINR
    rate model: no monomialization is needed, so expansion-point tightness
    is automatic and the inner loop converges in one productive solve.
    """
    cfg = scenario.config
    check_association(scenario, fixed_assoc)
    sigma2 = cfg.noise_power
    served = _served_pairs(fixed_assoc)
    n_r = np.asarray(fixed_assoc.alpha).sum(axis=1)
    h = scenario.channel
    # tolerated-interference level in the load cap: the configured floor or
    # the interference at the previous powers, whichever is larger, so the
    # frozen load estimate tracks the operating point instead of the
    # interference-free upper bound
    i_tol = np.maximum(cfg.interference_threshold,
                       interference_matrix(np.asarray(prev.p, dtype=float), h))

    expansion = {}
    bounds = {}
    for r, n in served:
        q0 = float(prev.p[r, n]) / sigma2
        lo, hi = p_floor / sigma2, cfg.p_max / sigma2
        expansion[p_var(r, n)] = min(max(q0, lo), hi) if q0 > 0 else hi * 1e-6
        bounds[p_var(r, n)] = (lo, hi)

    records = []

    by_rrh = {}
    for r, n in served:
        by_rrh.setdefault(r, []).append(n)

    for r, users in sorted(by_rrh.items()):
        terms = tuple(Monomial(sigma2 / cfg.p_max, {p_var(r, n): 1.0})
                      for n in users)
        records.append(ConstraintRecord(f"rrh_power_budget[{r}]",
                                        Posynomial(terms)))

    for r, n in served:
        rsv = float(scenario.rate_req[n])
        k = n_r[r] * (2.0 ** rsv) / (scenario.antennas[r] * h[r, n])
        terms = [Monomial(k, {p_var(r, n): -1.0})]
        for rp, np_ in served:
            if rp == r or np_ == n:
                continue
            terms.append(Monomial(k * h[rp, n],
                                  {p_var(rp, np_): 1.0, p_var(r, n): -1.0}))
        records.append(ConstraintRecord(f"user_min_rate[{n}]",
                                        Posynomial(tuple(terms))))

    beta = np.asarray(fixed_assoc.beta)
    for b in range(cfg.num_bbus):
        log_coef = -float(scenario.bbu_capacity[b]) * LN2
        exps = {}
        any_pair = False
        for r, n in served:
            if beta[r, b] < 0.5:
                continue
            any_pair = True
            factor = (scenario.antennas[r] / n_r[r]) * h[r, n] * sigma2 / (
                sigma2 + i_tol[r, n])
            log_coef += math.log(factor)
            exps[p_var(r, n)] = 1.0
        if not any_pair:
            continue
        # monomial <= 1 is invariant under raising both sides to a positive
        # power; a fractional root keeps the coefficient in float range when
        # the product spans many served pairs
        root = max(1.0, abs(log_coef) / 300.0)
        if root > 1.0:
            exps = {k: v / root for k, v in exps.items()}
        records.append(ConstraintRecord(
            f"bbu_load_capacity[{b}]",
            Posynomial((Monomial(math.exp(log_coef / root), exps),))))

    obj_terms = [Monomial(sigma2, {p_var(r, n): 1.0}) for r, n in served]
    antenna_const = cfg.cost_per_antenna * float(
        (np.asarray(fixed_assoc.y) * scenario.antennas).sum())
    if antenna_const > 0:
        obj_terms.append(Monomial(antenna_const))
    if not obj_terms:
        obj_terms.append(Monomial(1e-30))

    gp = GpProgram(objective=Posynomial(tuple(obj_terms)),
                   inequalities=tuple(r.built for r in records),
                   bounds=bounds,
                   names=tuple(r.name for r in records))
    return BuiltProgram(gp, tuple(records), None, expansion)


def step2_values_to_powers(scenario, fixed_assoc, values) -> np.ndarray:
    """Translate a step-2 GP solution back to a Watt power matrix."""
    cfg = scenario.config
    p = np.zeros((cfg.num_rrhs, cfg.num_users))
    for r, n in _served_pairs(fixed_assoc):
        p[r, n] = values[p_var(r, n)] * cfg.noise_power
    return p
