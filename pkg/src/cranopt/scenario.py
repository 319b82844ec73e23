"""Problem instances: geometry, channels, capacities, and the feasibility
checker for candidate allocations.

Distances are dimensionless; the power-law gain 1/(1 + d^4) only makes sense
with O(1) distances, so the service area is a small square. RRHs are placed
deterministically (one at the center, the rest evenly spaced on a concentric
circle) so that identical configs give identical instances.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict, replace

import numpy as np

from .errors import InvariantViolationError, ParseError

__all__ = [
    "ScenarioConfig",
    "Scenario",
    "ConstraintCheck",
    "FeasibilityReport",
    "channel_gain",
    "generate_scenario",
    "save_scenario",
    "load_scenario",
    "validate_solution",
]

# numeric tolerance when deciding whether a constraint is violated
VIOLATION_TOL = 1e-9


@dataclass(frozen=True)
class ScenarioConfig:
    """Instance parameters. Powers in Watt, rates in bps/Hz."""

    num_rrhs: int = 5
    num_users: int = 20
    num_bbus: int = 2
    area_side: float = 8.0
    antennas_range: tuple = (100, 200)        # inclusive integer interval
    bbu_load_range: tuple = (2.0, 24.0)       # bps/Hz
    p_max: float = 40.0                       # per-RRH transmit budget
    rate_req: float = 0.3                     # per-user minimum rate
    noise_power: float = 1e-6
    cost_per_antenna: float = 0.25
    omega: int | None = None                  # None -> num_users
    interference_threshold: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.num_rrhs < 1 or self.num_users < 1 or self.num_bbus < 1:
            raise InvariantViolationError("counts must all be >= 1")
        if not self.area_side > 0:
            raise InvariantViolationError("area_side must be positive")
        lo, hi = self.antennas_range
        if not (1 <= lo <= hi):
            raise InvariantViolationError("antennas_range must be a valid interval >= 1")
        llo, lhi = self.bbu_load_range
        if not (0 < llo <= lhi):
            raise InvariantViolationError("bbu_load_range must be a positive interval")
        if not self.p_max > 0:
            raise InvariantViolationError("p_max must be positive")
        if self.rate_req < 0:
            raise InvariantViolationError("rate_req must be nonnegative")
        if not self.noise_power > 0:
            raise InvariantViolationError("noise_power must be positive")
        if self.cost_per_antenna < 0:
            raise InvariantViolationError("cost_per_antenna must be nonnegative")
        if self.omega is not None and self.omega < 1:
            raise InvariantViolationError("omega must be >= 1")
        if self.interference_threshold < 0:
            raise InvariantViolationError("interference_threshold must be nonnegative")

    @property
    def resolved_omega(self) -> int:
        # with omega = num_users, the on/off coupling acts as a pure switch
        return self.num_users if self.omega is None else self.omega


def channel_gain(distance):
    """Power gain 1/(1 + d^4); strictly decreasing, in (0, 1]."""
    d = np.asarray(distance, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be nonnegative")
    out = 1.0 / (1.0 + d ** 4)
    return float(out) if np.isscalar(distance) or out.ndim == 0 else out


def _rrh_layout(r_count: int, side: float) -> np.ndarray:
    center = np.array([side / 2.0, side / 2.0])
    pos = [center]
    radius = side / 3.0
    for k in range(r_count - 1):
        ang = 2.0 * math.pi * k / (r_count - 1)
        pos.append(center + radius * np.array([math.cos(ang), math.sin(ang)]))
    return np.array(pos)


@dataclass(frozen=True)
class Scenario:
    config: ScenarioConfig
    rrh_positions: np.ndarray     # (R, 2)
    user_positions: np.ndarray    # (N, 2)
    antennas: np.ndarray          # (R,) ints, F_r
    bbu_capacity: np.ndarray      # (B,)
    channel: np.ndarray           # (R, N) gains h_{r,n}
    rate_req: np.ndarray = None   # (N,), defaults to uniform config value

    def __post_init__(self):
        if self.rate_req is None:
            object.__setattr__(
                self, "rate_req",
                np.full(self.config.num_users, float(self.config.rate_req)))
        for name in ("rrh_positions", "user_positions", "antennas",
                     "bbu_capacity", "channel", "rate_req"):
            object.__setattr__(self, name, np.asarray(getattr(self, name)))
        self._check_invariants()

    def _check_invariants(self):
        cfg = self.config
        r_n = (cfg.num_rrhs, cfg.num_users)
        if self.channel.shape != r_n:
            raise InvariantViolationError(
                f"channel gain matrix must be {r_n}, got {self.channel.shape}")
        if np.any(self.channel <= 0) or np.any(self.channel > 1):
            raise InvariantViolationError("channel gains must lie in (0, 1]")
        if self.rrh_positions.shape != (cfg.num_rrhs, 2):
            raise InvariantViolationError("rrh_positions must be (R, 2)")
        if self.user_positions.shape != (cfg.num_users, 2):
            raise InvariantViolationError("user_positions must be (N, 2)")
        if np.any(self.antennas < 1):
            raise InvariantViolationError("every RRH needs at least one antenna")
        if np.any(self.bbu_capacity <= 0):
            raise InvariantViolationError("BBU capacities must be positive")
        if self.rate_req.shape != (cfg.num_users,) or np.any(self.rate_req < 0):
            raise InvariantViolationError("rate_req must be a nonnegative length-N vector")
        recomputed = channel_gain(self.distances())
        if np.max(np.abs(recomputed - self.channel)) > 1e-12:
            raise InvariantViolationError(
                "stored channel gains disagree with positions (1/(1+d^4) check)")

    def distances(self) -> np.ndarray:
        diff = self.rrh_positions[:, None, :] - self.user_positions[None, :, :]
        return np.linalg.norm(diff, axis=2)

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return (self.config == other.config
                and np.array_equal(self.rrh_positions, other.rrh_positions)
                and np.array_equal(self.user_positions, other.user_positions)
                and np.array_equal(self.antennas, other.antennas)
                and np.array_equal(self.bbu_capacity, other.bbu_capacity)
                and np.array_equal(self.channel, other.channel)
                and np.array_equal(self.rate_req, other.rate_req))


def generate_scenario(config: ScenarioConfig) -> Scenario:
    """Deterministically instantiate a scenario from its config.

    Draw order is fixed (user positions, antenna counts, BBU capacities) so
    the same config always yields a bit-identical instance.
    """
    rng = np.random.default_rng(config.rng_seed)
    users = rng.uniform(0.0, config.area_side, size=(config.num_users, 2))
    f_lo, f_hi = config.antennas_range
    antennas = rng.integers(f_lo, f_hi + 1, size=config.num_rrhs)
    l_lo, l_hi = config.bbu_load_range
    caps = rng.uniform(l_lo, l_hi, size=config.num_bbus)
    rrhs = _rrh_layout(config.num_rrhs, config.area_side)
    dist = np.linalg.norm(rrhs[:, None, :] - users[None, :, :], axis=2)
    return Scenario(config, rrhs, users, antennas, caps, channel_gain(dist))


# ---------------------------------------------------------------------------
# file format (JSON object, config fields at top level, arrays optional)
# ---------------------------------------------------------------------------

_REQUIRED_FIELDS = (
    "num_rrhs", "num_users", "num_bbus", "area_side", "antennas_range",
    "bbu_load_range", "p_max", "rate_req", "noise_power", "cost_per_antenna",
    "interference_threshold", "rng_seed",
)
_ARRAY_FIELDS = ("rrh_positions", "user_positions", "antennas", "bbu_capacity")


def save_scenario(scenario: Scenario, path):
    doc = asdict(scenario.config)
    doc["antennas_range"] = list(scenario.config.antennas_range)
    doc["bbu_load_range"] = list(scenario.config.bbu_load_range)
    doc["rate_req"] = scenario.rate_req.tolist()
    doc["rrh_positions"] = scenario.rrh_positions.tolist()
    doc["user_positions"] = scenario.user_positions.tolist()
    doc["antennas"] = scenario.antennas.tolist()
    doc["bbu_capacity"] = scenario.bbu_capacity.tolist()
    doc["channel_gain"] = scenario.channel.tolist()
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)


def parse_config(doc: dict, origin: str = "<config>") -> ScenarioConfig:
    for name in _REQUIRED_FIELDS:
        if name not in doc:
            raise ParseError(f"{origin}: missing required field {name!r}")
    rate = doc["rate_req"]
    rate_scalar = float(np.min(rate)) if isinstance(rate, list) else float(rate)
    try:
        return ScenarioConfig(
            num_rrhs=int(doc["num_rrhs"]),
            num_users=int(doc["num_users"]),
            num_bbus=int(doc["num_bbus"]),
            area_side=float(doc["area_side"]),
            antennas_range=tuple(int(x) for x in doc["antennas_range"]),
            bbu_load_range=tuple(float(x) for x in doc["bbu_load_range"]),
            p_max=float(doc["p_max"]),
            rate_req=rate_scalar,
            noise_power=float(doc["noise_power"]),
            cost_per_antenna=float(doc["cost_per_antenna"]),
            omega=None if doc.get("omega") is None else int(doc["omega"]),
            interference_threshold=float(doc["interference_threshold"]),
            rng_seed=int(doc["rng_seed"]),
        )
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{origin}: malformed field value ({exc})") from exc


def load_scenario(path) -> Scenario:
    """Read a scenario file; regenerate from the config when the file has no
    explicit arrays, otherwise use (and validate) the stored arrays."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    config = parse_config(doc, origin=str(path))

    present = [f for f in _ARRAY_FIELDS if f in doc]
    if not present:
        return generate_scenario(config)
    missing = [f for f in _ARRAY_FIELDS if f not in doc]
    if missing:
        raise ParseError(f"{path}: explicit arrays are all-or-none; missing {missing}")

    rate = doc["rate_req"]
    rate_vec = (np.asarray(rate, dtype=float) if isinstance(rate, list)
                else np.full(config.num_users, float(rate)))
    rrhs = np.asarray(doc["rrh_positions"], dtype=float)
    users = np.asarray(doc["user_positions"], dtype=float)
    if "channel_gain" in doc:
        h = np.asarray(doc["channel_gain"], dtype=float)
    else:
        d = np.linalg.norm(rrhs[:, None, :] - users[None, :, :], axis=2)
        h = channel_gain(d)
    return Scenario(
        config=config,
        rrh_positions=rrhs,
        user_positions=users,
        antennas=np.asarray(doc["antennas"], dtype=int),
        bbu_capacity=np.asarray(doc["bbu_capacity"], dtype=float),
        channel=h,
        rate_req=rate_vec,
    )


# ---------------------------------------------------------------------------
# feasibility checking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstraintCheck:
    index: int
    value: float
    bound: float
    slack: float        # positive = violated by this much
    ok: bool


@dataclass(frozen=True)
class FeasibilityReport:
    checks: dict = field(default_factory=dict)  # family name -> [ConstraintCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for fam in self.checks.values() for c in fam)

    def violations(self):
        return {fam: [c for c in checks if not c.ok]
                for fam, checks in self.checks.items()
                if any(not c.ok for c in checks)}

    def family_ok(self, fam: str) -> bool:
        return all(c.ok for c in self.checks.get(fam, ()))


def _family(values, bounds):
    out = []
    for i, (v, b) in enumerate(zip(values, bounds)):
        slack = float(v - b)
        out.append(ConstraintCheck(i, float(v), float(b), slack,
                                   slack <= VIOLATION_TOL))
    return out


def validate_solution(scenario: Scenario, allocation) -> FeasibilityReport:
    """Check an integer allocation against every model constraint using the
    exact rate expression. Reports per-constraint values and slacks."""
    from . import rates  # local import to avoid a cycle

    cfg = scenario.config
    a, b, y, p = (np.asarray(allocation.alpha), np.asarray(allocation.beta),
                  np.asarray(allocation.y), np.asarray(allocation.p))
    shape = (cfg.num_rrhs, cfg.num_users)
    if a.shape != shape or p.shape != shape:
        raise ValueError(f"alpha/p must have shape {shape}")
    if b.shape != (cfg.num_rrhs, cfg.num_bbus) or y.shape != (cfg.num_rrhs,):
        raise ValueError("beta/y shapes do not match the scenario")

    rates_matrix = rates.exact_rate_matrix(allocation, scenario)
    user_rate = (a * rates_matrix).sum(axis=0)
    load = np.array([(b[:, j][:, None] * a * rates_matrix).sum()
                     for j in range(cfg.num_bbus)])
    omega = cfg.resolved_omega

    checks = {
        "rrh_power_budget": _family(p.sum(axis=1), np.full(cfg.num_rrhs, cfg.p_max)),
        "user_min_rate": _family(scenario.rate_req, user_rate),  # rsv - rate <= 0
        "single_rrh_per_user": _family(a.sum(axis=0), np.ones(cfg.num_users)),
        "single_bbu_per_rrh": _family(b.sum(axis=1), np.ones(cfg.num_rrhs)),
        "bbu_load_capacity": _family(load, scenario.bbu_capacity),
        "fronthaul_requires_on": _family(b.sum(axis=1), y),
        "association_requires_on": _family(a.sum(axis=1), omega * y),
    }
    return FeasibilityReport(checks)
