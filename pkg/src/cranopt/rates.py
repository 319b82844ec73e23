"""Rate, utility, and energy-efficiency evaluation for allocation states.

All functions are pure in (allocation, scenario) and safe to call
concurrently. The exact rate uses the massive-MIMO effective-SNR factor
(F_r - N_r + 1)/N_r; the high-SINR shortcut drops the +1 inside the log and
rounds the factor to F_r/N_r, which is accurate once the SINR argument is
large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ModelDomainError, UndefinedEnergyEfficiencyError

__all__ = [
    "Allocation",
    "users_on_rrh",
    "interference",
    "interference_matrix",
    "exact_rate",
    "exact_rate_matrix",
    "approx_rate",
    "utility",
    "throughput",
    "energy_efficiency",
]

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class Allocation:
    """Decision state: association alpha (R,N), BBU assignment beta (R,B),
    on/off y (R,), powers p (R,N) in Watt. mode is 'relaxed' or 'integer'."""

    alpha: np.ndarray
    beta: np.ndarray
    y: np.ndarray
    p: np.ndarray
    mode: str = "integer"

    def __post_init__(self):
        for name in ("alpha", "beta", "y", "p"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.mode not in ("relaxed", "integer"):
            raise ValueError("mode must be 'relaxed' or 'integer'")
        if np.any(self.p < 0):
            raise ValueError("powers must be nonnegative")

    def replace_p(self, p) -> "Allocation":
        return Allocation(self.alpha, self.beta, self.y, np.asarray(p, dtype=float),
                          self.mode)

    def copy_mutable(self):
        return (self.alpha.copy(), self.beta.copy(), self.y.copy(), self.p.copy())


def users_on_rrh(allocation: Allocation, r: int) -> float:
    """Association mass on RRH r (a user count once the state is integer)."""
    return float(allocation.alpha[r].sum())


def interference_matrix(p: np.ndarray, h: np.ndarray) -> np.ndarray:
    """I[r, n] = sum over other RRHs r' and other users n' of p[r',n'] h[r',n].

    Interfering power from RRH r' reaches user n through that pair's own
    gain h[r',n]; transmissions of the serving RRH are excluded entirely
    (spatial separation across its antenna array), as is every other RRH's
    power aimed at user n itself.
    """
    row_sum = p.sum(axis=1)                       # (R,)
    m = h * (row_sum[:, None] - p)                # contribution of RRH r' to user n
    tot = m.sum(axis=0)                           # over all r'
    return tot[None, :] - m


def interference(allocation: Allocation, scenario, r: int, n: int) -> float:
    return float(interference_matrix(allocation.p, scenario.channel)[r, n])


def _antenna_factor(f_r: float, n_r: float) -> float:
    if n_r > f_r:
        raise ModelDomainError(
            f"{n_r} served users exceed the {f_r} antennas of this RRH")
    return (f_r - n_r + 1.0) / n_r


def exact_rate(allocation: Allocation, scenario, r: int, n: int) -> float:
    """Achievable rate of user n at RRH r in bps/Hz; 0 for unserved pairs."""
    a = allocation.alpha[r, n]
    if a == 0.0:
        return 0.0
    n_r = users_on_rrh(allocation, r)
    factor = _antenna_factor(float(scenario.antennas[r]), n_r)
    i_rn = interference(allocation, scenario, r, n)
    snr = factor * allocation.p[r, n] * scenario.channel[r, n] / (
        scenario.config.noise_power + i_rn)
    return math.log2(1.0 + snr)


def exact_rate_matrix(allocation: Allocation, scenario) -> np.ndarray:
    """All pair rates at once; rows with no association mass are zero."""
    n_r = allocation.alpha.sum(axis=1)
    f = scenario.antennas.astype(float)
    if np.any(n_r > f):
        r_bad = int(np.argmax(n_r - f))
        raise ModelDomainError(
            f"{n_r[r_bad]} served users exceed the {f[r_bad]} antennas of RRH {r_bad}")
    factor = np.where(n_r > 0, (f - n_r + 1.0) / np.maximum(n_r, 1e-300), 0.0)
    i_mat = interference_matrix(allocation.p, scenario.channel)
    snr = factor[:, None] * allocation.p * scenario.channel / (
        scenario.config.noise_power + i_mat)
    out = np.log2(1.0 + snr)
    out[allocation.alpha == 0.0] = 0.0
    return out


def approx_rate(allocation: Allocation, scenario, r: int, n: int) -> float:
    """High-SINR rate log2((F_r/N_r) * gamma)."""
    p = allocation.p[r, n]
    n_r = users_on_rrh(allocation, r)
    if not (p > 0 and n_r > 0):
        raise ModelDomainError("approx rate needs positive power and row mass")
    i_rn = interference(allocation, scenario, r, n)
    gamma = p * scenario.channel[r, n] / (scenario.config.noise_power + i_rn)
    arg = scenario.antennas[r] / n_r * gamma
    if arg <= 0:
        raise ModelDomainError("nonpositive high-SINR log argument")
    return math.log2(arg)


def utility(allocation: Allocation, scenario) -> float:
    """Operating cost: served transmit power plus antenna cost of RRHs on."""
    power = float((allocation.alpha * allocation.p).sum())
    antenna = float(scenario.config.cost_per_antenna
                    * (allocation.y * scenario.antennas).sum())
    return power + antenna


def throughput(allocation: Allocation, scenario) -> float:
    return float((allocation.alpha * exact_rate_matrix(allocation, scenario)).sum())


def energy_efficiency(allocation: Allocation, scenario) -> float:
    """Throughput per unit operating cost (bps/Hz/Watt)."""
    u = utility(allocation, scenario)
    if u <= 0.0:
        raise UndefinedEnergyEfficiencyError("utility is zero for this allocation")
    return throughput(allocation, scenario) / u
