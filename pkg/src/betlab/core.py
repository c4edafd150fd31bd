"""Wealth accounting for a single betting path.

Wealth is a running product of per-round multipliers 1 + lambda*(x - m),
stored in log domain so that 1e5-step paths neither underflow nor lose
bankruptcy information (-inf log-wealth encodes wealth exactly 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

# A raw multiplier at or below this is treated as an exact all-in loss.
TOL_ZERO = 1e-300
# Observations outside [0,1] by more than this are rejected; within it, clamped.
OBS_TOL = 1e-12
# Slack when validating a fraction against the interval endpoints.
FRACTION_TOL = 1e-12


@dataclass(frozen=True)
class NullSpec:
    """Hypothesized mean of the [0,1]-valued observations."""

    m: float

    def __post_init__(self) -> None:
        if not (0.0 < self.m < 1.0):
            raise ValueError(f"null mean must lie strictly inside (0,1), got {self.m}")


@dataclass(frozen=True)
class FractionInterval:
    """Legal bet-fraction range [-1/(1-m), 1/m] for a given null mean."""

    lo: float
    hi: float

    def contains(self, lam: float, tol: float = FRACTION_TOL) -> bool:
        return self.lo - tol <= lam <= self.hi + tol

    def clip(self, lam: float) -> float:
        return min(max(lam, self.lo), self.hi)


def fraction_bounds(null: NullSpec) -> FractionInterval:
    """Legal fraction interval for betting against mean ``null.m``."""
    m = null.m
    return FractionInterval(lo=-1.0 / (1.0 - m), hi=1.0 / m)


@dataclass(frozen=True)
class PathState:
    """Running sufficient statistics of one betting path.

    ``log_wealth`` is -inf exactly when the path is bankrupt; bankruptcy is
    absorbing. Data sums keep accumulating after bankruptcy so that
    history-driven fractions stay well defined. ``history`` is opt-in: only
    strategies that need the raw observations (GRAPA, KL_inf) should pay the
    O(n) memory.
    """

    n: int = 0
    log_wealth: float = 0.0
    bankrupt: bool = False
    sum_dev: float = 0.0
    sum_sq_dev: float = 0.0
    sum_x: float = 0.0
    sum_x_sq: float = 0.0
    sum_lambda_sq: float = 0.0
    history: tuple[float, ...] | None = None

    @property
    def wealth(self) -> float:
        return 0.0 if self.bankrupt else math.exp(self.log_wealth)

    def with_history(self) -> "PathState":
        return self if self.history is not None else replace(self, history=())


def _check_observation(x: float) -> float:
    if x < -OBS_TOL or x > 1.0 + OBS_TOL:
        raise ValueError(f"observation {x} outside [0,1]")
    return min(max(x, 0.0), 1.0)


def wealth_update(state: PathState, lam: float, x: float, null: NullSpec) -> PathState:
    """Absorb one observation at bet fraction ``lam``; returns a new state."""
    bounds = fraction_bounds(null)
    if not bounds.contains(lam):
        raise ValueError(f"fraction {lam} outside {bounds}")
    x = _check_observation(x)

    dev = x - null.m
    g = 1.0 + lam * dev
    if state.bankrupt or g <= TOL_ZERO:
        log_wealth, bankrupt = -math.inf, True
    else:
        log_wealth, bankrupt = state.log_wealth + math.log1p(lam * dev), False
    return replace(
        state,
        n=state.n + 1,
        log_wealth=log_wealth,
        bankrupt=bankrupt,
        sum_dev=state.sum_dev + dev,
        sum_sq_dev=state.sum_sq_dev + dev * dev,
        sum_x=state.sum_x + x,
        sum_x_sq=state.sum_x_sq + x * x,
        sum_lambda_sq=state.sum_lambda_sq + lam * lam,
        history=None if state.history is None else state.history + (x,),
    )


def predictable_min_wealth(state: PathState, lam_next: float, null: NullSpec) -> float:
    """Worst-case next-step wealth given the fraction about to be bet.

    Computed in the linear domain (not via exp of a log sum) so the two-point
    minimum is exact whenever the current wealth is finite.
    """
    bounds = fraction_bounds(null)
    if not bounds.contains(lam_next):
        raise ValueError(f"fraction {lam_next} outside {bounds}")
    if state.bankrupt:
        return 0.0
    w = math.exp(state.log_wealth)
    m = null.m
    return w * min(1.0 + lam_next * (0.0 - m), 1.0 + lam_next * (1.0 - m))
