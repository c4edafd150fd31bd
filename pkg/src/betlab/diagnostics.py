"""Quantities the convergence dichotomies are stated in terms of.

Sum of squared fractions and the all-in event (bankruptcy criterion), the
predictably-non-bankrupt event, the hindsight-max log-wealth / KL_inf dual
with its chi-square statistic, pathwise regret, and the sum S_n^2/n^2 whose
divergence drives the square-root-rate bankruptcies.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from . import _opt
from .core import TOL_ZERO, NullSpec, fraction_bounds
from .strategies import GRAPA_TOL

# Finite-horizon surrogate thresholds for an infinite-horizon dichotomy;
# reported as diagnostics only, never fed back into a simulation.
SOS_TOTAL_THRESHOLD = 25.0
SOS_INCREMENT_THRESHOLD = 0.5


class SosClassification(enum.Enum):
    SUM_FINITE_PREDICTION = "sum_finite_prediction"
    SUM_DIVERGING_PREDICTION = "sum_diverging_prediction"
    ALL_IN_LOSS = "all_in_loss"


@dataclass(frozen=True)
class SosLedger:
    """Running sum of squared bet fractions plus the all-in-loss flag."""

    sum_lambda_sq: float = 0.0
    allin_hit: bool = False


def sos_update(ledger: SosLedger, lam: float, multiplier: float) -> SosLedger:
    return SosLedger(
        sum_lambda_sq=ledger.sum_lambda_sq + lam * lam,
        allin_hit=ledger.allin_hit or multiplier <= TOL_ZERO,
    )


def classify_sos(ledger: SosLedger, last_decade_increment: float) -> SosClassification:
    """Heuristic horizon label: diverging if the sum is large or still growing."""
    if ledger.allin_hit:
        return SosClassification.ALL_IN_LOSS
    if ledger.sum_lambda_sq > SOS_TOTAL_THRESHOLD or last_decade_increment > SOS_INCREMENT_THRESHOLD:
        return SosClassification.SUM_DIVERGING_PREDICTION
    return SosClassification.SUM_FINITE_PREDICTION


@dataclass(frozen=True)
class KlinfResult:
    lambda_kl: float
    l_star: float
    chi_sq: float


def klinf(history, null: NullSpec, tol: float = GRAPA_TOL) -> KlinfResult:
    """Hindsight-max log-wealth (the KL_inf dual) and its chi-square statistic."""
    hist = np.asarray(history, dtype=float)
    if hist.size == 0:
        raise ValueError("klinf needs a nonempty history")
    b = fraction_bounds(null)
    vals, counts = np.unique(hist, return_counts=True)
    lam, l_star = _opt.argmax_and_value(vals, counts.astype(float), null.m, b.lo, b.hi, tol)
    return KlinfResult(lambda_kl=lam, l_star=l_star, chi_sq=2.0 * l_star)


def regret(l_star: float, log_wealth: float) -> float:
    """Hindsight-max log-wealth minus realized log-wealth; +inf on bankrupt paths."""
    if log_wealth == -math.inf:
        return math.inf
    return l_star - log_wealth


def pnb_check(min_wealths, rho: float) -> bool:
    """Whether the predictable next-step minimum wealth stayed above rho throughout."""
    if rho <= 0.0:
        raise ValueError("rho must be positive")
    arr = np.asarray(min_wealths, dtype=float)
    return bool(np.all(arr > rho))


@dataclass(frozen=True)
class TnTracker:
    """Running sum of S_n^2/n^2 for the deviation sums S_n."""

    t_n: float = 0.0


def tn_update(tracker: TnTracker, sum_dev: float, n: int) -> TnTracker:
    if n < 1:
        raise ValueError("n must be at least 1")
    return replace(tracker, t_n=tracker.t_n + (sum_dev * sum_dev) / (float(n) * float(n)))
