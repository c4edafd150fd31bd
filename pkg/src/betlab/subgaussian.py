"""Sub-Gaussian test processes for unbounded observations.

The plug-in process multiplies exp(((x-m)^2 - (x-lam)^2)/2) per round; its
limit is positive exactly when sum (lam_k - m)^2 converges. The Gaussian-prior
mixture has a closed form (Gaussian conjugacy), optionally with an atom at m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class SubgState:
    """Running statistics of one sub-Gaussian test path."""

    n: int = 0
    log_m: float = 0.0
    sum_dev: float = 0.0
    sum_lambda_dev_sq: float = 0.0


def subg_plugin_update(state: SubgState, lam: float, x: float, m: float) -> SubgState:
    """One plug-in round; the exponential form never reaches exactly 0."""
    return replace(
        state,
        n=state.n + 1,
        log_m=state.log_m + ((x - m) ** 2 - (x - lam) ** 2) / 2.0,
        sum_dev=state.sum_dev + (x - m),
        sum_lambda_dev_sq=state.sum_lambda_dev_sq + (lam - m) ** 2,
    )


def subg_gaussian_mixture_log(n: int, sum_dev: float, tau: float, m: float) -> float:
    """log of the Normal(m, tau^2)-mixture value after n rounds."""
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    denom = 1.0 + n * tau * tau
    return -0.5 * math.log(denom) + (tau * tau * sum_dev * sum_dev) / (2.0 * denom)


def subg_gaussian_mixture(state: SubgState, tau: float, m: float) -> float:
    """Closed-form Normal(m, tau^2)-prior mixture of the sub-Gaussian martingales."""
    return math.exp(subg_gaussian_mixture_log(state.n, state.sum_dev, tau, m))


def subg_atom_mixture(state: SubgState, atom_at_m: float, tau: float, m: float) -> float:
    """Mixture with mass atom_at_m frozen at lam = m (its martingale is constant 1)."""
    if not (0.0 <= atom_at_m <= 1.0):
        raise ValueError("atom_at_m must lie in [0,1]")
    return atom_at_m + (1.0 - atom_at_m) * subg_gaussian_mixture(state, tau, m)
