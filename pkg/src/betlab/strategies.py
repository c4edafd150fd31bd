"""Betting strategies: predictable fraction rules and wealth-process rules.

Two layers live here. The per-step operations (kt_fraction, grapa_fraction,
agrapa_fraction, prh_fraction, hedged_update, mixture_update) are the scalar
contract, convenient for small instances and as oracles. The ``Strategy``
descriptor is the configuration object the ensemble runner and the CLI
consume; it maps onto the array kernels in ``betlab.kernels``.

Boundary behavior: KT with C = m(1-m) and GRAPA both emit fractions on the
interval boundary while the sample is one-sided, which makes the all-in-loss
event reachable. That is deliberate (it is part of the bankruptcy dichotomy);
the optional ``safety`` factor in (0,1] shrinks the interval to c*[lo, hi]
for studies of the interior regime. Default 1.0 keeps the exact formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from scipy.special import roots_jacobi

from . import _opt
from .core import TOL_ZERO, NullSpec, PathState, fraction_bounds, wealth_update

GRAPA_TOL = 1e-10
ROBBINS_C = 6.6 * math.e
ROBBINS_LAM_MIN = 1e-10
DEFAULT_NODES = 257

_PLUGIN_KINDS = {"fixed", "kt", "grapa", "agrapa"}
_MIXTURE_KINDS = {"mixture_beta", "mixture_robbins"}


# ---------------------------------------------------------------------------
# strategy descriptor


@dataclass(frozen=True)
class Strategy:
    """Declarative strategy configuration: a kind plus its parameter record."""

    kind: str
    params: dict[str, Any] = field(default_factory=dict)

    def to_config(self) -> dict[str, Any]:
        params = dict(self.params)
        if "inner" in params:
            params["inner"] = params["inner"].to_config()
        return {"kind": self.kind, "params": params}

    @staticmethod
    def from_config(cfg: dict[str, Any]) -> "Strategy":
        params = dict(cfg.get("params", {}))
        if "inner" in params:
            params["inner"] = Strategy.from_config(params["inner"])
        return Strategy(kind=cfg["kind"], params=params)


def fixed_fraction(lam: float, null: NullSpec | None = None) -> Strategy:
    """Strategy that bets the same fraction every round."""
    if null is not None and not fraction_bounds(null).contains(lam):
        raise ValueError(f"fraction {lam} outside {fraction_bounds(null)}")
    return Strategy("fixed", {"lam": float(lam)})


def kt_strategy(c: float, safety: float = 1.0) -> Strategy:
    return Strategy("kt", {"c": float(c), "safety": float(safety)})


def grapa_strategy(tol: float = GRAPA_TOL, safety: float = 1.0) -> Strategy:
    return Strategy("grapa", {"tol": float(tol), "safety": float(safety)})


def agrapa_strategy(c: float = 0.5) -> Strategy:
    return Strategy("agrapa", {"c": float(c)})


def hedged_strategy(alpha: float = 0.05, c: float = 0.5) -> Strategy:
    return Strategy("hedged", {"alpha": float(alpha), "c": float(c)})


def beta_mixture_strategy(
    a: float = 0.5, b: float = 0.5, n_nodes: int = DEFAULT_NODES, atom0: float = 0.0
) -> Strategy:
    return Strategy(
        "mixture_beta",
        {"a": float(a), "b": float(b), "n_nodes": int(n_nodes), "atom0": float(atom0)},
    )


def robbins_mixture_strategy(n_nodes: int = DEFAULT_NODES, atom0: float = 0.0) -> Strategy:
    return Strategy("mixture_robbins", {"n_nodes": int(n_nodes), "atom0": float(atom0)})


def intermittent(inner: Strategy, alpha_exp: float) -> Strategy:
    """Bet the inner strategy's fraction only at steps n in {floor(k^alpha)}."""
    if alpha_exp <= 1.0:
        raise ValueError("alpha_exp must exceed 1")
    if inner.kind not in _PLUGIN_KINDS:
        raise ValueError(f"intermittent inner must be one of {_PLUGIN_KINDS}, got {inner.kind}")
    return Strategy("intermittent", {"inner": inner, "alpha_exp": float(alpha_exp)})


def opportunistic_leverage(inner: Strategy, rho: float) -> Strategy:
    """Leverage the inner strategy whenever its next-step minimum wealth exceeds rho."""
    if not (0.0 < rho < 1.0):
        raise ValueError("rho must lie in (0,1)")
    if inner.kind not in _PLUGIN_KINDS | _MIXTURE_KINDS:
        raise ValueError(f"leverage inner cannot wrap kind {inner.kind}")
    return Strategy("leveraged", {"inner": inner, "rho": float(rho)})


def validate_strategy(strategy: Strategy, null: NullSpec | None) -> None:
    """Raise ValueError for parameter records that are illegal under ``null``.

    ``null`` may be None only for the sub-Gaussian kinds, whose tested mean is
    an unconstrained real.
    """
    kind, p = strategy.kind, strategy.params
    if kind == "subg_plugin":
        if p.get("schedule") not in ("inv_k", "inv_sqrt_k", "fixed"):
            raise ValueError("subg_plugin schedule must be inv_k, inv_sqrt_k, or fixed")
        return
    if kind == "subg_mixture":
        if p["tau"] <= 0.0 or not (0.0 <= p.get("atom", 0.0) <= 1.0):
            raise ValueError("bad sub-Gaussian mixture parameters")
        return
    if null is None:
        raise ValueError(f"strategy kind {kind!r} needs a null mean in (0,1)")
    m = null.m
    if kind == "fixed":
        if not fraction_bounds(null).contains(p["lam"]):
            raise ValueError(f"fixed fraction {p['lam']} outside bounds for m={m}")
    elif kind == "kt":
        if p["c"] < m * (1.0 - m) - 1e-12:
            raise ValueError(f"KT constant {p['c']} below m(1-m)={m * (1 - m)}")
        if not (0.0 < p.get("safety", 1.0) <= 1.0):
            raise ValueError("safety factor must lie in (0,1]")
    elif kind == "grapa":
        if p.get("tol", GRAPA_TOL) <= 0.0:
            raise ValueError("tolerance must be positive")
        if not (0.0 < p.get("safety", 1.0) <= 1.0):
            raise ValueError("safety factor must lie in (0,1]")
    elif kind == "agrapa":
        if not (0.0 < p["c"] < 1.0):
            raise ValueError("aGRAPA clip must lie in (0,1)")
    elif kind == "hedged":
        if not (0.0 < p["alpha"] < 1.0) or not (0.0 < p["c"] < 1.0):
            raise ValueError("hedged strategy needs alpha, c in (0,1)")
    elif kind == "mixture_beta":
        if p["a"] <= 0 or p["b"] <= 0 or p["n_nodes"] < 2 or not (0.0 <= p["atom0"] < 1.0):
            raise ValueError("bad Beta mixture parameters")
    elif kind == "mixture_robbins":
        if p["n_nodes"] < 2 or not (0.0 <= p["atom0"] < 1.0):
            raise ValueError("bad Robbins mixture parameters")
    elif kind == "intermittent":
        if p["alpha_exp"] <= 1.0:
            raise ValueError("alpha_exp must exceed 1")
        validate_strategy(p["inner"], null)
    elif kind == "leveraged":
        if not (0.0 < p["rho"] < 1.0):
            raise ValueError("rho must lie in (0,1)")
        validate_strategy(p["inner"], null)
    else:
        raise ValueError(f"unknown strategy kind {kind!r}")


def scaled_bounds(null: NullSpec, safety: float = 1.0) -> tuple[float, float]:
    b = fraction_bounds(null)
    return safety * b.lo, safety * b.hi


# ---------------------------------------------------------------------------
# per-step fraction operations


def kt_fraction(state: PathState, c: float, null: NullSpec) -> float:
    """Smoothed-mean plug-in fraction for the upcoming step."""
    m = null.m
    if c < m * (1.0 - m) - 1e-12:
        raise ValueError(f"KT constant {c} below m(1-m)={m * (1 - m)}")
    n = state.n + 1
    raw = (0.5 + state.sum_dev) / (c * n)
    return fraction_bounds(null).clip(raw)


def grapa_fraction(history, null: NullSpec, tol: float = GRAPA_TOL) -> float:
    """Hindsight-optimal fixed fraction on the observed history (follow-the-leader)."""
    if tol <= 0.0:
        raise ValueError("tolerance must be positive")
    hist = np.asarray(history, dtype=float)
    if hist.size == 0:
        return 0.0
    b = fraction_bounds(null)
    vals, counts = np.unique(hist, return_counts=True)
    return _opt.argmax_counts(vals, counts.astype(float), null.m, b.lo, b.hi, tol)


def agrapa_fraction(state: PathState, c: float, null: NullSpec) -> float:
    """Clipped mean-over-second-moment approximation to GRAPA."""
    if not (0.0 < c < 1.0):
        raise ValueError("aGRAPA clip must lie in (0,1)")
    m = null.m
    nprev = state.n
    if nprev == 0:
        return 0.0
    mu = state.sum_x / nprev
    var = max(state.sum_x_sq / nprev - mu * mu, 0.0)
    dev = mu - m
    denom = var + dev * dev
    if denom <= 0.0:
        return 0.0
    return min(max(dev / denom, -c / (1.0 - m)), c / m)


def _shrunken_sigma2(history) -> float:
    """Running shrunken variance after the observed prefix; 1/4 on no data."""
    sx = 0.0
    resid = 0.0
    for i, xi in enumerate(history, start=1):
        sx += xi
        mu = (0.5 + sx) / (i + 1.0)
        resid += (xi - mu) ** 2
    return (0.25 + resid) / (len(history) + 1.0)


def prh_fraction(state, alpha: float, c: float, null: NullSpec) -> float:
    """Predictable-hedging fraction with the (n log n)^(-1/2) decay profile."""
    if not (0.0 < alpha < 1.0) or not (0.0 < c < 1.0):
        raise ValueError("prh_fraction needs alpha, c in (0,1)")
    m = null.m
    if isinstance(state, HedgedState):
        n = state.plus.n + 1
        sig2 = state.sigma2()
    else:
        n = state.n + 1
        if state.n == 0:
            sig2 = 0.25
        elif state.history is None:
            raise ValueError("prh_fraction needs a history-carrying PathState")
        else:
            sig2 = _shrunken_sigma2(state.history)
    raw = math.sqrt(2.0 * math.log(2.0 / alpha) / (sig2 * n * math.log(n + 1.0)))
    return min(max(raw, -c / (1.0 - m)), c / m)


# ---------------------------------------------------------------------------
# hedged wealth process


@dataclass(frozen=True)
class HedgedState:
    """Two-leg hedge: the +lam and -lam ledgers plus the variance estimator."""

    null: NullSpec
    alpha: float = 0.05
    c: float = 0.5
    plus: PathState = field(default_factory=PathState)
    minus: PathState = field(default_factory=PathState)
    sum_x: float = 0.0
    sum_resid_sq: float = 0.0

    def sigma2(self) -> float:
        return (0.25 + self.sum_resid_sq) / (self.plus.n + 1.0)

    @property
    def log_wealth(self) -> float:
        return float(np.logaddexp(self.plus.log_wealth, self.minus.log_wealth)) - math.log(2.0)

    @property
    def wealth(self) -> float:
        return 0.5 * (self.plus.wealth + self.minus.wealth)


def hedged_update(state: HedgedState, x: float) -> HedgedState:
    """Advance both legs with +/- the current predictable-hedging fraction."""
    lam = prh_fraction(state, state.alpha, state.c, state.null)
    plus = wealth_update(state.plus, lam, x, state.null)
    minus = wealth_update(state.minus, -lam, x, state.null)
    i = plus.n
    sum_x = state.sum_x + x
    mu = (0.5 + sum_x) / (i + 1.0)
    return replace(
        state,
        plus=plus,
        minus=minus,
        sum_x=sum_x,
        sum_resid_sq=state.sum_resid_sq + (x - mu) ** 2,
    )


# ---------------------------------------------------------------------------
# mixture wealth process


@dataclass(frozen=True)
class MixtureSpec:
    """Atom-at-zero weight plus quadrature nodes approximating a prior over fractions."""

    lams: np.ndarray
    weights: np.ndarray
    atom0: float = 0.0
    log_wealths: np.ndarray | None = None

    def __post_init__(self):
        lams = np.asarray(self.lams, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "lams", lams)
        object.__setattr__(self, "weights", weights)
        if self.log_wealths is None:
            object.__setattr__(self, "log_wealths", np.zeros(len(lams)))
        if np.any(lams == 0.0):
            raise ValueError("mixture nodes must not sit at exactly 0; use atom0")
        if np.any(weights <= 0.0):
            raise ValueError("mixture weights must be positive")
        total = self.atom0 + weights.sum()
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"atom0 + weights must sum to 1, got {total}")

    def wealth(self) -> float:
        l = self.log_wealths
        mx = l.max() if len(l) else -math.inf
        if mx == -math.inf:
            return self.atom0
        return self.atom0 + math.exp(mx) * float(np.dot(self.weights, np.exp(l - mx)))

    def implied_fraction(self) -> float:
        """Plug-in fraction reproducing the mixture wealth one step ahead."""
        l = self.log_wealths
        mx = l.max() if len(l) else -math.inf
        if mx == -math.inf:
            return 0.0
        e = np.exp(l - mx)
        num = float(np.dot(self.weights * self.lams, e))
        den = float(np.dot(self.weights, e))
        return num / (self.atom0 * math.exp(-mx) + den)


def mixture_update(spec: MixtureSpec, x: float, null: NullSpec) -> MixtureSpec:
    """Advance every node's log-wealth by one observation."""
    g = spec.lams * (x - null.m)
    with np.errstate(divide="ignore", invalid="ignore"):
        step = np.where(1.0 + g <= TOL_ZERO, -np.inf, np.log1p(g))
    return replace(spec, log_wealths=spec.log_wealths + step)


def with_cash(spec: MixtureSpec, atom0: float) -> MixtureSpec:
    """Overlay a cash atom on a mixture, rescaling the betting component."""
    if not (0.0 <= atom0 < 1.0):
        raise ValueError("atom0 must lie in [0,1)")
    base = spec.weights / (spec.atom0 + spec.weights.sum())
    return MixtureSpec(
        lams=spec.lams, weights=base * (1.0 - atom0), atom0=atom0, log_wealths=spec.log_wealths
    )


def build_beta_mixture(a: float, b: float, n_nodes: int, null: NullSpec) -> MixtureSpec:
    """Quadrature discretization of a Beta(a,b) prior rescaled to [-1,1].

    Gauss-Jacobi nodes match the Beta endpoint weights exactly, which plain
    Gauss-Legendre does not for a,b < 1; the count is rounded up to even so
    no node lands at exactly 0.
    """
    if a <= 0 or b <= 0:
        raise ValueError("Beta parameters must be positive")
    if n_nodes < 2:
        raise ValueError("need at least two nodes")
    n_eff = n_nodes + (n_nodes % 2)
    lams, ws = roots_jacobi(n_eff, b - 1.0, a - 1.0)
    keep = lams != 0.0
    lams, ws = lams[keep], ws[keep]
    return MixtureSpec(lams=lams, weights=ws / ws.sum(), atom0=0.0)


def robbins_density(lam) -> np.ndarray:
    """Iterated-logarithm mixture density on 0 < |lam| <= 1 (integrates to 1)."""
    a = np.abs(np.asarray(lam, dtype=float))
    t = np.log(ROBBINS_C / a)
    k = math.log(math.log(ROBBINS_C))
    return k / (2.0 * a * t * np.log(t) ** 2)


def build_robbins_mixture(n_nodes: int, null: NullSpec) -> MixtureSpec:
    """Symmetric log-spaced discretization of the iterated-logarithm prior.

    The integrable singularity at 0 is truncated at |lam| = 1e-10; weights use
    the midpoint rule in log scale and are renormalized to sum to 1.
    """
    if n_nodes < 2:
        raise ValueError("need at least two nodes")
    half = n_nodes // 2
    edges = np.exp(np.linspace(math.log(ROBBINS_LAM_MIN), 0.0, half + 1))
    nodes = np.sqrt(edges[:-1] * edges[1:])
    wts = robbins_density(nodes) * np.diff(edges)
    lams = np.concatenate([-nodes[::-1], nodes])
    ws = np.concatenate([wts[::-1], wts])
    return MixtureSpec(lams=lams, weights=ws / ws.sum(), atom0=0.0)


def build_mixture(strategy: Strategy, null: NullSpec) -> MixtureSpec:
    """Materialize a mixture descriptor, applying its cash atom if any."""
    p = strategy.params
    if strategy.kind == "mixture_beta":
        spec = build_beta_mixture(p["a"], p["b"], p["n_nodes"], null)
    elif strategy.kind == "mixture_robbins":
        spec = build_robbins_mixture(p["n_nodes"], null)
    else:
        raise ValueError(f"not a mixture strategy: {strategy.kind}")
    atom0 = p.get("atom0", 0.0)
    return with_cash(spec, atom0) if atom0 > 0.0 else spec


# ---------------------------------------------------------------------------
# intermittent bet times


def bet_times_mask(horizon: int, alpha_exp: float) -> np.ndarray:
    """Boolean mask over steps 1..horizon marking n in {floor(k^alpha)}.

    The tiny additive epsilon protects exact-integer powers (e.g. k^2) from
    landing one ulp below the integer.
    """
    mask = np.zeros(horizon, dtype=bool)
    k = 1
    while True:
        idx = int(math.floor(k ** alpha_exp + 1e-9))
        if idx > horizon:
            break
        mask[idx - 1] = True
        k += 1
    return mask
