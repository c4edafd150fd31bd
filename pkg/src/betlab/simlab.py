"""Seeded samplers, the deterministic ensemble runner, and cross-path statistics.

Every path is a pure function of (distribution, horizon, master_seed, path
index): seeds are split per path with a counter-based scheme, so results are
identical for any worker count and unchanged for existing paths when the path
count grows.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy.special import gammainc

from . import _opt, kernels
from .core import NullSpec, fraction_bounds
from .strategies import (
    GRAPA_TOL,
    MixtureSpec,
    Strategy,
    bet_times_mask,
    build_mixture,
    scaled_bounds,
    validate_strategy,
)

QUANTILE_LEVELS = (0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99)
BANKRUPT_THRESHOLDS = (1e-2, 1e-6)
_BOUNDED_KINDS = {"bernoulli", "scaled_beta", "discrete", "point_mass"}
_SUBG_STRATEGIES = {"subg_plugin", "subg_mixture"}


# ---------------------------------------------------------------------------
# distributions


@dataclass(frozen=True)
class DistSpec:
    """Observation distribution for simulated paths."""

    kind: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        p = self.params
        if self.kind == "bernoulli":
            if not (0.0 <= p["p"] <= 1.0):
                raise ValueError("bernoulli p must lie in [0,1]")
        elif self.kind == "scaled_beta":
            if p["a"] <= 0 or p["b"] <= 0:
                raise ValueError("beta parameters must be positive")
        elif self.kind == "discrete":
            pts = np.asarray(p["points"], dtype=float)
            pr = np.asarray(p["probs"], dtype=float)
            if len(pts) != len(pr) or len(pts) == 0:
                raise ValueError("discrete needs matching nonempty points/probs")
            if np.any(pr < 0) or abs(pr.sum() - 1.0) > 1e-9:
                raise ValueError("discrete probs must be nonnegative and sum to 1")
            if np.any(pts < 0) or np.any(pts > 1):
                raise ValueError("discrete support must lie in [0,1]")
        elif self.kind == "point_mass":
            if not (0.0 <= p["value"] <= 1.0):
                raise ValueError("point mass must lie in [0,1]")
        elif self.kind == "normal":
            if p["sigma"] < 0:
                raise ValueError("sigma must be nonnegative")
        else:
            raise ValueError(f"unknown distribution kind {self.kind!r}")

    @property
    def mean(self) -> float:
        p = self.params
        if self.kind == "bernoulli":
            return float(p["p"])
        if self.kind == "scaled_beta":
            return p["a"] / (p["a"] + p["b"])
        if self.kind == "discrete":
            return float(np.dot(p["points"], p["probs"]))
        if self.kind == "point_mass":
            return float(p["value"])
        return float(p["mu"])

    @property
    def variance(self) -> float:
        p = self.params
        if self.kind == "bernoulli":
            return p["p"] * (1.0 - p["p"])
        if self.kind == "scaled_beta":
            a, b = p["a"], p["b"]
            return a * b / ((a + b) ** 2 * (a + b + 1.0))
        if self.kind == "discrete":
            pts = np.asarray(p["points"], dtype=float)
            pr = np.asarray(p["probs"], dtype=float)
            mu = float(np.dot(pts, pr))
            return float(np.dot(pr, (pts - mu) ** 2))
        if self.kind == "point_mass":
            return 0.0
        return float(p["sigma"]) ** 2

    @property
    def is_degenerate(self) -> bool:
        return self.variance == 0.0

    @property
    def is_bounded(self) -> bool:
        return self.kind in _BOUNDED_KINDS

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        p = self.params
        if self.kind == "bernoulli":
            return np.where(rng.random(n) < p["p"], 1.0, 0.0)
        if self.kind == "scaled_beta":
            return np.clip(rng.beta(p["a"], p["b"], size=n), 0.0, 1.0)
        if self.kind == "discrete":
            cum = np.cumsum(np.asarray(p["probs"], dtype=float))
            idx = np.searchsorted(cum, rng.random(n), side="right")
            idx = np.minimum(idx, len(cum) - 1)
            return np.asarray(p["points"], dtype=float)[idx]
        if self.kind == "point_mass":
            return np.full(n, float(p["value"]))
        return rng.normal(p["mu"], p["sigma"], size=n)

    def to_config(self) -> dict[str, Any]:
        return {"kind": self.kind, **self.params}

    @staticmethod
    def from_config(cfg: dict[str, Any]) -> "DistSpec":
        cfg = dict(cfg)
        kind = cfg.pop("kind")
        return DistSpec(kind=kind, params=cfg)


def bernoulli(p: float) -> DistSpec:
    return DistSpec("bernoulli", {"p": float(p)})


def scaled_beta(a: float, b: float) -> DistSpec:
    return DistSpec("scaled_beta", {"a": float(a), "b": float(b)})


def discrete_on01(points: Sequence[float], probs: Sequence[float]) -> DistSpec:
    return DistSpec("discrete", {"points": [float(v) for v in points], "probs": [float(v) for v in probs]})


def point_mass(value: float) -> DistSpec:
    return DistSpec("point_mass", {"value": float(value)})


def normal(mu: float, sigma: float) -> DistSpec:
    return DistSpec("normal", {"mu": float(mu), "sigma": float(sigma)})


# ---------------------------------------------------------------------------
# seeding and sampling


def derive_path_seed(master_seed: int, path_index: int) -> int:
    """Splittable 64-bit per-path seed; stable across platforms and path counts."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(path_index,))
    return int(ss.generate_state(1, np.uint64)[0])


def sample_path(dist: DistSpec, n: int, path_seed: int) -> np.ndarray:
    """Deterministic observation sequence from a counter-based generator."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    rng = np.random.Generator(np.random.Philox(key=path_seed))
    return dist.sample(rng, n)


# ---------------------------------------------------------------------------
# experiment configuration


@dataclass(frozen=True)
class ExperimentConfig:
    dist: DistSpec
    null_m: float
    strategy: Strategy
    horizon: int
    paths: int
    checkpoints: tuple[int, ...]
    master_seed: int

    def __post_init__(self):
        if self.horizon < 0 or self.paths < 0:
            raise ValueError("horizon and paths must be nonnegative")
        cks = tuple(int(c) for c in self.checkpoints)
        if list(cks) != sorted(cks):
            raise ValueError("checkpoints must be sorted")
        if any(c < 1 or c > self.horizon for c in cks):
            raise ValueError("checkpoints must lie in [1, horizon]")
        object.__setattr__(self, "checkpoints", cks)
        if self.strategy.kind in _SUBG_STRATEGIES:
            # sub-Gaussian processes test any real mean on unbounded data
            validate_strategy(self.strategy, None)
        else:
            validate_strategy(self.strategy, NullSpec(self.null_m))
            if not self.dist.is_bounded:
                raise ValueError("bounded-mean strategies need a [0,1]-supported distribution")

    def to_config(self) -> dict[str, Any]:
        return {
            "dist": self.dist.to_config(),
            "null_m": self.null_m,
            "strategy": self.strategy.to_config(),
            "horizon": self.horizon,
            "paths": self.paths,
            "checkpoints": list(self.checkpoints),
            "master_seed": self.master_seed,
        }

    @staticmethod
    def from_config(cfg: dict[str, Any]) -> "ExperimentConfig":
        return ExperimentConfig(
            dist=DistSpec.from_config(cfg["dist"]),
            null_m=float(cfg["null_m"]),
            strategy=Strategy.from_config(cfg["strategy"]),
            horizon=int(cfg["horizon"]),
            paths=int(cfg["paths"]),
            checkpoints=tuple(int(c) for c in cfg["checkpoints"]),
            master_seed=int(cfg["master_seed"]),
        )


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get("BETLAB_WORKERS", "").strip()
        workers = int(env) if env else 1
    if workers < 1:
        raise ValueError("workers must be at least 1")
    return workers


# ---------------------------------------------------------------------------
# per-path evaluation


def _plugin_fractions(strategy: Strategy, x: np.ndarray, null: NullSpec, kern) -> np.ndarray:
    kind, p = strategy.kind, strategy.params
    m = null.m
    if kind == "fixed":
        return np.full(len(x), p["lam"])
    if kind == "kt":
        lo, hi = scaled_bounds(null, p.get("safety", 1.0))
        return kern.kt_fractions(x, m, p["c"], lo, hi)
    if kind == "grapa":
        lo, hi = scaled_bounds(null, p.get("safety", 1.0))
        return kern.grapa_fractions(x, m, lo, hi, p.get("tol", GRAPA_TOL))
    if kind == "agrapa":
        return kern.agrapa_fractions(x, m, p["c"])
    raise ValueError(f"{kind} is not a plain plug-in strategy")


def evaluate_path(
    strategy: Strategy,
    x: np.ndarray,
    null: NullSpec,
    kern=None,
    mixture: MixtureSpec | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """(fractions, log-wealth) along one path; lam[t] is predictable at step t+1."""
    kern = kern or kernels.active()
    kind, p = strategy.kind, strategy.params
    m = null.m
    if kind == "hedged":
        lam = kern.prh_fractions(x, m, p["alpha"], p["c"])
        return lam, kern.hedged_logw(x, lam, m)
    if kind in ("mixture_beta", "mixture_robbins"):
        spec = mixture if mixture is not None else build_mixture(strategy, null)
        logw, lam = kern.mixture_path(x, m, spec.lams, spec.weights, spec.atom0)
        return lam, logw
    if kind == "intermittent":
        inner = _plugin_fractions(p["inner"], x, null, kern)
        lam = np.where(bet_times_mask(len(x), p["alpha_exp"]), inner, 0.0)
        return lam, kern.plugin_logw(x, lam, m)
    if kind == "leveraged":
        inner_strategy = p["inner"]
        if inner_strategy.kind in ("mixture_beta", "mixture_robbins"):
            spec = build_mixture(inner_strategy, null)
            _, inner = kern.mixture_path(x, m, spec.lams, spec.weights, spec.atom0)
        else:
            inner = _plugin_fractions(inner_strategy, x, null, kern)
        lam = kern.leverage_fractions(x, inner, m, p["rho"])
        return lam, kern.plugin_logw(x, lam, m)
    lam = _plugin_fractions(strategy, x, null, kern)
    return lam, kern.plugin_logw(x, lam, m)


def evaluate_subg_path(strategy: Strategy, x: np.ndarray, m: float) -> tuple[np.ndarray, np.ndarray]:
    """(fractions, log test-process value) for the sub-Gaussian strategies."""
    p = strategy.params
    T = len(x)
    n = np.arange(1, T + 1, dtype=float)
    if strategy.kind == "subg_plugin":
        scale = p.get("scale", 1.0)
        if p["schedule"] == "inv_k":
            lam = m + scale / n
        elif p["schedule"] == "inv_sqrt_k":
            lam = m + scale / np.sqrt(n)
        else:
            lam = np.full(T, p["lam"])
        logm = np.cumsum(((x - m) ** 2 - (x - lam) ** 2) / 2.0)
        return lam, logm
    if strategy.kind == "subg_mixture":
        tau, atom = p["tau"], p.get("atom", 0.0)
        s = np.cumsum(x - m)
        t2 = tau * tau
        denom = 1.0 + n * t2
        log_gauss = -0.5 * np.log(denom) + t2 * s * s / (2.0 * denom)
        if atom > 0.0:
            logm = np.logaddexp(math.log(atom), math.log1p(-atom) + log_gauss)
        else:
            logm = log_gauss
        # implied predictable fraction: atom-weighted Gaussian posterior mean
        s_prev = np.concatenate([[0.0], s[:-1]])
        n_prev = n - 1.0
        lam_gauss = m + t2 * s_prev / (1.0 + n_prev * t2)
        if atom > 0.0:
            mg_prev = np.concatenate(
                [[1.0], np.exp(np.minimum(log_gauss[:-1], 700.0))]
            )
            lam = (atom * m + (1.0 - atom) * mg_prev * lam_gauss) / (atom + (1.0 - atom) * mg_prev)
        else:
            lam = lam_gauss
        return lam, logm
    raise ValueError(f"not a sub-Gaussian strategy: {strategy.kind}")


# ---------------------------------------------------------------------------
# ensemble running


@dataclass
class EnsembleSummary:
    """Cross-path statistics at each checkpoint plus the raw per-path samples."""

    checkpoints: tuple[int, ...]
    paths: int
    quantile_levels: tuple[float, ...] = QUANTILE_LEVELS
    # aggregates, one row per checkpoint
    wealth_quantiles: np.ndarray = field(default_factory=lambda: np.zeros((0, len(QUANTILE_LEVELS))))
    sos_quantiles: np.ndarray = field(default_factory=lambda: np.zeros((0, len(QUANTILE_LEVELS))))
    bankrupt_frac_1e2: np.ndarray = field(default_factory=lambda: np.zeros(0))
    bankrupt_frac_1e6: np.ndarray = field(default_factory=lambda: np.zeros(0))
    mean_sqrtn_lambda: np.ndarray = field(default_factory=lambda: np.zeros(0))
    var_sqrtn_lambda: np.ndarray = field(default_factory=lambda: np.zeros(0))
    tn_mean: np.ndarray = field(default_factory=lambda: np.zeros(0))
    # per-path samples, shape (paths, checkpoints)
    logw: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    lam: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    sum_lambda_sq: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    tn: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    chi_sq: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    sup_logw: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    bankrupt_step: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def wealth(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.logw)

    def sup_wealth(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.sup_logw)

    def sos_classification_counts(self) -> dict[str, int]:
        """Horizon-label counts per path (diagnostic only, never fed back).

        The finite-horizon dichotomy surrogate: all-in loss if the path hit
        exact bankruptcy; otherwise "diverging" when the squared-fraction sum
        is large or still grew materially between the last two checkpoints.
        """
        from .diagnostics import SosClassification, SosLedger, classify_sos

        counts = {c.value: 0 for c in SosClassification}
        if self.paths == 0:
            return counts
        final = self.sum_lambda_sq[:, -1]
        prev = self.sum_lambda_sq[:, -2] if self.sum_lambda_sq.shape[1] >= 2 else np.zeros_like(final)
        for i in range(self.paths):
            ledger = SosLedger(sum_lambda_sq=float(final[i]), allin_hit=bool(self.bankrupt_step[i] >= 0))
            label = classify_sos(ledger, float(final[i] - prev[i]))
            counts[label.value] += 1
        return counts

    def to_dict(self, include_samples: bool = True) -> dict[str, Any]:
        out: dict[str, Any] = {
            "checkpoints": list(self.checkpoints),
            "paths": self.paths,
            "quantile_levels": list(self.quantile_levels),
            "wealth_quantiles": self.wealth_quantiles.tolist(),
            "sos_quantiles": self.sos_quantiles.tolist(),
            "bankrupt_frac_1e2": self.bankrupt_frac_1e2.tolist(),
            "bankrupt_frac_1e6": self.bankrupt_frac_1e6.tolist(),
            "mean_sqrtn_lambda": self.mean_sqrtn_lambda.tolist(),
            "var_sqrtn_lambda": self.var_sqrtn_lambda.tolist(),
            "tn_mean": self.tn_mean.tolist(),
        }
        if include_samples:
            out["samples"] = {
                "logw": self.logw.tolist(),
                "lam": self.lam.tolist(),
                "sum_lambda_sq": self.sum_lambda_sq.tolist(),
                "tn": self.tn.tolist(),
                "chi_sq": self.chi_sq.tolist(),
                "sup_logw": self.sup_logw.tolist(),
                "bankrupt_step": self.bankrupt_step.tolist(),
            }
        return out


def _path_record(
    x: np.ndarray,
    lam: np.ndarray,
    logw: np.ndarray,
    idx: np.ndarray,
    m: float,
    kern,
    want_chisq: bool,
    lo: float,
    hi: float,
):
    T = len(x)
    dev_sums = np.cumsum(x - m)
    steps = np.arange(1, T + 1, dtype=float)
    tn_full = np.cumsum((dev_sums / steps) ** 2)
    sup_full = np.maximum.accumulate(logw)
    sos_full = np.cumsum(lam * lam)
    chis = np.full(len(idx), np.nan)
    if want_chisq:
        uniq = np.unique(x)
        if len(uniq) <= 8:
            # prefix counts per support point beat re-sorting each prefix
            codes = np.searchsorted(uniq, x)
            for j, t in enumerate(idx):
                counts = np.bincount(codes[: t + 1], minlength=len(uniq)).astype(float)
                _, lstar = _opt.argmax_and_value(uniq, counts, m, lo, hi, GRAPA_TOL)
                chis[j] = 2.0 * lstar
        else:
            for j, t in enumerate(idx):
                _, lstar = kern.klinf_value(x[: t + 1], m, lo, hi, GRAPA_TOL)
                chis[j] = 2.0 * lstar
    dead = np.flatnonzero(np.isneginf(logw))
    bankrupt_step = int(dead[0]) + 1 if len(dead) else -1
    return (
        logw[idx],
        lam[idx],
        sos_full[idx],
        tn_full[idx],
        chis,
        sup_full[idx],
        bankrupt_step,
    )


def run_ensemble(config: ExperimentConfig, workers: int | None = None) -> EnsembleSummary:
    """Simulate the configured ensemble; output is independent of worker count."""
    kern = kernels.active()
    workers = resolve_workers(workers)
    cks = np.asarray(config.checkpoints, dtype=np.int64)
    P, C = config.paths, len(cks)
    idx = cks - 1

    is_subg = config.strategy.kind in _SUBG_STRATEGIES
    want_chisq = not is_subg
    null = None if is_subg else NullSpec(config.null_m)
    b_lo, b_hi = (0.0, 0.0) if is_subg else (
        fraction_bounds(null).lo,
        fraction_bounds(null).hi,
    )
    mixture = (
        build_mixture(config.strategy, null)
        if config.strategy.kind in ("mixture_beta", "mixture_robbins")
        else None
    )

    logw = np.zeros((P, C))
    lam = np.zeros((P, C))
    sos = np.zeros((P, C))
    tn = np.zeros((P, C))
    chi = np.zeros((P, C))
    sup = np.zeros((P, C))
    bstep = np.full(P, -1, dtype=np.int64)

    m_val = config.null_m

    def run_block(lo_i: int, hi_i: int) -> None:
        for i in range(lo_i, hi_i):
            x = sample_path(config.dist, config.horizon, derive_path_seed(config.master_seed, i))
            if is_subg:
                lam_i, logw_i = evaluate_subg_path(config.strategy, x, m_val)
                lam_dev = lam_i - m_val
                sos_i = np.cumsum(lam_dev * lam_dev)
            else:
                lam_i, logw_i = evaluate_path(config.strategy, x, null, kern, mixture)
                sos_i = None
            row = _path_record(x, lam_i, logw_i, idx, m_val, kern, want_chisq, b_lo, b_hi)
            logw[i], lam[i], sos[i], tn[i], chi[i], sup[i], bstep[i] = row
            if sos_i is not None:
                sos[i] = sos_i[idx]

    if P > 0 and config.horizon > 0:
        if workers <= 1 or P == 1:
            run_block(0, P)
        else:
            n_blocks = min(P, workers * 4)
            bounds = np.linspace(0, P, n_blocks + 1, dtype=int)
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [
                    pool.submit(run_block, int(lo_i), int(hi_i))
                    for lo_i, hi_i in zip(bounds[:-1], bounds[1:])
                    if hi_i > lo_i
                ]
                for f in futures:
                    f.result()

    summary = EnsembleSummary(checkpoints=config.checkpoints, paths=P)
    summary.logw, summary.lam, summary.sum_lambda_sq = logw, lam, sos
    summary.tn, summary.chi_sq, summary.sup_logw, summary.bankrupt_step = tn, chi, sup, bstep
    if P > 0:
        with np.errstate(over="ignore"):
            wealth = np.exp(logw)
        q = np.asarray(QUANTILE_LEVELS)
        summary.wealth_quantiles = np.quantile(wealth, q, axis=0).T
        summary.sos_quantiles = np.quantile(sos, q, axis=0).T
        summary.bankrupt_frac_1e2 = (wealth < BANKRUPT_THRESHOLDS[0]).mean(axis=0)
        summary.bankrupt_frac_1e6 = (wealth < BANKRUPT_THRESHOLDS[1]).mean(axis=0)
        sqrtn_lam = np.sqrt(cks.astype(float)) * lam
        summary.mean_sqrtn_lambda = sqrtn_lam.mean(axis=0)
        summary.var_sqrtn_lambda = (
            sqrtn_lam.var(axis=0, ddof=1) if P > 1 else np.full(C, np.nan)
        )
        summary.tn_mean = tn.mean(axis=0)
    else:
        summary.wealth_quantiles = np.zeros((0, len(QUANTILE_LEVELS)))
        summary.sos_quantiles = np.zeros((0, len(QUANTILE_LEVELS)))
    return summary


# ---------------------------------------------------------------------------
# cross-path statistics


def chi2_cdf(x) -> np.ndarray:
    """Chi-square(1) CDF via the regularized lower incomplete gamma function."""
    arr = np.asarray(x, dtype=float)
    return gammainc(0.5, np.maximum(arr, 0.0) / 2.0)


def ks_distance(samples, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """One-sample Kolmogorov-Smirnov statistic against a given CDF."""
    s = np.sort(np.asarray(samples, dtype=float))
    n = len(s)
    if n == 0:
        raise ValueError("ks_distance needs a nonempty sample")
    f = np.asarray(cdf(s), dtype=float)
    d_plus = np.max(np.arange(1, n + 1) / n - f)
    d_minus = np.max(f - np.arange(0, n) / n)
    return float(max(d_plus, d_minus))


def ville_violation_rate(sup_wealths, x: float) -> float:
    """Fraction of paths whose running sup wealth reached x (expect <= 1/x under a null)."""
    if x <= 1.0:
        raise ValueError("x must exceed 1")
    arr = np.asarray(sup_wealths, dtype=float)
    if len(arr) == 0:
        return 0.0
    return float(np.mean(arr >= x))


# ---------------------------------------------------------------------------
# confidence-sequence inversion


@dataclass(frozen=True)
class ConfseqResult:
    """Grid-inversion output: retained-null masks per requested checkpoint."""

    grid: np.ndarray
    checkpoints: tuple[int, ...]
    ci_mask: np.ndarray  # (C, G): W_n(m) <= 1/alpha
    run_mask: np.ndarray  # (C, G): max_{k<=n} W_k(m) <= 1/alpha

    def interval(self, row: int, running: bool = False) -> tuple[float, float]:
        mask = (self.run_mask if running else self.ci_mask)[row]
        kept = self.grid[mask]
        if len(kept) == 0:
            return (math.nan, math.nan)
        return (float(kept[0]), float(kept[-1]))

    def contains(self, m_true: float, row: int, running: bool = False) -> bool:
        mask = (self.run_mask if running else self.ci_mask)[row]
        j = int(np.argmin(np.abs(self.grid - m_true)))
        return bool(mask[j])


def invert_confidence_set(
    path: np.ndarray,
    alpha: float,
    grid_step: float,
    family: str = "hedged",
    checkpoints: Sequence[int] | None = None,
    c_clip: float = 0.5,
    kern=None,
) -> ConfseqResult:
    """Re-run the family's wealth at every grid null and retain the unrejected ones."""
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie in (0,1)")
    if grid_step <= 0.0:
        raise ValueError("grid_step must be positive")
    if family != "hedged":
        raise ValueError(f"unsupported confidence-sequence family {family!r}")
    kern = kern or kernels.active()
    x = np.asarray(path, dtype=float)
    k = int(round(1.0 / grid_step))
    grid = np.arange(1, k) * grid_step
    cks = tuple(int(c) for c in (checkpoints if checkpoints is not None else [len(x)]))
    if any(c < 0 or c > len(x) for c in cks):
        raise ValueError("checkpoints must lie in [0, len(path)]")
    logw = kern.hedged_grid_logw(x, grid, alpha, c_clip)
    run = np.maximum.accumulate(logw, axis=1)
    thresh = -math.log(alpha)
    ci = np.empty((len(cks), len(grid)), dtype=bool)
    rn = np.empty((len(cks), len(grid)), dtype=bool)
    for row, c in enumerate(cks):
        if c == 0:
            ci[row] = True
            rn[row] = True
        else:
            ci[row] = logw[:, c - 1] <= thresh
            rn[row] = run[:, c - 1] <= thresh
    return ConfseqResult(grid=grid, checkpoints=cks, ci_mask=ci, run_mask=rn)
