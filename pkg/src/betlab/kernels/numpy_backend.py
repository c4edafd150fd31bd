"""Pure-numpy path kernels: the fallback lane and the reference semantics.

Every function consumes one path's observation array ``x`` (float64, shape
(T,)) and returns per-step arrays. ``lam[t]`` is always the fraction bet at
step t+1, i.e. a function of x[:t] only; ``logw[t]`` is the log-wealth after
t+1 steps, -inf once bankrupt (bankruptcy is absorbing).
"""

from __future__ import annotations

import math

import numpy as np

from .. import _opt

NAME = "numpy"
TOL_ZERO = 1e-300
LOG2 = math.log(2.0)


def _prev_cumsum(a: np.ndarray) -> np.ndarray:
    """out[t] = sum(a[:t]); sequential accumulation order."""
    out = np.empty_like(a, dtype=float)
    if len(a) == 0:
        return out
    out[0] = 0.0
    np.cumsum(a[:-1], out=out[1:])
    return out


def kt_fractions(x: np.ndarray, m: float, c: float, lo: float, hi: float) -> np.ndarray:
    s_before = _prev_cumsum(x - m)
    n = np.arange(1, len(x) + 1, dtype=float)
    return np.clip((0.5 + s_before) / (c * n), lo, hi)


def agrapa_fractions(x: np.ndarray, m: float, c_clip: float) -> np.ndarray:
    T = len(x)
    lam = np.zeros(T)
    if T == 0:
        return lam
    sx = _prev_cumsum(x)
    sxx = _prev_cumsum(x * x)
    nprev = np.arange(T, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        mu = sx / nprev
        var = sxx / nprev - mu * mu
    var = np.maximum(var, 0.0)
    dev = mu - m
    denom = var + dev * dev
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = dev / denom
    lam = np.where((nprev > 0) & (denom > 0.0), raw, 0.0)
    return np.clip(lam, -c_clip / (1.0 - m), c_clip / m)


def running_sigma2(x: np.ndarray) -> np.ndarray:
    """Shrunken running variance: out[t] = sigma2 after t observations.

    mu_i = (1/2 + sum_{j<=i} x_j)/(i+1); sigma2_t = (1/4 + sum_{i<=t}(x_i-mu_i)^2)/(t+1);
    out[0] would be sigma2_0 = 1/4 but out is aligned so out[t] = sigma2_t for t>=1
    with a leading 1/4 entry (length T, used as sigma2_{n-1} for step n = t+1).
    """
    T = len(x)
    out = np.full(T, 0.25)
    if T <= 1:
        return out
    i = np.arange(1, T + 1, dtype=float)
    mu = (0.5 + np.cumsum(x)) / (i + 1.0)
    resid = np.cumsum((x - mu) ** 2)
    out[1:] = (0.25 + resid[:-1]) / (i[:-1] + 1.0)
    return out


def prh_fractions(x: np.ndarray, m: float, alpha: float, c_clip: float) -> np.ndarray:
    T = len(x)
    if T == 0:
        return np.zeros(0)
    sig2 = running_sigma2(x)
    n = np.arange(1, T + 1, dtype=float)
    raw = np.sqrt(2.0 * math.log(2.0 / alpha) / (sig2 * n * np.log(n + 1.0)))
    return np.clip(raw, -c_clip / (1.0 - m), c_clip / m)


def grapa_fractions(x: np.ndarray, m: float, lo: float, hi: float, tol: float) -> np.ndarray:
    T = len(x)
    lam = np.zeros(T)
    uniq = np.unique(x)
    uniq = uniq[uniq != m]
    if len(uniq) == 0 or T == 0:
        return lam
    if len(uniq) == 1:
        v = uniq[0]
        c_before = _prev_cumsum((x == v).astype(float))
        ep = hi if v > m else lo
        return np.where(c_before > 0, ep, 0.0)
    if len(uniq) == 2:
        va, vb = uniq[0], uniq[1]
        da, db = va - m, vb - m
        ca = _prev_cumsum((x == va).astype(float))
        cb = _prev_cumsum((x == vb).astype(float))
        if da * db < 0.0:
            with np.errstate(divide="ignore", invalid="ignore"):
                raw = -(ca * da + cb * db) / ((da * db) * (ca + cb))
            lam = np.clip(raw, lo, hi)
        else:
            slope = ca * da + cb * db
            lam = np.where(slope > 0.0, hi, np.where(slope < 0.0, lo, 0.0))
        # single-sided and empty prefixes follow the exact one/zero-point rules
        lam = np.where((ca > 0) & (cb == 0), hi if da > 0 else lo, lam)
        lam = np.where((ca == 0) & (cb > 0), hi if db > 0 else lo, lam)
        lam = np.where(ca + cb == 0, 0.0, lam)
        return lam
    # Many distinct values: incremental exact aggregation, golden section per step.
    counts: dict[float, int] = {}
    for t in range(T):
        if counts:
            vals_arr = np.fromiter(counts.keys(), dtype=float, count=len(counts))
            cnts_arr = np.fromiter(counts.values(), dtype=float, count=len(counts))
            lam[t] = _opt.argmax_counts(vals_arr, cnts_arr, m, lo, hi, tol)
        v = float(x[t])
        if v != m:
            counts[v] = counts.get(v, 0) + 1
    return lam


def klinf_value(x: np.ndarray, m: float, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Hindsight-optimal fraction and max log-wealth over the whole sample."""
    vals, counts = np.unique(x, return_counts=True)
    return _opt.argmax_and_value(vals, counts.astype(float), m, lo, hi, tol)


def plugin_logw(x: np.ndarray, lam: np.ndarray, m: float) -> np.ndarray:
    g = lam * (x - m)
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(1.0 + g <= TOL_ZERO, -np.inf, np.log1p(g))
    return np.cumsum(logs)


def hedged_logw(x: np.ndarray, lam: np.ndarray, m: float) -> np.ndarray:
    g = lam * (x - m)
    with np.errstate(divide="ignore", invalid="ignore"):
        logs_p = np.where(1.0 + g <= TOL_ZERO, -np.inf, np.log1p(g))
        logs_m = np.where(1.0 - g <= TOL_ZERO, -np.inf, np.log1p(-g))
    return np.logaddexp(np.cumsum(logs_p), np.cumsum(logs_m)) - LOG2


def leverage_fractions(x: np.ndarray, lam_inner: np.ndarray, m: float, rho: float) -> np.ndarray:
    T = len(x)
    gamma = np.empty(T)
    log_rho = math.log(rho)
    logw = 0.0  # inner shadow wealth
    for t in range(T):
        lam = lam_inner[t]
        mmin = min(1.0 - lam * m, 1.0 + lam * (1.0 - m))
        if mmin > 0.0 and logw + math.log(mmin) > log_rho:
            gamma[t] = lam / (1.0 - rho * math.exp(-logw))
        else:
            gamma[t] = lam
        g = lam * (x[t] - m)
        if 1.0 + g <= TOL_ZERO:
            logw = -math.inf
        elif logw > -math.inf:
            logw += math.log1p(g)
    return gamma


def mixture_path(
    x: np.ndarray,
    m: float,
    lams: np.ndarray,
    ws: np.ndarray,
    atom0: float,
    chunk: int = 4096,
) -> tuple[np.ndarray, np.ndarray]:
    """Mixture wealth per step plus the implied plug-in fraction per step."""
    T = len(x)
    K = len(lams)
    logw = np.empty(T)
    lam_imp = np.empty(T)
    wl = ws * lams
    uniq = np.unique(x)
    table = None
    if len(uniq) <= 8:
        with np.errstate(divide="ignore", invalid="ignore"):
            g = np.outer(uniq - m, lams)
            table = np.where(1.0 + g <= TOL_ZERO, -np.inf, np.log1p(g))
        idx_all = np.searchsorted(uniq, x)
    carry = np.zeros(K)
    for start in range(0, T, chunk):
        stop = min(start + chunk, T)
        if table is not None:
            logs = table[idx_all[start:stop]]
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                g = np.outer(x[start:stop] - m, lams)
                logs = np.where(1.0 + g <= TOL_ZERO, -np.inf, np.log1p(g))
        post = carry + np.cumsum(logs, axis=0)
        prev = np.vstack([carry, post[:-1]])
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            # row-wise np.sum keeps the reduction order independent of the row
            # count, so prefix replays reproduce fractions bit-for-bit
            mx_prev = prev.max(axis=1)
            safe_prev = np.where(np.isfinite(mx_prev), mx_prev, 0.0)
            e_prev = np.exp(prev - safe_prev[:, None])
            num = np.sum(e_prev * wl, axis=1)
            den = np.sum(e_prev * ws, axis=1)
            lam_imp[start:stop] = np.where(
                np.isfinite(mx_prev), num / (atom0 * np.exp(-safe_prev) + den), 0.0
            )
            # wealth after the step
            mx = post.max(axis=1)
            safe = np.where(np.isfinite(mx), mx, 0.0)
            dens = np.sum(np.exp(post - safe[:, None]) * ws, axis=1)
            log_s = np.where(np.isfinite(mx), safe + np.log(dens), -np.inf)
            if atom0 == 0.0:
                logw[start:stop] = log_s
            else:
                logw[start:stop] = np.log(atom0 + np.exp(log_s))
        carry = post[-1]
    return logw, lam_imp


def hedged_grid_logw(
    x: np.ndarray, m_grid: np.ndarray, alpha: float, c_clip: float
) -> np.ndarray:
    """Hedged log-wealth paths for every null mean on the grid, shape (G, T).

    A leg whose multiplier drops to <= 0 (possible where the printed clip C/m
    exceeds the hedge-legal bound 1/(1-m)) is treated as bankrupt rather than
    carrying negative wealth.
    """
    T = len(x)
    sig2 = running_sigma2(x)
    n = np.arange(1, T + 1, dtype=float)
    base = np.sqrt(2.0 * math.log(2.0 / alpha) / (sig2 * n * np.log(n + 1.0)))
    lam = np.minimum(base[None, :], (c_clip / m_grid)[:, None])
    g = lam * (x[None, :] - m_grid[:, None])
    with np.errstate(divide="ignore", invalid="ignore"):
        logs_p = np.where(1.0 + g <= TOL_ZERO, -np.inf, np.log1p(g))
        logs_m = np.where(1.0 - g <= TOL_ZERO, -np.inf, np.log1p(-g))
    return np.logaddexp(np.cumsum(logs_p, axis=1), np.cumsum(logs_m, axis=1)) - LOG2
