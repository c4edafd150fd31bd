"""One-dimensional concave maximization of the hindsight log-wealth objective.

The objective lam -> sum_v count_v * log(1 + lam*(v - m)) is concave on the
closed fraction interval and may be -inf only at the endpoints (when 0 or 1
is in the support). Supports of one or two points (excluding values equal to
m, which contribute nothing) admit an exact stationary-point solution; larger
supports use golden-section search. Ties are broken toward 0.
"""

from __future__ import annotations

import math

import numpy as np

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0
MAX_ITER = 200


def log_wealth_objective(vals: np.ndarray, counts: np.ndarray, m: float, lam: float) -> float:
    """sum_v count_v * log(1 + lam*(v-m)); -inf when some multiplier <= 0."""
    total = 0.0
    for v, c in zip(vals, counts):
        g = lam * (v - m)
        if 1.0 + g <= 0.0:
            return -math.inf
        total += c * math.log1p(g)
    return total


def gss_max(f, lo: float, hi: float, tol: float, max_iter: int = MAX_ITER) -> float:
    """Golden-section maximizer of a concave f on [lo, hi] to width <= tol."""
    a, b = lo, hi
    h = b - a
    if h <= tol:
        return 0.5 * (a + b)
    c = a + INVPHI2 * h
    d = a + INVPHI * h
    yc = f(c)
    yd = f(d)
    for _ in range(max_iter):
        if h <= tol:
            break
        if yc > yd:
            b = d
            d = c
            yd = yc
            h = INVPHI * h
            c = a + INVPHI2 * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INVPHI * h
            d = a + INVPHI * h
            yd = f(d)
    return c if yc > yd else d


def argmax_two_point(da: float, ca: float, db: float, cb: float, lo: float, hi: float) -> float:
    """Exact maximizer for a two-point support with deviations da, db != 0."""
    if da * db < 0.0:
        # Stationary point is inside the domain of finiteness; clip to bounds.
        raw = -(ca * da + cb * db) / ((da * db) * (ca + cb))
        return min(max(raw, lo), hi)
    # Same-side support: objective is monotone, maximum at an endpoint.
    slope = ca * da + cb * db
    if slope > 0.0:
        return hi
    if slope < 0.0:
        return lo
    return 0.0


def argmax_counts(
    vals: np.ndarray,
    counts: np.ndarray,
    m: float,
    lo: float,
    hi: float,
    tol: float,
) -> float:
    """Maximizer of the log-wealth objective over [lo, hi] for aggregated data."""
    keep = vals != m
    vals = np.asarray(vals, dtype=float)[keep]
    counts = np.asarray(counts, dtype=float)[keep]
    d = len(vals)
    if d == 0:
        return 0.0
    if d == 1:
        return hi if vals[0] > m else lo
    if d == 2:
        return argmax_two_point(vals[0] - m, counts[0], vals[1] - m, counts[1], lo, hi)

    devs = vals - m

    def f(lam: float) -> float:
        mults = 1.0 + lam * devs
        if np.any(mults <= 0.0):
            return -math.inf
        return float(np.dot(counts, np.log1p(lam * devs)))

    best = gss_max(f, lo, hi, tol)
    fbest = f(best)
    flo = f(lo)
    fhi = f(hi)
    if flo > fbest:
        best, fbest = lo, flo
    if fhi > fbest:
        best, fbest = hi, fhi
    if fbest <= 0.0:
        # f(0) = 0 is always attainable; prefer 0 on ties or numerical dips.
        return 0.0
    return best


def argmax_and_value(
    vals: np.ndarray,
    counts: np.ndarray,
    m: float,
    lo: float,
    hi: float,
    tol: float,
) -> tuple[float, float]:
    """(maximizer, objective value); the value is clamped at >= 0 (lam=0 attains 0)."""
    lam = argmax_counts(vals, counts, m, lo, hi, tol)
    value = log_wealth_objective(np.asarray(vals, dtype=float), np.asarray(counts, dtype=float), m, lam)
    return lam, max(value, 0.0)
