"""Numba-jitted path kernels: same semantics as numpy_backend, loop form.

Per-step sequential recursions (KT sums, GRAPA refits, mixture node updates)
are the hot loops of ensemble runs; @njit turns each path into machine code.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

NAME = "numba"
TOL_ZERO = 1e-300
LOG2 = math.log(2.0)
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0
_MAX_ITER = 200
# node contributions more than this far below the running max are dropped
# (relative error < 1e-17, below double rounding)
_EXP_CUTOFF = -45.0


@njit(cache=True, nogil=True)
def kt_fractions(x, m, c, lo, hi):
    T = x.shape[0]
    lam = np.empty(T)
    s = 0.0
    for t in range(T):
        raw = (0.5 + s) / (c * (t + 1.0))
        if raw < lo:
            raw = lo
        elif raw > hi:
            raw = hi
        lam[t] = raw
        s += x[t] - m
    return lam


@njit(cache=True, nogil=True)
def agrapa_fractions(x, m, c_clip):
    T = x.shape[0]
    lam = np.empty(T)
    lo = -c_clip / (1.0 - m)
    hi = c_clip / m
    sx = 0.0
    sxx = 0.0
    for t in range(T):
        if t == 0:
            lam[t] = 0.0
        else:
            nprev = float(t)
            mu = sx / nprev
            var = sxx / nprev - mu * mu
            if var < 0.0:
                var = 0.0
            dev = mu - m
            denom = var + dev * dev
            if denom > 0.0:
                raw = dev / denom
                if raw < lo:
                    raw = lo
                elif raw > hi:
                    raw = hi
                lam[t] = raw
            else:
                lam[t] = 0.0
        sx += x[t]
        sxx += x[t] * x[t]
    return lam


@njit(cache=True, nogil=True)
def running_sigma2(x):
    T = x.shape[0]
    out = np.empty(T)
    sx = 0.0
    resid = 0.0
    for t in range(T):
        out[t] = 0.25 if t == 0 else (0.25 + resid) / (t + 1.0)
        sx += x[t]
        mu = (0.5 + sx) / (t + 2.0)
        r = x[t] - mu
        resid += r * r
    return out


@njit(cache=True, nogil=True)
def prh_fractions(x, m, alpha, c_clip):
    T = x.shape[0]
    lam = np.empty(T)
    lo = -c_clip / (1.0 - m)
    hi = c_clip / m
    num = 2.0 * math.log(2.0 / alpha)
    sig2 = running_sigma2(x)
    for t in range(T):
        n = t + 1.0
        raw = math.sqrt(num / (sig2[t] * n * math.log(n + 1.0)))
        if raw < lo:
            raw = lo
        elif raw > hi:
            raw = hi
        lam[t] = raw
    return lam


@njit(cache=True, nogil=True)
def _obj_counts(vals, counts, d, m, lam):
    total = 0.0
    for i in range(d):
        g = lam * (vals[i] - m)
        if 1.0 + g <= 0.0:
            return -np.inf
        total += counts[i] * math.log1p(g)
    return total


@njit(cache=True, nogil=True)
def _argmax_counts(vals, counts, d, m, lo, hi, tol):
    # vals[:d] exclude the null mean itself
    if d == 0:
        return 0.0
    if d == 1:
        return hi if vals[0] > m else lo
    if d == 2:
        da = vals[0] - m
        db = vals[1] - m
        ca = counts[0]
        cb = counts[1]
        if da * db < 0.0:
            raw = -(ca * da + cb * db) / ((da * db) * (ca + cb))
            if raw < lo:
                raw = lo
            elif raw > hi:
                raw = hi
            return raw
        slope = ca * da + cb * db
        if slope > 0.0:
            return hi
        if slope < 0.0:
            return lo
        return 0.0
    # golden-section search on the concave objective
    a = lo
    b = hi
    h = b - a
    if h <= tol:
        best = 0.5 * (a + b)
    else:
        c = a + _INVPHI2 * h
        dd = a + _INVPHI * h
        yc = _obj_counts(vals, counts, d, m, c)
        yd = _obj_counts(vals, counts, d, m, dd)
        for _ in range(_MAX_ITER):
            if h <= tol:
                break
            if yc > yd:
                b = dd
                dd = c
                yd = yc
                h = _INVPHI * h
                c = a + _INVPHI2 * h
                yc = _obj_counts(vals, counts, d, m, c)
            else:
                a = c
                c = dd
                yc = yd
                h = _INVPHI * h
                dd = a + _INVPHI * h
                yd = _obj_counts(vals, counts, d, m, dd)
        best = c if yc > yd else dd
    fbest = _obj_counts(vals, counts, d, m, best)
    flo = _obj_counts(vals, counts, d, m, lo)
    fhi = _obj_counts(vals, counts, d, m, hi)
    if flo > fbest:
        best, fbest = lo, flo
    if fhi > fbest:
        best, fbest = hi, fhi
    if fbest <= 0.0:
        return 0.0
    return best


@njit(cache=True, nogil=True)
def grapa_fractions(x, m, lo, hi, tol):
    T = x.shape[0]
    lam = np.empty(T)
    vals = np.empty(T)
    counts = np.empty(T)
    d = 0
    for t in range(T):
        lam[t] = _argmax_counts(vals, counts, d, m, lo, hi, tol)
        v = x[t]
        if v != m:
            found = False
            for i in range(d):
                if vals[i] == v:
                    counts[i] += 1.0
                    found = True
                    break
            if not found:
                vals[d] = v
                counts[d] = 1.0
                d += 1
    return lam


@njit(cache=True, nogil=True)
def klinf_value(x, m, lo, hi, tol):
    # run-length encode the sorted sample, dropping values equal to m
    xs = np.sort(x)
    T = xs.shape[0]
    vals = np.empty(T)
    counts = np.empty(T)
    d = 0
    i = 0
    while i < T:
        v = xs[i]
        c = 1.0
        i += 1
        while i < T and xs[i] == v:
            c += 1.0
            i += 1
        if v != m:
            vals[d] = v
            counts[d] = c
            d += 1
    lam = _argmax_counts(vals, counts, d, m, lo, hi, tol)
    value = _obj_counts(vals, counts, d, m, lam)
    if value < 0.0:
        value = 0.0
    return lam, value


@njit(cache=True, nogil=True)
def plugin_logw(x, lam, m):
    T = x.shape[0]
    logw = np.empty(T)
    acc = 0.0
    for t in range(T):
        g = lam[t] * (x[t] - m)
        if 1.0 + g <= TOL_ZERO:
            acc = -np.inf
        elif acc > -np.inf:
            acc += math.log1p(g)
        logw[t] = acc
    return logw


@njit(cache=True, nogil=True)
def hedged_logw(x, lam, m):
    T = x.shape[0]
    logw = np.empty(T)
    acc_p = 0.0
    acc_m = 0.0
    for t in range(T):
        g = lam[t] * (x[t] - m)
        if 1.0 + g <= TOL_ZERO:
            acc_p = -np.inf
        elif acc_p > -np.inf:
            acc_p += math.log1p(g)
        if 1.0 - g <= TOL_ZERO:
            acc_m = -np.inf
        elif acc_m > -np.inf:
            acc_m += math.log1p(-g)
        logw[t] = np.logaddexp(acc_p, acc_m) - LOG2
    return logw


@njit(cache=True, nogil=True)
def leverage_fractions(x, lam_inner, m, rho):
    T = x.shape[0]
    gamma = np.empty(T)
    log_rho = math.log(rho)
    logw = 0.0
    for t in range(T):
        lam = lam_inner[t]
        a = 1.0 - lam * m
        b = 1.0 + lam * (1.0 - m)
        mmin = a if a < b else b
        if mmin > 0.0 and logw + math.log(mmin) > log_rho:
            gamma[t] = lam / (1.0 - rho * math.exp(-logw))
        else:
            gamma[t] = lam
        g = lam * (x[t] - m)
        if 1.0 + g <= TOL_ZERO:
            logw = -np.inf
        elif logw > -np.inf:
            logw += math.log1p(g)
    return gamma


@njit(cache=True, nogil=True)
def mixture_path(x, m, lams, ws, atom0):
    T = x.shape[0]
    K = lams.shape[0]
    logw = np.empty(T)
    lam_imp = np.empty(T)
    wl = ws * lams
    uniq = np.unique(x)
    use_table = uniq.shape[0] <= 8
    if use_table:
        table = np.empty((uniq.shape[0], K))
        for u in range(uniq.shape[0]):
            dv = uniq[u] - m
            for i in range(K):
                g = lams[i] * dv
                table[u, i] = -np.inf if 1.0 + g <= TOL_ZERO else math.log1p(g)
    else:
        table = np.empty((0, 0))
    l = np.zeros(K)
    for t in range(T):
        # implied plug-in fraction from pre-step node wealths
        mx = -np.inf
        for i in range(K):
            if l[i] > mx:
                mx = l[i]
        if mx == -np.inf:
            lam_imp[t] = 0.0
        else:
            num = 0.0
            den = 0.0
            for i in range(K):
                dlt = l[i] - mx
                if dlt > _EXP_CUTOFF:
                    e = math.exp(dlt)
                    num += wl[i] * e
                    den += ws[i] * e
            lam_imp[t] = num / (atom0 * math.exp(-mx) + den)
        # node updates
        if use_table:
            u = np.searchsorted(uniq, x[t])
            for i in range(K):
                l[i] += table[u, i]
        else:
            dv = x[t] - m
            for i in range(K):
                g = lams[i] * dv
                if 1.0 + g <= TOL_ZERO:
                    l[i] = -np.inf
                elif l[i] > -np.inf:
                    l[i] += math.log1p(g)
        # post-step mixture wealth
        mx = -np.inf
        for i in range(K):
            if l[i] > mx:
                mx = l[i]
        if mx == -np.inf:
            logw[t] = math.log(atom0) if atom0 > 0.0 else -np.inf
        else:
            s = 0.0
            for i in range(K):
                dlt = l[i] - mx
                if dlt > _EXP_CUTOFF:
                    s += ws[i] * math.exp(dlt)
            log_s = mx + math.log(s)
            if atom0 == 0.0:
                logw[t] = log_s
            else:
                logw[t] = math.log(atom0 + math.exp(log_s))
    return logw, lam_imp


@njit(cache=True, nogil=True)
def hedged_grid_logw(x, m_grid, alpha, c_clip):
    T = x.shape[0]
    G = m_grid.shape[0]
    out = np.empty((G, T))
    num = 2.0 * math.log(2.0 / alpha)
    sig2 = running_sigma2(x)
    for gi in range(G):
        mg = m_grid[gi]
        cap = c_clip / mg
        acc_p = 0.0
        acc_m = 0.0
        for t in range(T):
            n = t + 1.0
            lam = math.sqrt(num / (sig2[t] * n * math.log(n + 1.0)))
            if lam > cap:
                lam = cap
            g = lam * (x[t] - mg)
            if 1.0 + g <= TOL_ZERO:
                acc_p = -np.inf
            elif acc_p > -np.inf:
                acc_p += math.log1p(g)
            if 1.0 - g <= TOL_ZERO:
                acc_m = -np.inf
            elif acc_m > -np.inf:
                acc_m += math.log1p(-g)
            out[gi, t] = np.logaddexp(acc_p, acc_m) - LOG2
    return out
