#!/usr/bin/env python3
"""Timing comparison of the numba and numpy kernel lanes.

Runs each hot kernel on a representative workload in both lanes and prints a
table with the per-path time and the speedup. Invoke directly:

    python benchmarks/bench_backends.py [--horizon 100000] [--repeats 3]
"""

import argparse
import time

import numpy as np

from betlab import kernels
from betlab.core import NullSpec
from betlab.strategies import build_beta_mixture


def best_time(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--horizon", type=int, default=100_000)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--nodes", type=int, default=257)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    m = 0.5
    x = np.where(rng.random(args.horizon) < 0.5, 1.0, 0.0)
    x_cont = rng.beta(2.0, 2.0, min(args.horizon, 20_000))
    spec = build_beta_mixture(0.5, 0.5, args.nodes, NullSpec(m))
    grid = np.arange(1, 200) * 0.005

    lanes = {name: kernels.get_backend(name) for name in kernels.available_backends()}

    workloads = {
        f"kt_fractions ({args.horizon} steps)": lambda k: k.kt_fractions(x, m, 0.25, -1.8, 1.8),
        f"agrapa_fractions ({args.horizon})": lambda k: k.agrapa_fractions(x, m, 0.5),
        f"prh_fractions ({args.horizon})": lambda k: k.prh_fractions(x, m, 0.05, 0.5),
        f"grapa_fractions binary ({args.horizon})": lambda k: k.grapa_fractions(
            x, m, -2.0, 2.0, 1e-10
        ),
        f"plugin_logw ({args.horizon})": lambda k: k.plugin_logw(
            x, k.agrapa_fractions(x, m, 0.5), m
        ),
        f"hedged_logw ({args.horizon})": lambda k: k.hedged_logw(
            x, k.prh_fractions(x, m, 0.05, 0.5), m
        ),
        f"mixture_path ({args.horizon} x {len(spec.lams)} nodes)": lambda k: k.mixture_path(
            x, m, spec.lams, spec.weights, 0.0
        ),
        f"klinf_value continuous ({len(x_cont)})": lambda k: k.klinf_value(
            x_cont, m, -2.0, 2.0, 1e-10
        ),
        f"hedged_grid_logw ({min(args.horizon, 10_000)} x {len(grid)} nulls)": lambda k: k.hedged_grid_logw(
            x[: min(args.horizon, 10_000)], grid, 0.05, 0.5
        ),
        f"leverage_fractions ({args.horizon})": lambda k: k.leverage_fractions(
            x, k.agrapa_fractions(x, m, 0.5), m, 0.3
        ),
    }

    # warm-up pass compiles the numba kernels so timings exclude compilation
    for lane in lanes.values():
        for fn in workloads.values():
            fn(lane)

    width = max(len(n) for n in workloads)
    header = f"{'kernel':<{width}}  " + "  ".join(f"{n:>12}" for n in lanes)
    if len(lanes) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, fn in workloads.items():
        times = {lane_name: best_time(lambda: fn(lane), args.repeats) for lane_name, lane in lanes.items()}
        row = f"{name:<{width}}  " + "  ".join(f"{times[n] * 1e3:>10.2f}ms" for n in lanes)
        if "numba" in times and "numpy" in times:
            row += f"  {times['numpy'] / times['numba']:>7.1f}x"
        print(row)


if __name__ == "__main__":
    main()
