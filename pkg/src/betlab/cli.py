"""Command-line front end: study presets with machine-readable CSV/JSON output.

Numbers are formatted with 17 significant digits so reruns can be diffed
byte-for-byte; every subcommand is a thin wrapper over the library calls.
Exit codes: 0 success, 2 bad configuration or arguments, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, kernels, simlab, strategies
from .core import NullSpec
from .simlab import DistSpec, ExperimentConfig, run_ensemble

CHECKPOINT_COLUMNS = (
    "checkpoint",
    "q01",
    "q05",
    "q25",
    "q50",
    "q75",
    "q95",
    "q99",
    "bankrupt_frac_1e2",
    "bankrupt_frac_1e6",
    "mean_sqrtn_lambda",
    "var_sqrtn_lambda",
    "tn_mean",
    "sos_q50",
)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def render_csv(columns, rows) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def checkpoints_csv(summary: simlab.EnsembleSummary) -> str:
    rows = []
    if summary.paths > 0:
        med = summary.quantile_levels.index(0.5)
        for j, ck in enumerate(summary.checkpoints):
            rows.append(
                (
                    ck,
                    *summary.wealth_quantiles[j],
                    summary.bankrupt_frac_1e2[j],
                    summary.bankrupt_frac_1e6[j],
                    summary.mean_sqrtn_lambda[j],
                    summary.var_sqrtn_lambda[j],
                    summary.tn_mean[j],
                    summary.sos_quantiles[j][med],
                )
            )
    return render_csv(CHECKPOINT_COLUMNS, rows)


def _write(out_dir: Path, name: str, text: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(text)


def _write_outputs(
    out_dir: Path,
    config: ExperimentConfig,
    summary: simlab.EnsembleSummary,
    wall: float,
    workers: int,
    extra_summary: dict | None = None,
    extra_files: dict[str, str] | None = None,
) -> None:
    payload = summary.to_dict()
    if extra_summary:
        payload.update(extra_summary)
    csv_text = checkpoints_csv(summary)
    manifest = {
        "tool": "betlab",
        "version": __version__,
        "backend": kernels.active_name(),
        "workers": workers,
        "wall_time_s": wall,
        "config": config.to_config(),
        "tables": {"checkpoints_csv": csv_text},
    }
    _write(out_dir, "summary.json", json.dumps(payload, indent=2))
    _write(out_dir, "checkpoints.csv", csv_text)
    _write(out_dir, "manifest.json", json.dumps(manifest, indent=2))
    for name, text in (extra_files or {}).items():
        _write(out_dir, name, text)


def parse_dist(text: str) -> DistSpec:
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind == "bernoulli":
        return simlab.bernoulli(float(rest))
    if kind in ("beta", "scaled_beta"):
        a, b = (float(v) for v in rest.split(","))
        return simlab.scaled_beta(a, b)
    if kind in ("point", "point_mass"):
        return simlab.point_mass(float(rest))
    if kind == "normal":
        mu, sigma = (float(v) for v in rest.split(","))
        return simlab.normal(mu, sigma)
    if kind == "discrete":
        pts_s, _, pr_s = rest.partition("@")
        pts = [float(v) for v in pts_s.split(",")]
        probs = [float(v) for v in pr_s.split(",")]
        return simlab.discrete_on01(pts, probs)
    raise ValueError(f"cannot parse distribution {text!r}")


def default_checkpoints(horizon: int) -> tuple[int, ...]:
    cks = []
    c = 10
    while c < horizon:
        cks.append(c)
        c *= 10
    if horizon >= 1:
        cks.append(horizon)
    return tuple(cks)


def _strategy_from_args(args) -> strategies.Strategy:
    name = args.strategy
    if name == "fixed":
        return strategies.fixed_fraction(args.lam)
    if name == "kt":
        return strategies.kt_strategy(c=args.kt_c, safety=args.safety)
    if name == "grapa":
        return strategies.grapa_strategy(safety=args.safety)
    if name == "agrapa":
        return strategies.agrapa_strategy(c=args.agrapa_c)
    if name == "hedged":
        return strategies.hedged_strategy(alpha=args.alpha, c=args.hedge_c)
    if name == "beta_mixture":
        return strategies.beta_mixture_strategy(n_nodes=args.nodes, atom0=args.atom0)
    if name == "robbins_mixture":
        return strategies.robbins_mixture_strategy(n_nodes=args.nodes, atom0=args.atom0)
    if name == "intermittent_kt":
        return strategies.intermittent(strategies.kt_strategy(c=args.kt_c), args.alpha_exp)
    raise ValueError(f"unknown strategy {name!r}")


def _common_config(args, strategy, checkpoints=None) -> ExperimentConfig:
    return ExperimentConfig(
        dist=parse_dist(args.dist),
        null_m=args.m,
        strategy=strategy,
        horizon=args.horizon,
        paths=args.paths,
        checkpoints=checkpoints or default_checkpoints(args.horizon),
        master_seed=args.seed,
    )


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args) -> int:
    try:
        cfg_text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        config = ExperimentConfig.from_config(json.loads(cfg_text))
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return 2
    workers = simlab.resolve_workers(args.workers)
    t0 = time.perf_counter()
    summary = run_ensemble(config, workers=workers)
    wall = time.perf_counter() - t0
    try:
        _write_outputs(Path(args.out), config, summary, wall, workers)
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return 3
    return 0


def _run_study(args, strategy, checkpoints=None, extra=None, extra_files=None) -> int:
    try:
        config = _common_config(args, strategy, checkpoints)
    except (ValueError, KeyError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return 2
    workers = simlab.resolve_workers(args.workers)
    t0 = time.perf_counter()
    summary = run_ensemble(config, workers=workers)
    wall = time.perf_counter() - t0
    extra_summary = extra(config, summary) if extra else None
    files = extra_files(config, summary) if extra_files else None
    try:
        _write_outputs(Path(args.out), config, summary, wall, workers, extra_summary, files)
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return 3
    return 0


def cmd_bankruptcy(args) -> int:
    try:
        strategy = _strategy_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return _run_study(args, strategy)


def cmd_klinf(args) -> int:
    # chi-square samples depend only on the data; bet nothing while collecting
    strategy = strategies.fixed_fraction(0.0)

    def extra(config, summary):
        if summary.paths == 0:
            return {"ks_chi2": math.nan}
        chi = summary.chi_sq[:, -1]
        return {"ks_chi2": simlab.ks_distance(chi, simlab.chi2_cdf)}

    def files(config, summary):
        rows = [(i, summary.chi_sq[i, -1]) for i in range(summary.paths)]
        return {"klinf.csv": render_csv(("path", "chi_sq"), rows)}

    return _run_study(args, strategy, checkpoints=(args.horizon,), extra=extra, extra_files=files)


def cmd_confseq(args) -> int:
    try:
        dist = parse_dist(args.dist)
        checkpoints = default_checkpoints(args.horizon)
        if args.grid_step <= 0 or not (0 < args.alpha < 1):
            raise ValueError("need grid_step > 0 and alpha in (0,1)")
    except ValueError as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return 2
    workers = simlab.resolve_workers(args.workers)
    t0 = time.perf_counter()
    rows = []
    covered = np.zeros(len(checkpoints))
    for i in range(args.paths):
        x = simlab.sample_path(dist, args.horizon, simlab.derive_path_seed(args.seed, i))
        res = simlab.invert_confidence_set(
            x, args.alpha, args.grid_step, family="hedged", checkpoints=checkpoints
        )
        for row, ck in enumerate(checkpoints):
            lo, hi = res.interval(row)
            rlo, rhi = res.interval(row, running=True)
            cov = res.contains(args.m, row, running=True)
            covered[row] += cov
            rows.append((i, ck, lo, hi, rlo, rhi, cov))
    wall = time.perf_counter() - t0
    coverage = (covered / args.paths).tolist() if args.paths else []
    payload = {
        "alpha": args.alpha,
        "grid_step": args.grid_step,
        "m_true": args.m,
        "checkpoints": list(checkpoints),
        "paths": args.paths,
        "running_coverage": coverage,
    }
    manifest = {
        "tool": "betlab",
        "version": __version__,
        "backend": kernels.active_name(),
        "workers": workers,
        "wall_time_s": wall,
        "config": {
            "study": "confseq",
            "dist": dist.to_config(),
            "m": args.m,
            "alpha": args.alpha,
            "grid_step": args.grid_step,
            "paths": args.paths,
            "horizon": args.horizon,
            "master_seed": args.seed,
        },
    }
    csv_text = render_csv(
        ("path", "checkpoint", "ci_lo", "ci_hi", "run_lo", "run_hi", "covered"), rows
    )
    try:
        out = Path(args.out)
        _write(out, "confseq.csv", csv_text)
        _write(out, "summary.json", json.dumps(payload, indent=2))
        _write(out, "manifest.json", json.dumps(manifest, indent=2))
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return 3
    return 0


def cmd_leverage(args) -> int:
    try:
        if args.inner == "atom_mixture":
            inner = strategies.beta_mixture_strategy(atom0=args.atom0)
        elif args.inner == "fixed":
            inner = strategies.fixed_fraction(args.lam)
        else:
            raise ValueError(f"unknown inner strategy {args.inner!r}")
        sharp = strategies.opportunistic_leverage(inner, args.rho)
        dist = parse_dist(args.dist)
        null = NullSpec(args.m)
        checkpoints = default_checkpoints(args.horizon)
    except ValueError as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return 2
    kern = kernels.active()
    workers = simlab.resolve_workers(args.workers)
    t0 = time.perf_counter()
    rows = []
    max_dev = 0.0
    for i in range(args.paths):
        x = simlab.sample_path(dist, args.horizon, simlab.derive_path_seed(args.seed, i))
        lam_base, logw_base = simlab.evaluate_path(inner, x, null, kern)
        _, logw_sharp = simlab.evaluate_path(sharp, x, null, kern)
        w_prev = np.exp(np.concatenate([[0.0], logw_base[:-1]]))
        min_mult = np.minimum(1.0 - lam_base * args.m, 1.0 + lam_base * (1.0 - args.m))
        pnb = np.minimum.accumulate(w_prev * min_mult) > args.rho
        w = np.exp(logw_base)
        w_sharp = np.exp(logw_sharp)
        w_expect = (w - args.rho) / (1.0 - args.rho)
        for ck in checkpoints:
            t = ck - 1
            dev = abs(w_sharp[t] - w_expect[t])
            if pnb[t]:
                max_dev = max(max_dev, dev)
            rows.append((i, ck, w[t], w_sharp[t], w_expect[t], dev, pnb[t]))
    wall = time.perf_counter() - t0
    payload = {
        "rho": args.rho,
        "paths": args.paths,
        "max_abs_dev_on_pnb": max_dev,
        "checkpoints": list(checkpoints),
    }
    manifest = {
        "tool": "betlab",
        "version": __version__,
        "backend": kernels.active_name(),
        "workers": workers,
        "wall_time_s": wall,
        "config": {
            "study": "leverage",
            "inner": inner.to_config(),
            "rho": args.rho,
            "dist": dist.to_config(),
            "m": args.m,
            "paths": args.paths,
            "horizon": args.horizon,
            "master_seed": args.seed,
        },
    }
    csv_text = render_csv(
        ("path", "checkpoint", "w", "w_sharp", "w_expected", "abs_dev", "pnb"), rows
    )
    try:
        out = Path(args.out)
        _write(out, "leverage.csv", csv_text)
        _write(out, "summary.json", json.dumps(payload, indent=2))
        _write(out, "manifest.json", json.dumps(manifest, indent=2))
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return 3
    return 0


def cmd_subg(args) -> int:
    try:
        if args.variant == "plugin_inv_sqrt":
            strategy = strategies.Strategy("subg_plugin", {"schedule": "inv_sqrt_k", "scale": 1.0})
        elif args.variant == "plugin_inv":
            strategy = strategies.Strategy("subg_plugin", {"schedule": "inv_k", "scale": 1.0})
        elif args.variant == "gauss":
            strategy = strategies.Strategy("subg_mixture", {"tau": args.tau, "atom": 0.0})
        elif args.variant == "atom":
            strategy = strategies.Strategy("subg_mixture", {"tau": args.tau, "atom": args.atom})
        else:
            raise ValueError(f"unknown variant {args.variant!r}")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    def files(config, summary):
        rows = []
        for i in range(summary.paths):
            for j, ck in enumerate(summary.checkpoints):
                rows.append((i, ck, summary.logw[i, j]))
        return {"subg.csv": render_csv(("path", "checkpoint", "log_m"), rows)}

    return _run_study(args, strategy, extra_files=files)


# ---------------------------------------------------------------------------
# parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=1, help="master seed")
    p.add_argument("--paths", type=int, default=100)
    p.add_argument("--horizon", type=int, default=1000)
    p.add_argument("--m", type=float, default=0.5, help="null mean")
    p.add_argument("--dist", type=str, default="bernoulli:0.5")
    p.add_argument("--out", type=str, required=True, help="output directory")
    p.add_argument("--workers", type=int, default=None, help="defaults to $BETLAB_WORKERS or 1")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="betlab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"betlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run an ensemble from a JSON config")
    p.add_argument("config", type=str)
    p.add_argument("--out", type=str, required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bankruptcy", help="null wealth-decay study for one strategy")
    _add_common(p)
    p.add_argument(
        "--strategy",
        choices=[
            "kt",
            "grapa",
            "agrapa",
            "hedged",
            "fixed",
            "beta_mixture",
            "robbins_mixture",
            "intermittent_kt",
        ],
        default="kt",
    )
    p.add_argument("--kt-c", type=float, default=0.25)
    p.add_argument("--safety", type=float, default=1.0)
    p.add_argument("--lam", type=float, default=0.1)
    p.add_argument("--agrapa-c", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--hedge-c", type=float, default=0.5)
    p.add_argument("--atom0", type=float, default=0.0)
    p.add_argument("--nodes", type=int, default=strategies.DEFAULT_NODES)
    p.add_argument("--alpha-exp", type=float, default=2.0)
    p.set_defaults(func=cmd_bankruptcy)

    p = sub.add_parser("klinf", help="hindsight-max chi-square samples and KS distance")
    _add_common(p)
    p.set_defaults(func=cmd_klinf)

    p = sub.add_parser("confseq", help="confidence sequences by grid inversion")
    _add_common(p)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--grid-step", type=float, default=0.005)
    p.set_defaults(func=cmd_confseq)

    p = sub.add_parser("leverage", help="opportunistic-leverage identity study")
    _add_common(p)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--inner", choices=["atom_mixture", "fixed"], default="atom_mixture")
    p.add_argument("--atom0", type=float, default=0.5)
    p.add_argument("--lam", type=float, default=0.1)
    p.set_defaults(func=cmd_leverage)

    p = sub.add_parser("subg", help="sub-Gaussian test-process studies")
    _add_common(p)
    p.add_argument(
        "--variant",
        choices=["plugin_inv_sqrt", "plugin_inv", "gauss", "atom"],
        default="plugin_inv_sqrt",
    )
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--atom", type=float, default=0.3)
    p.set_defaults(func=cmd_subg)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
