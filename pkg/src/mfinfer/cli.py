"""Command-line front end.

Four subcommands: ``run`` executes one configured sampling run and
writes a sample log plus a summary report; ``sweep`` repeats a run over
an iteration-budget grid with independent replicate seeds and writes raw
and aggregated results; ``analyze`` recomputes estimates from an
existing sample log, optionally comparing against a plain high-fidelity
baseline log; ``tree`` checks and canonically reformats a stored mean
function.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import perf
from ._version import __version__
from .config import ConfigError, RunConfig, load_config, loads_config
from .models import build_bundle, build_weighting
from .sampling.estimators import summarize
from .sampling.logio import (
    LogParseError,
    header_comment,
    make_header,
    open_log_sink,
    read_nu_trace_csv,
    read_sample_log,
    write_nu_trace_csv,
    write_summary_csv,
)
from .sampling.mlaws import law_from_name
from .sampling.runner import ConstantMean, run_mf_sampler, run_sampler
from .sampling.types import StopRule
from .schedule.adaptive import AdaptiveConfig, run_adaptive_sampler
from .schedule.tree import TreeParseError, parse_mean_function, render_mean_function
from .streams import derive_seed

__all__ = ["main"]


def _stop_rule(cfg: RunConfig, n_override: int | None) -> StopRule:
    n = n_override if n_override is not None else cfg.sampler.n
    return StopRule(max_iterations=n, max_cost=cfg.sampler.max_cost)


def _mean_function(cfg: RunConfig):
    if cfg.sampler.mean_function is not None:
        with open(cfg.sampler.mean_function, "r", encoding="utf-8") as fh:
            return parse_mean_function(fh.read())
    return ConstantMean(cfg.sampler.mu)


def _execute(cfg: RunConfig, seed: int, n_override: int | None, out_dir: Path | None):
    """Run one configured sampling job; returns (report, extras)."""
    bundle = build_bundle(cfg)
    weighting, replicates = build_weighting(cfg.weighting, bundle.y0)
    stop = _stop_rule(cfg, n_override)
    m_law = law_from_name(cfg.sampler.m_law, cfg.sampler.m_max)

    sink = None
    close = None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        header = make_header(seed, cfg.hash, cfg.sampler.kind)
        sink, close = open_log_sink(out_dir / "samples.jsonl", header)
    extras = {}
    try:
        if cfg.sampler.kind == "single":
            simulator = bundle.simulate_hi if cfg.sampler.fidelity == "hi" else bundle.simulate_lo
            if simulator is None:
                raise ValueError(f"model {bundle.name!r} has no {cfg.sampler.fidelity} simulator")
            samples = run_sampler(
                bundle.prior,
                bundle.prior,
                simulator,
                weighting,
                bundle.g_fn,
                stop=stop,
                seed=seed,
                replicates=replicates,
                sink=sink,
            )
        elif cfg.sampler.kind == "multifidelity":
            if bundle.pair is None:
                raise ValueError(f"model {bundle.name!r} has no coupled pair")
            samples = run_mf_sampler(
                bundle.prior,
                bundle.prior,
                bundle.pair,
                weighting,
                weighting,
                bundle.g_fn,
                mean_fn=_mean_function(cfg),
                m_law=m_law,
                stop=stop,
                seed=seed,
                replicates=replicates,
                slim=True,
                sink=sink,
            )
        else:
            if bundle.pair is None:
                raise ValueError(f"model {bundle.name!r} has no coupled pair")
            ad = cfg.sampler.adaptive
            result = run_adaptive_sampler(
                bundle.prior,
                bundle.prior,
                bundle.pair,
                weighting,
                weighting,
                bundle.g_fn,
                config=AdaptiveConfig(
                    n0=ad.n0,
                    delta=ad.delta,
                    tree_params=ad.tree,
                    burnin_mu=cfg.sampler.mu,
                    nu_min=ad.nu_min,
                    nu_max=ad.nu_max,
                    trace_every=ad.trace_every,
                    update_every=ad.update_every,
                ),
                m_law=m_law,
                stop=stop,
                seed=seed,
                replicates=replicates,
                feature_names=bundle.feature_names,
                slim=True,
                sink=sink,
            )
            samples = result.samples
            extras["adaptive"] = result
    finally:
        if close is not None:
            close()

    report = summarize(samples)
    if out_dir is not None:
        header = make_header(seed, cfg.hash, cfg.sampler.kind)
        write_summary_csv(out_dir / "summary.csv", header, report)
        result = extras.get("adaptive")
        if result is not None:
            if result.tree is not None:
                text = header_comment(header) + "\n" + render_mean_function(result.mean_fn)
                (out_dir / "tree.txt").write_text(text, encoding="utf-8")
            write_nu_trace_csv(out_dir / "nu_trace.csv", header, result.nu_trace)
    return report, extras


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    seed = args.seed if args.seed is not None else cfg.sampler.seed
    out_dir = Path(args.out) if args.out else None
    report, extras = _execute(cfg, seed, args.n, out_dir)
    print(
        f"n={report.n} g_hat={report.g_hat:.6g} mse_hat={report.variance_estimate:.6g} "
        f"j_hat={report.j_coefficient:.6g} total_cost={report.total_cost:.6g}"
    )
    result = extras.get("adaptive")
    if result is not None and result.tree is not None:
        nu = " ".join(f"{v:.4g}" for v in result.mean_fn.nu)
        print(f"cells={result.tree.n_cells} nu=[{nu}] skipped_updates={result.skipped_updates}")
    if out_dir is not None:
        print(f"wrote {out_dir}/samples.jsonl and {out_dir}/summary.csv")
    return 0


def _sweep_task(config_text: str, where: str, budget: int, seed: int):
    cfg = loads_config(config_text, where)
    report, _ = _execute(cfg, seed, budget, None)
    return {
        "n": report.n,
        "g_hat": report.g_hat,
        "mse_hat": report.variance_estimate,
        "j_hat": report.j_coefficient,
        "total_cost": report.total_cost,
    }


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    config_text = Path(args.config).read_text(encoding="utf-8")
    seed = args.seed if args.seed is not None else cfg.sampler.seed
    budgets = [int(v) for v in args.budget_list.split(",") if v.strip()]
    if not budgets or any(b < 1 for b in budgets):
        raise ValueError("budgets must be positive iteration counts")
    replicates = args.replicates
    if replicates < 1:
        raise ValueError("need at least one replicate")
    workers = args.workers or int(os.environ.get("MF_INFER_WORKERS", "1"))

    jobs = []
    for bi, budget in enumerate(budgets):
        for rep in range(replicates):
            rep_seed = int(derive_seed(seed, bi, rep))
            jobs.append((budget, rep, rep_seed))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    _sweep_task,
                    [config_text] * len(jobs),
                    [str(args.config)] * len(jobs),
                    [j[0] for j in jobs],
                    [j[2] for j in jobs],
                )
            )
    else:
        results = [_sweep_task(config_text, str(args.config), j[0], j[2]) for j in jobs]

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    header = make_header(seed, cfg.hash, f"sweep-{cfg.sampler.kind}")

    with open(out_dir / "raw.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write(header_comment(header) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["budget", "rep", "seed", "n", "g_hat", "mse_hat", "j_hat", "total_cost"])
        for (budget, rep, rep_seed), row in zip(jobs, results):
            writer.writerow(
                [
                    budget,
                    rep,
                    rep_seed,
                    row["n"],
                    repr(row["g_hat"]),
                    repr(row["mse_hat"]),
                    repr(row["j_hat"]),
                    repr(row["total_cost"]),
                ]
            )

    with open(out_dir / "aggregate.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write(header_comment(header) + "\n")
        writer = csv.writer(fh)
        writer.writerow(
            ["budget", "replicates", "mean_g", "var_g", "mean_mse", "mean_j", "mean_cost"]
        )
        for bi, budget in enumerate(budgets):
            rows = [r for (b, _, _), r in zip(jobs, results) if b == budget]
            g = np.array([r["g_hat"] for r in rows])
            var_g = float(g.var(ddof=1)) if len(g) > 1 else 0.0
            writer.writerow(
                [
                    budget,
                    len(rows),
                    repr(float(g.mean())),
                    repr(var_g),
                    repr(float(np.mean([r["mse_hat"] for r in rows]))),
                    repr(float(np.mean([r["j_hat"] for r in rows]))),
                    repr(float(np.mean([r["total_cost"] for r in rows]))),
                ]
            )
    print(f"wrote {out_dir}/raw.csv and {out_dir}/aggregate.csv ({len(jobs)} runs)")
    return 0


def _cmd_analyze(args) -> int:
    _, records = read_sample_log(args.log)
    if not records:
        print("empty log", file=sys.stderr)
        return 2
    est = perf.log_estimates(records)
    lines = [
        f"n={est['n']}",
        f"g_hat={est['g_hat']!r}",
        f"mse_hat={est['mse_hat']!r}",
        f"j_hat={est['j_hat']!r}",
        f"total_cost={est['total_cost']!r}",
    ]
    escalated = any(r.m >= 1 for r in records)
    if escalated:
        lines.append(f"v_mf_hat={perf.v_mf_from_log(records)!r}")
        lines.append(f"e_mf_hat={perf.e_mf_from_log(records)!r}")
    if args.baseline:
        _, base = read_sample_log(args.baseline)
        ok, lhs = perf.empirical_margin(records, base)
        lines.append(f"j_mf_hat={est['j_hat']!r}")
        lines.append(f"j_hi_hat={perf.log_estimates(base)['j_hat']!r}")
        lines.append(f"lhs_margin={lhs!r}")
        lines.append(f"predicate={'true' if ok else 'false'}")
    if args.nu_trace:
        trace = read_nu_trace_csv(args.nu_trace)
        tail_i, tail_nu = trace[-1]
        lines.append(f"nu_tail_i={tail_i}")
        lines.append("nu_tail=" + " ".join(repr(v) for v in tail_nu))
    print("\n".join(lines))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            keys = [line.split("=", 1)[0] for line in lines]
            values = [line.split("=", 1)[1] for line in lines]
            writer.writerow(keys)
            writer.writerow(values)
    return 0


def _cmd_tree(args) -> int:
    with open(args.tree, "r", encoding="utf-8") as fh:
        text = fh.read()
    mf = parse_mean_function(text)
    canonical = render_mean_function(mf)
    if args.out:
        Path(args.out).write_text(canonical, encoding="utf-8")
        print(f"ok: {mf.tree.n_cells} cells, wrote {args.out}")
    else:
        sys.stdout.write(canonical)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mf-infer",
        description="Likelihood-free importance sampling with multifidelity escalation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one configured sampling run")
    p_run.add_argument("--config", required=True, help="JSON configuration file")
    p_run.add_argument("--seed", type=int, default=None, help="override the configured seed")
    p_run.add_argument("--n", type=int, default=None, help="override the iteration budget")
    p_run.add_argument("--out", default=None, help="output directory for log and summary")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a budget grid with replicate seeds")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument(
        "--budget-list", required=True, help="comma-separated iteration budgets"
    )
    p_sweep.add_argument("--replicates", type=int, default=10)
    p_sweep.add_argument(
        "--workers",
        type=int,
        default=None,
        help="parallel processes (default MF_INFER_WORKERS or 1)",
    )
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_an = sub.add_parser("analyze", help="recompute estimates from a sample log")
    p_an.add_argument("--log", required=True)
    p_an.add_argument(
        "--baseline", default=None, help="plain high-fidelity log for the improvement margin"
    )
    p_an.add_argument(
        "--nu-trace", default=None, help="escalation-rate trace CSV; reports its final row"
    )
    p_an.add_argument("--out", default=None, help="optional CSV report")
    p_an.set_defaults(func=_cmd_analyze)

    p_tree = sub.add_parser("tree", help="validate and canonically reformat a mean function")
    p_tree.add_argument("--tree", required=True)
    p_tree.add_argument("--out", default=None)
    p_tree.set_defaults(func=_cmd_tree)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, LogParseError, TreeParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
