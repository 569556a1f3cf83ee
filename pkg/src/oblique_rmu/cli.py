"""Command-line entry point: ``run``, ``summarize`` and ``gen``."""

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .campaign import emit_summary, load_config, run_campaign, summarize_dir
from .synthetic import DatasetSpec, export_csv, generate

log = logging.getLogger("oblique_rmu")


def _print_summary(summary, stream=None):
    stream = stream or sys.stdout
    stream.write(f"{'method':<14}{'mean_F':>14}{'std_F':>12}  {'ranks':<20}{'sparsity%':>10}\n")
    for row in summary:
        ranks = "(" + ", ".join(str(x) for x in row.ranks) + ")"
        stream.write(
            f"{row.method.value:<14}{row.mean_F:>14.3f}{row.std_F:>12.3f}  "
            f"{ranks:<20}{row.median_sparsity_pct:>10.3f}\n"
        )


def cmd_run(args):
    cfg = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["out_dir"] = str(args.out)
    if args.deterministic_clock:
        overrides["deterministic_clock"] = True
    if args.runs is not None:
        overrides["runs"] = args.runs
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    log.info("running %d runs of %s into %s", cfg.runs,
             ",".join(m.value for m in cfg.methods), cfg.out_dir)
    out = run_campaign(cfg)
    failed = [r for r in out.results if r.error]
    for r in failed:
        log.warning("run %d failed: %s", r.run, r.error)
    if not out.summary:
        log.error("every run failed")
        return 1
    _print_summary(out.summary)
    return 0


def cmd_summarize(args):
    summary = summarize_dir(args.trace_dir, args.t_max)
    dest = args.out if args.out is not None else Path(args.trace_dir) / "summary.csv"
    emit_summary(summary, dest)
    _print_summary(summary)
    return 0


def cmd_gen(args):
    base = {}
    if args.config is not None:
        cfg = load_config(args.config)
        base = dict(m=cfg.m, n=cfg.n, r=cfg.r, s=cfg.s, sigma=cfg.sigma, seed=cfg.seed)
    for key in ("m", "n", "r", "s", "sigma", "seed"):
        val = getattr(args, key)
        if val is not None:
            base[key] = val
    missing = {"m", "n", "r"} - base.keys()
    if missing:
        raise ValueError(f"missing dataset sizes: {sorted(missing)}")
    spec = DatasetSpec(**base)
    out = args.out if args.out is not None else Path("dataset")
    paths = export_csv(generate(spec), out)
    for p in paths.values():
        print(p)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="oblique-rmu", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a campaign from a config file")
    run.add_argument("config", type=Path)
    run.add_argument("--seed", type=int)
    run.add_argument("--out", type=Path)
    run.add_argument("--runs", type=int)
    run.add_argument("--deterministic-clock", action="store_true",
                     help="charge each iteration its FLOP count instead of wall time")
    run.set_defaults(func=cmd_run)

    summ = sub.add_parser("summarize", help="recompute summary.csv from trace files")
    summ.add_argument("trace_dir", type=Path)
    summ.add_argument("--t-max", type=float, help="AUC horizon (default: from manifest)")
    summ.add_argument("--out", type=Path)
    summ.set_defaults(func=cmd_summarize)

    gen = sub.add_parser("gen", help="export a synthetic dataset as CSV")
    gen.add_argument("config", type=Path, nargs="?")
    gen.add_argument("--m", type=int)
    gen.add_argument("--n", type=int)
    gen.add_argument("--r", type=int)
    gen.add_argument("--s", type=float)
    gen.add_argument("--sigma", type=float)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--out", type=Path)
    gen.set_defaults(func=cmd_gen)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
