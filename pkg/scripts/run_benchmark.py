"""Run the synthetic benchmark campaign and print the summary table.

Usage::

    python scripts/run_benchmark.py configs/benchmark_desk.cfg [--runs 100] [--deterministic-clock]
"""

import argparse
import sys

from oblique_rmu.campaign import load_config, run_campaign
from oblique_rmu.cli import _print_summary


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--runs", type=int)
    ap.add_argument("--out")
    ap.add_argument("--deterministic-clock", action="store_true")
    args = ap.parse_args(argv)

    cfg = load_config(args.config)
    if args.runs is not None:
        cfg.runs = args.runs
    if args.out is not None:
        cfg.out_dir = args.out
    if args.deterministic_clock:
        cfg.deterministic_clock = True

    out = run_campaign(cfg)
    failed = [r for r in out.results if r.error]
    for r in failed:
        print(f"run {r.run} failed: {r.error}", file=sys.stderr)
    _print_summary(out.summary)
    print(f"wrote {out.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
