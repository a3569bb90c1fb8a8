"""Command line entry point.

    vasrsim run <config> --out <dir> [--parallel N]
    vasrsim plot <run_dir> --out <dir>

Exit codes: 0 ok, 1 runtime failure, 2 invalid config.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import BUNDLED_CONFIG, load_config
from .engine import ConfigError
from .netmodel import LinkStalledError
from .runner import run_matrix


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vasrsim", description="Adaptive VBR streaming over multi-path SDN simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute the runs declared in a config file")
    run.add_argument("config", help=f"experiment config JSON (bundled: {BUNDLED_CONFIG})")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--parallel", type=int, default=1, metavar="N", help="worker processes")

    plot = sub.add_parser("plot", help="render SVG charts for one run directory")
    plot.add_argument("run_dir")
    plot.add_argument("--out", required=True)
    return parser


def cmd_run(args) -> int:
    try:
        config = load_config(args.config)
        config.load_inputs()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.parallel < 1:
        print("config error: --parallel must be >= 1", file=sys.stderr)
        return 2
    try:
        results = run_matrix(config, args.out, args.parallel)
    except (LinkStalledError, ValueError, OSError) as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return 1
    for res in results:
        m = res.report
        if m is None:
            print(f"{res.spec.name}: no segments completed")
            continue
        flag = " TRUNCATED" if res.truncated else ""
        print(
            f"{res.spec.name}: {res.spec.algorithm}/{res.spec.controller.policy} "
            f"avg {m.avg_bitrate_kbps:.0f} kbps, version {m.avg_version_index:.2f}, "
            f"switch-downs {m.num_switch_downs}, stall {m.total_stall_s:.1f} s{flag}"
        )
    return 1 if any(r.truncated for r in results) else 0


def cmd_plot(args) -> int:
    from .plotting import PlotError, plot_run

    try:
        written = plot_run(args.run_dir, args.out)
    except PlotError as exc:
        print(f"plot failed: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "run":
        return cmd_run(args)
    return cmd_plot(args)


if __name__ == "__main__":
    sys.exit(main())
