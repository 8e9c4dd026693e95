"""Command line entry point.

    irsholo <steer|focus|modulate|timevary|bounds> --config FILE [--out-dir DIR] [--seed N]

Exit status: 0 success, 1 invalid configuration, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import KINDS, ConfigError, parse_config
from .scenarios import run_scenario

log = logging.getLogger("irsholo")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="irsholo", description="Reflecting-surface wavefront scenarios")
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--out-dir", type=Path, default=Path("."))
        p.add_argument("--seed", type=int, default=None, help="override the config master seed")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    try:
        text = args.config.read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(text, args.command)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError([f"--seed: must be in [0, 2^64), got {args.seed}"])
            cfg.seed = args.seed
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    for w in cfg.warnings:
        log.warning(w)
    try:
        result = run_scenario(cfg, args.out_dir)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(result.summary_text())
    return 0


if __name__ == "__main__":
    sys.exit(main())
