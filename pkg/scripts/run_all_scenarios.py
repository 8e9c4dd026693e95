"""Run every config in scenarios/ and print its summary.

    python3 scripts/run_all_scenarios.py [--out-dir results]
"""

import argparse
import time
from pathlib import Path

from irsholo.config import parse_config
from irsholo.scenarios import run_scenario

ROOT = Path(__file__).resolve().parents[1]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", type=Path, default=ROOT / "results")
    parser.add_argument("--only", nargs="*", help="scenario file stems to run")
    args = parser.parse_args()
    for path in sorted((ROOT / "scenarios").glob("*.yaml")):
        if args.only and path.stem not in args.only:
            continue
        cfg = parse_config(path.read_text())
        start = time.perf_counter()
        result = run_scenario(cfg, args.out_dir / path.stem)
        print(f"== {path.stem} ({time.perf_counter() - start:.1f} s)")
        for w in cfg.warnings:
            print(f"warning: {w}")
        print(result.summary_text(), end="")


if __name__ == "__main__":
    main()
