"""Run an experiment configuration and print a per-size summary.

    python3 scripts/run_bench.py configs/desk.json [--csv out.csv]
"""

import argparse
import statistics
from collections import defaultdict
from fractions import Fraction
from pathlib import Path

from tollbooth.bench import ExperimentConfig, rows_to_csv, run_suite


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("config")
    parser.add_argument("--csv", help="override the output path from the config")
    args = parser.parse_args()

    config = ExperimentConfig.from_json(args.config)
    out = args.csv or config.output
    config.output = None
    rows = run_suite(config)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(rows_to_csv(rows))
        print(f"wrote {len(rows)} rows to {out}")

    by_size = defaultdict(list)
    for row in rows:
        by_size[row["m"]].append(row)
    print(f"{'m':>5} {'trials':>6} {'k':>3} {'L':>3} {'min ratio':>10} {'median':>8} {'below bound':>12}")
    for m, group in sorted(by_size.items()):
        ratios = [float(Fraction(r["ratio"])) for r in group if r["ratio"]]
        below = sum(Fraction(r["ratio"]) < Fraction(r["bound"]) for r in group if r["ratio"])
        summary = f"{min(ratios):10.3f} {statistics.median(ratios):8.3f} {below:12d}" if ratios else "(no oracle)"
        print(f"{m:5d} {len(group):6d} {group[0]['k']:3d} {max(r['L'] for r in group):3d} {summary}")


if __name__ == "__main__":
    main()
