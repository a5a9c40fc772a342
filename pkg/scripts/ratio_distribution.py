"""Observed approximation ratios against the brute-force optimum on desk-scale instances.

Prints a text histogram and the share of instances where the algorithm is optimal.
"""

import argparse
import random
import statistics

from tollbooth.bench import generate_instance
from tollbooth.classification import solve_full
from tollbooth.oracle import brute_force_opt


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--instances", type=int, default=200)
    parser.add_argument("--max-edges", type=int, default=12)
    parser.add_argument("--customers", type=int, default=8)
    parser.add_argument("--mode", choices=["derandomized", "randomized"], default="derandomized")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--bins", type=int, default=10)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    ratios = []
    for trial in range(args.instances):
        m = rng.randint(1, args.max_edges)
        n = min(args.customers, m * (m + 1) // 2)
        inst = generate_instance(m, n, 10, seed=rng.randrange(2**31))
        _, report = solve_full(inst, args.mode, seed=trial)
        opt = brute_force_opt(inst, max_edges=args.max_edges, max_customers=args.customers).opt_revenue
        ratios.append(float(report.revenue / opt) if opt else 1.0)

    counts = [0] * args.bins
    for r in ratios:
        counts[min(int(r * args.bins), args.bins - 1)] += 1
    width = max(counts) or 1
    for j, c in enumerate(counts):
        lo, hi = j / args.bins, (j + 1) / args.bins
        print(f"[{lo:.1f}, {hi:.1f}{']' if j == args.bins - 1 else ')'} {c:5d} {'#' * round(40 * c / width)}")
    print(f"instances {len(ratios)}  min {min(ratios):.3f}  median {statistics.median(ratios):.3f}  "
          f"mean {statistics.fmean(ratios):.3f}  optimal {sum(r == 1.0 for r in ratios) / len(ratios):.1%}")


if __name__ == "__main__":
    main()
