"""Number of customer classes L against the level bound as the tree grows.

Structure only: trees carry no customers, so this measures the recursion depth.
"""

import argparse
import random
import time

from tollbooth.bench import random_tree
from tollbooth.classification import classify, decay_ratio, level_bound
from tollbooth.model import Instance, Tree


def shaped_tree(shape: str, m: int, rng: random.Random) -> Tree:
    if shape == "path":
        return Tree(m + 1, tuple((j, j + 1) for j in range(m)))
    if shape == "star":
        return Tree(m + 1, tuple((0, j) for j in range(1, m + 1)))
    return random_tree(m, rng)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[10, 100, 1000, 10_000, 100_000])
    parser.add_argument("--shapes", nargs="+", default=["random", "path", "star"])
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    print(f"{'m':>7} {'shape':>7} {'k':>2} {'rho':>6} {'L':>3} {'bound':>5} {'seconds':>8}")
    for m in args.sizes:
        for shape in args.shapes:
            start = time.perf_counter()
            cl = classify(Instance(shaped_tree(shape, m, rng), ()), keep_empty=False)
            elapsed = time.perf_counter() - start
            rho = decay_ratio(cl.k)
            print(f"{m:7d} {shape:>7} {cl.k:2d} {str(rho):>6} {cl.L:3d} {level_bound(m, cl.k):5d} {elapsed:8.2f}")


if __name__ == "__main__":
    main()
