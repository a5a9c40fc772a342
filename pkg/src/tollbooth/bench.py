"""Random instances and the benchmark suite that compares the solver against the oracle."""

from __future__ import annotations

import csv
import heapq
import io
import json
import random
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .classification import solve_full
from .decomp_solver import SolverConfig
from .model import Customer, Instance, Tree, ValidationError
from .oracle import brute_force_opt

CSV_COLUMNS = [
    "trial", "seed", "m", "n", "k", "L", "revenue", "opt", "ratio", "ratio_decimal",
    "bound", "guesses", "wall_time",
]


def tree_from_prufer(seq: Sequence[int]) -> Tree:
    """Decode a Prufer sequence over ``len(seq) + 2`` vertices."""
    n = len(seq) + 2
    degree = [1] * n
    for v in seq:
        if not 0 <= v < n:
            raise ValidationError(f"Prufer entry {v} out of range")
        degree[v] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, v))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    u, w = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, w))
    return Tree(n, tuple(edges))


def random_tree(m: int, rng: random.Random) -> Tree:
    """Uniformly random labelled tree with ``m`` edges."""
    if m < 0:
        raise ValidationError("edge count must be non-negative")
    if m == 0:
        return Tree(1, ())
    if m == 1:
        return Tree(2, ((0, 1),))
    return tree_from_prufer([rng.randrange(m + 1) for _ in range(m - 1)])


def _draw_budget(rng: random.Random, budget_max: int, dist: str) -> Fraction:
    if dist == "int":
        return Fraction(rng.randint(1, budget_max))
    if dist == "rational":
        den = rng.randint(1, 8)
        return Fraction(rng.randint(1, budget_max * den), den)
    raise ValidationError(f"unknown budget distribution {dist!r}")


def generate_instance(
    m: int, n: int, budget_max: int = 10, seed: int | str = 0, budget_dist: str = "int"
) -> Instance:
    """Random tree with ``m`` edges and ``n`` customers on distinct endpoint pairs."""
    if m < 1 or n < 0:
        raise ValidationError("need m >= 1 and n >= 0")
    rng = random.Random(seed)
    tree = random_tree(m, rng)
    pairs = tree.vertex_count * (tree.vertex_count - 1) // 2
    if n > pairs:
        raise ValidationError(f"{n} customers need distinct pairs, tree has only {pairs}")
    chosen = rng.sample(range(pairs), n)
    customers = []
    for code in chosen:
        s, t = _unrank_pair(code, tree.vertex_count)
        if rng.random() < 0.5:
            s, t = t, s
        customers.append(Customer(s, t, _draw_budget(rng, budget_max, budget_dist)))
    return Instance(tree, tuple(customers))


def _unrank_pair(code: int, n: int) -> tuple[int, int]:
    s = 0
    while code >= n - 1 - s:
        code -= n - 1 - s
        s += 1
    return s, s + 1 + code


@dataclass
class ExperimentConfig:
    sizes: list[int]
    customers: int = 8
    budget_max: int = 10
    budget_dist: str = "int"
    trials: int = 1
    seed: int = 0
    mode: str = "derandomized"
    oracle: bool = False
    output: Optional[str] = None
    record_time: bool = True
    oracle_max_edges: int = 12
    oracle_max_customers: int = 8
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self) -> None:
        if isinstance(self.solver, dict):
            self.solver = SolverConfig(**self.solver)
        if self.trials < 1:
            raise ValidationError("trials must be at least 1")
        if not self.sizes or any(m < 1 for m in self.sizes):
            raise ValidationError("sizes must be a non-empty list of positive edge counts")
        if self.mode not in ("derandomized", "randomized"):
            raise ValidationError(f"unknown mode {self.mode!r}")
        if self.budget_dist not in ("int", "rational"):
            raise ValidationError(f"unknown budget distribution {self.budget_dist!r}")
        if self.oracle and (max(self.sizes) > self.oracle_max_edges or self.customers > self.oracle_max_customers):
            raise ValidationError("oracle requested beyond its size guard")

    @classmethod
    def from_json(cls, path: str | Path) -> ExperimentConfig:
        try:
            data = json.loads(Path(path).read_text())
            return cls(**data)
        except (json.JSONDecodeError, TypeError) as exc:
            raise ValidationError(f"bad config {path}: {exc}") from exc

    def to_dict(self) -> dict:
        return asdict(self)


def trial_seed(base: int, m: int, trial: int) -> int:
    return random.Random(f"{base}:{m}:{trial}").randrange(2**31)


def run_suite(config: ExperimentConfig) -> list[dict]:
    """One row per (size, trial); the CSV is also written when ``config.output`` is set."""
    rows = []
    trial = 0
    for m in config.sizes:
        for _ in range(config.trials):
            seed = trial_seed(config.seed, m, trial)
            pairs = (m + 1) * m // 2
            inst = generate_instance(m, min(config.customers, pairs), config.budget_max, seed, config.budget_dist)
            start = time.perf_counter()
            scheme, report = solve_full(inst, config.mode, seed, config.solver)
            elapsed = time.perf_counter() - start
            row = {
                "trial": trial, "seed": seed, "m": m, "n": inst.n, "k": report.k, "L": report.L,
                "revenue": str(report.revenue), "opt": "", "ratio": "", "ratio_decimal": "",
                "bound": str(Fraction(1, 256 * (report.L + 1))),
                "guesses": report.guesses_examined,
                "wall_time": f"{elapsed:.6f}" if config.record_time else "",
            }
            if config.oracle:
                opt = brute_force_opt(inst, config.oracle_max_edges, config.oracle_max_customers).opt_revenue
                ratio = report.revenue / opt if opt else Fraction(1)
                row.update(opt=str(opt), ratio=str(ratio), ratio_decimal=f"{float(ratio):.6f}")
            rows.append(row)
            trial += 1
    if config.output:
        Path(config.output).write_text(rows_to_csv(rows))
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
