"""Classify customers by recursive decomposition and price each class separately.

Level 1 decomposes the whole tree, level 2 decomposes every level-1 subtree,
and so on.  A customer belongs to the first level whose decomposition
separates her path.  Single-edge paths are never separated; they form one
extra terminal class that is priced exactly edge by edge.
"""

from __future__ import annotations

import logging
import math
import time
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .decomp_solver import DecompositionStats, Seed, SolverConfig, solve_decomposition
from .decomposition import Decomposition, balanced_k_decomposition, trivial_decomposition
from .model import Instance, PricingScheme, ValidationError, evaluate_revenue, restrict

log = logging.getLogger(__name__)


def choose_k(m: int, exponent: Fraction = Fraction(1, 2)) -> int:
    """``max(2, ceil(log2(m) ** exponent))``."""
    if m < 1:
        raise ValidationError("need at least one edge")
    exponent = Fraction(exponent)
    if exponent == Fraction(1, 2):
        # exact: smallest k with k*k >= log2 m, i.e. 2**(k*k) >= m
        k = 0
        while 2 ** (k * k) < m:
            k += 1
        return max(2, k)
    if not 0 < exponent < 1:
        raise ValidationError("exponent must lie in (0, 1)")
    return max(2, math.ceil(math.log2(m) ** float(exponent)))


def decay_ratio(k: int) -> Fraction:
    """Per-level shrink factor of the largest subtree: ``min(3/k, (2k+1)/(3k))``."""
    return min(Fraction(3, k), Fraction(2 * k + 1, 3 * k))


def level_bound(m: int, k: int) -> int:
    """``ceil(log2 m / log2(1/rho)) + 1`` with ``rho = decay_ratio(k)``."""
    rho = decay_ratio(k)
    if m <= 1:
        return 1
    return math.ceil(math.log2(m) / math.log2(1 / rho)) + 1


def is_separated(path, decomposition: Decomposition) -> bool:
    """True when no single subtree holds every edge of ``path``."""
    owner = decomposition.owner
    first = owner[path[0]]
    return any(owner[e] != first for e in path)


@dataclass(frozen=True)
class LevelEntry:
    subtree: frozenset[int]
    decomposition: Decomposition
    customers: tuple[int, ...]


@dataclass(frozen=True)
class ClassifiedInstance:
    levels: tuple[tuple[LevelEntry, ...], ...]
    terminal: dict[int, tuple[int, ...]]
    k: int
    level_count: int
    max_sizes: tuple[int, ...] = ()

    @property
    def L(self) -> int:
        return self.level_count

    def level_customers(self, level: int) -> list[int]:
        return sorted(i for entry in self.levels[level] for i in entry.customers)

    def terminal_customers(self) -> list[int]:
        return sorted(i for custs in self.terminal.values() for i in custs)


def classify(
    instance: Instance,
    k: Optional[int] = None,
    keep_empty: bool = True,
) -> ClassifiedInstance:
    """Recursive classification of the customers of ``instance``.

    Subtrees with at least ``k`` edges get a balanced k-decomposition, smaller
    ones (with at least 2 edges) the trivial decomposition.  ``max_sizes[l]`` is
    the largest subtree size produced at level ``l + 1``.  With
    ``keep_empty=False`` level entries without separated customers are dropped
    (the level count is unaffected), which keeps memory flat on large trees.
    """
    m = instance.m
    if k is None:
        k = choose_k(max(m, 1))
    if k < 2:
        raise ValidationError("k must be at least 2")
    tree = instance.tree
    paths = instance.paths
    levels: list[tuple[LevelEntry, ...]] = []
    max_sizes: list[int] = []
    terminal: dict[int, list[int]] = defaultdict(list)
    current = [(frozenset(range(m)), list(range(instance.n)))] if m else []
    while current:
        entries, following = [], []
        grew = False
        for subtree, custs in current:
            if len(subtree) == 1:
                (e,) = subtree
                if custs:
                    terminal[e].extend(custs)
                continue
            grew = True
            if len(subtree) >= k:
                dec = balanced_k_decomposition(tree, k, subtree)
            else:
                dec = trivial_decomposition(tree, subtree)
            owner = dec.owner
            separated = []
            child: list[list[int]] = [[] for _ in dec.subtrees]
            for i in custs:
                if is_separated(paths[i], dec):
                    separated.append(i)
                else:
                    child[owner[paths[i][0]]].append(i)
            if separated or keep_empty:
                entries.append(LevelEntry(subtree, dec, tuple(separated)))
            following.extend(zip(dec.subtrees, child))
        if not grew:
            break
        levels.append(tuple(entries))
        max_sizes.append(max(len(st) for st, _ in following))
        current = following
    return ClassifiedInstance(
        tuple(levels), {e: tuple(c) for e, c in sorted(terminal.items())}, k, len(levels), tuple(max_sizes)
    )


def single_edge_pricing(budgets) -> tuple[Fraction, Fraction]:
    """Optimal single-item price among the budgets (ties: smallest price) and its revenue."""
    budgets = sorted(Fraction(b) for b in budgets)
    if not budgets:
        raise ValidationError("no budgets to price")
    best_price, best_rev = None, None
    for j, price in enumerate(budgets):
        if j and budgets[j - 1] == price:
            continue
        revenue = price * (len(budgets) - j)
        if best_rev is None or revenue > best_rev:
            best_price, best_rev = price, revenue
    return best_price, best_rev


@dataclass
class SolveReport:
    k: int
    L: int
    class_revenues: list[Fraction] = field(default_factory=list)
    chosen_class: int = 0
    revenue: Fraction = Fraction(0)
    guesses_examined: int = 0
    fallbacks: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "k": self.k,
            "L": self.L,
            "class_revenues": [str(r) for r in self.class_revenues],
            "chosen_class": self.chosen_class,
            "terminal_class": self.L,
            "revenue": str(self.revenue),
            "guesses_examined": self.guesses_examined,
            "fallbacks": self.fallbacks,
        }
        if timing:
            out["elapsed_seconds"] = round(self.elapsed, 6)
        return out


def class_schemes(
    instance: Instance,
    classified: ClassifiedInstance,
    mode: str = "derandomized",
    seed: Seed = 0,
    config: SolverConfig = SolverConfig(),
) -> tuple[list[PricingScheme], list[DecompositionStats]]:
    """One glued scheme per class: levels in order, terminal class last."""
    schemes, all_stats = [], []
    for level, entries in enumerate(classified.levels):
        prices = [Fraction(0)] * instance.m
        for idx, entry in enumerate(entries):
            if not entry.customers:
                continue
            sub, edge_ids, vertex_ids = restrict(instance, entry.subtree, entry.customers)
            local_dec = entry.decomposition.relabel(edge_ids, vertex_ids)
            scheme, stats = solve_decomposition(
                sub, local_dec, mode=mode, seed=f"{seed}/{level}/{idx}", config=config
            )
            all_stats.append(stats)
            for j, e in enumerate(edge_ids):
                prices[e] = scheme[j]
        schemes.append(PricingScheme(tuple(prices)))
    prices = [Fraction(0)] * instance.m
    for e, custs in classified.terminal.items():
        prices[e], _ = single_edge_pricing(instance.customers[i].budget for i in custs)
    schemes.append(PricingScheme(tuple(prices)))
    return schemes, all_stats


def solve_full(
    instance: Instance,
    mode: str = "derandomized",
    seed: Seed = 0,
    config: SolverConfig = SolverConfig(),
    k: Optional[int] = None,
) -> tuple[PricingScheme, SolveReport]:
    """Classify, price every class, and return the scheme with the highest total revenue."""
    start = time.perf_counter()
    classified = classify(instance, k=k)
    schemes, stats = class_schemes(instance, classified, mode, seed, config)
    report = SolveReport(classified.k, classified.L)
    best = 0
    for idx, scheme in enumerate(schemes):
        value, _ = evaluate_revenue(instance, scheme)
        report.class_revenues.append(value)
        if value > report.class_revenues[best]:
            best = idx
    report.chosen_class = best
    report.revenue = report.class_revenues[best]
    report.guesses_examined = sum(s.guesses_examined for s in stats)
    report.fallbacks = sorted({f for s in stats for f in s.fallbacks})
    report.elapsed = time.perf_counter() - start
    log.info("k=%d L=%d revenue=%s class=%d", report.k, report.L, report.revenue, best)
    return schemes[best], report
