"""Exact single-source tollbooth pricing on trees.

Every customer wants the path from a common root to her own target.  Prices
are chosen through cumulative root-to-vertex prices drawn from the candidate
set {0} U budgets; a child's cumulative price is never below its parent's.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .model import PricingScheme, Tree, ValidationError, as_fraction


@dataclass(frozen=True)
class SingleSourceInstance:
    tree: Tree
    root: int
    customers: tuple[tuple[int, Fraction], ...] = ()

    def __post_init__(self) -> None:
        self.tree._check_vertex(self.root)
        custs = []
        for target, budget in self.customers:
            self.tree._check_vertex(target)
            if target == self.root:
                raise ValidationError("a single-source customer cannot target the root")
            budget = as_fraction(budget)
            if budget < 0:
                raise ValidationError(f"negative budget {budget}")
            custs.append((target, budget))
        object.__setattr__(self, "customers", tuple(custs))


def _rooted(tree: Tree, root: int):
    parent = [-1] * tree.vertex_count
    parent_edge = [-1] * tree.vertex_count
    order = [root]
    seen = [False] * tree.vertex_count
    seen[root] = True
    for u in order:
        for w, e in tree.adjacency[u]:
            if not seen[w]:
                seen[w] = True
                parent[w] = u
                parent_edge[w] = e
                order.append(w)
    return parent, parent_edge, order


def solve_single_source(inst: SingleSourceInstance) -> tuple[PricingScheme, Fraction]:
    """Optimal pricing and its revenue.

    Ties between cumulative prices go to the smallest candidate.
    """
    tree = inst.tree
    cands = sorted({Fraction(0)} | {b for _, b in inst.customers})
    width = len(cands)
    parent, parent_edge, order = _rooted(tree, inst.root)

    budgets_at: list[list[Fraction]] = [[] for _ in range(tree.vertex_count)]
    for target, budget in inst.customers:
        budgets_at[target].append(budget)

    best = [[Fraction(0)] * width for _ in range(tree.vertex_count)]
    choice: list[list[int]] = [[] for _ in range(tree.vertex_count)]
    for u in reversed(order):
        if u == inst.root:
            continue
        bs = sorted(budgets_at[u])
        # value of putting cumulative price cands[j] at u
        h = [best[u][j] + cands[j] * (len(bs) - bisect_left(bs, cands[j])) for j in range(width)]
        arg = [0] * width
        top, top_j = None, width - 1
        for j in range(width - 1, -1, -1):
            if top is None or h[j] >= top:
                top, top_j = h[j], j
            arg[j] = top_j
        choice[u] = arg
        row = best[parent[u]]
        for j in range(width):
            row[j] += h[arg[j]]

    prices = [Fraction(0)] * tree.edge_count
    level = [0] * tree.vertex_count
    for u in order:
        if u == inst.root:
            continue
        j = choice[u][level[parent[u]]]
        level[u] = j
        prices[parent_edge[u]] = cands[j] - cands[level[parent[u]]]
    return PricingScheme(tuple(prices)), best[inst.root][0]


def cumulative_prices(inst: SingleSourceInstance, scheme: PricingScheme) -> list[Fraction]:
    """Root-to-vertex price for every vertex."""
    parent, parent_edge, order = _rooted(inst.tree, inst.root)
    cum = [Fraction(0)] * inst.tree.vertex_count
    for u in order[1:]:
        cum[u] = cum[parent[u]] + scheme[parent_edge[u]]
    return cum


def single_source_revenue(inst: SingleSourceInstance, scheme: PricingScheme) -> Fraction:
    cum = cumulative_prices(inst, scheme)
    return sum((cum[t] for t, b in inst.customers if cum[t] <= b), Fraction(0))


def prefix_budget_violations(
    inst: SingleSourceInstance, scheme: PricingScheme, scope: str = "path"
) -> list[int]:
    """Vertices whose positive cumulative price is not a qualifying customer budget.

    ``scope="path"``: the budget must belong to a customer whose target lies on
    the root-to-vertex path.  ``scope="any"``: any customer's budget will do,
    which is what keeps cumulative prices at or below the largest budget.
    """
    if scope not in ("path", "any"):
        raise ValueError(f"unknown scope {scope!r}")
    parent, _, order = _rooted(inst.tree, inst.root)
    cum = cumulative_prices(inst, scheme)
    if scope == "any":
        everything = {b for _, b in inst.customers}
        return [u for u in order[1:] if cum[u] > 0 and cum[u] not in everything]
    pool: list[set[Fraction]] = [set() for _ in range(inst.tree.vertex_count)]
    for t, b in inst.customers:
        pool[t].add(b)
    for u in order[1:]:
        pool[u] |= pool[parent[u]]
    return [u for u in order[1:] if cum[u] > 0 and cum[u] not in pool[u]]


def path_single_source(
    length: int, targets: Sequence[tuple[int, Fraction]]
) -> tuple[list[Fraction], Fraction]:
    """Single-source pricing on the path 0-1-...-length rooted at 0.

    Returns the edge prices in path order and the optimal revenue.
    """
    tree = Tree(length + 1, tuple((j, j + 1) for j in range(length)))
    scheme, revenue = solve_single_source(SingleSourceInstance(tree, 0, tuple(targets)))
    return list(scheme.prices), revenue
