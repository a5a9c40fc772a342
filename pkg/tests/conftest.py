from __future__ import annotations

import random
from collections import deque
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from tollbooth.bench import random_tree, tree_from_prufer
from tollbooth.classification import is_separated
from tollbooth.model import Customer, Instance, Tree


def path_tree(m: int) -> Tree:
    return Tree(m + 1, tuple((j, j + 1) for j in range(m)))


@st.composite
def trees(draw, min_edges=1, max_edges=30):
    m = draw(st.integers(min_edges, max_edges))
    if m == 1:
        return Tree(2, ((0, 1),))
    seq = draw(st.lists(st.integers(0, m), min_size=m - 1, max_size=m - 1))
    return tree_from_prufer(seq)


@st.composite
def instances(draw, min_edges=1, max_edges=8, max_customers=5, budget_max=10, min_budget=0):
    tree = draw(trees(min_edges, max_edges))
    n = draw(st.integers(0, max_customers))
    customers = []
    for _ in range(n):
        s = draw(st.integers(0, tree.vertex_count - 1))
        t = draw(st.integers(0, tree.vertex_count - 1).filter(lambda v: v != s))
        b = draw(st.integers(min_budget, budget_max))
        customers.append(Customer(s, t, Fraction(b)))
    return Instance(tree, tuple(customers))


def bfs_path(tree: Tree, u: int, v: int) -> list[int]:
    """Independent path oracle: plain BFS with predecessor edges."""
    prev = {u: None}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for y, e in tree.adjacency[x]:
            if y not in prev:
                prev[y] = (x, e)
                queue.append(y)
    out = []
    while prev[v] is not None:
        x, e = prev[v]
        out.append(e)
        v = x
    return out[::-1]


def random_customers(tree: Tree, n: int, rng: random.Random, budget_max: int = 10):
    out = []
    for _ in range(n):
        s, t = rng.sample(range(tree.vertex_count), 2)
        out.append(Customer(s, t, Fraction(rng.randint(1, budget_max))))
    return out


def separated_instance(tree: Tree, dec, customers) -> Instance:
    """Keep only customers whose path the decomposition separates."""
    inst = Instance(tree, tuple(customers))
    keep = [c for c, p in zip(inst.customers, inst.paths) if is_separated(p, dec)]
    return Instance(tree, tuple(keep))


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def acceptance():
    """``record(number, passed, detail)`` stores one summary line per criterion."""

    def record(number: int, passed: bool, detail: str) -> None:
        _ACCEPTANCE[number] = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])


__all__ = ["bfs_path", "instances", "path_tree", "random_customers", "random_tree", "separated_instance", "trees"]
