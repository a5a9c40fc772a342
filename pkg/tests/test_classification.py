import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tollbooth.classification import (
    choose_k,
    class_schemes,
    classify,
    decay_ratio,
    is_separated,
    level_bound,
    single_edge_pricing,
    solve_full,
)
from tollbooth.decomp_solver import solve_decomposition
from tollbooth.decomposition import Decomposition, border_vertices, trivial_decomposition
from tollbooth.model import Customer, Instance, PricingScheme, Tree, ValidationError, evaluate_revenue, restrict
from tollbooth.oracle import brute_force_opt

from conftest import instances, path_tree, random_customers, random_tree

F = Fraction


def test_choose_k_examples():
    assert choose_k(18) == 3
    assert choose_k(2) == 2
    assert choose_k(65536) == 4
    assert choose_k(65537) == 5
    assert choose_k(1) == 2


def test_choose_k_against_float_formula():
    for m in range(1, 5000):
        expected = max(2, math.ceil(math.sqrt(math.log2(m))))
        assert choose_k(m) == expected, m


def test_choose_k_other_exponent():
    assert choose_k(2**27, F(1, 3)) == 3
    with pytest.raises(ValidationError):
        choose_k(10, F(3, 2))
    with pytest.raises(ValidationError):
        choose_k(0)


def test_decay_ratio():
    assert decay_ratio(2) == F(5, 6)
    assert decay_ratio(3) == F(7, 9)
    assert decay_ratio(9) == F(1, 3)


def three_subtrees():
    """Three subtrees glued at vertex 0 and five customers.

    Subtree A: 0-1-2, B: 0-3-4, C: 0-5-6-7.
    """
    tree = Tree(8, ((0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6), (6, 7)))
    parts = (frozenset({0, 1}), frozenset({2, 3}), frozenset({4, 5, 6}))
    dec = Decomposition(parts, border_vertices(tree, parts))
    customers = (
        Customer(2, 4, F(1)),  # 1: A to B
        Customer(1, 7, F(1)),  # 2: A to C
        Customer(4, 6, F(1)),  # 3: B to C
        Customer(0, 2, F(1)),  # 4: inside A, touching the border vertex
        Customer(5, 7, F(1)),  # 5: inside C
    )
    return Instance(tree, customers), dec


def test_separation_configuration():
    inst, dec = three_subtrees()
    assert dec.border_vertices == frozenset({0})
    flags = [is_separated(p, dec) for p in inst.paths]
    assert flags == [True, True, True, False, False]
    for path, flag in zip(inst.path_vertices, flags):
        if flag:
            assert 0 in path


def test_single_edge_never_separated_by_trivial():
    tree = path_tree(3)
    dec = trivial_decomposition(tree)
    assert not is_separated([1], dec)
    assert is_separated([0, 1], dec)


def test_one_edge_tree_all_terminal():
    inst = Instance(Tree(2, ((0, 1),)), (Customer(0, 1, F(3)), Customer(1, 0, F(5))))
    cl = classify(inst)
    assert cl.L == 0
    assert cl.terminal == {0: (0, 1)}


def test_four_edge_path_with_k_two():
    inst = Instance(path_tree(4), (Customer(1, 3, F(4)), Customer(0, 1, F(2)), Customer(0, 2, F(3))))
    cl = classify(inst, k=2)
    (top,) = cl.levels[0]
    assert sorted(top.decomposition.sizes()) == [2, 2]
    assert top.decomposition.border_vertices == frozenset({2})
    assert cl.level_customers(0) == [0]
    # 0->2 is split at level 2, 0->1 is a single edge
    assert cl.level_customers(1) == [2]
    assert cl.terminal_customers() == [1]


def test_eighteen_edges_level_bound():
    rng = random.Random(18)
    for _ in range(30):
        tree = random_tree(18, rng)
        cl = classify(Instance(tree, ()))
        assert cl.k == 3
        assert cl.L <= level_bound(18, 3)
    assert level_bound(18, 3) == math.ceil(math.log2(18) / math.log2(9 / 7)) + 1


def check_partition(inst, cl):
    seen = []
    prev_subtrees = [frozenset(range(inst.m))]
    for level, entries in enumerate(cl.levels):
        for entry in entries:
            assert entry.subtree in prev_subtrees
            for i in entry.customers:
                assert set(inst.paths[i]) <= entry.subtree
                assert is_separated(inst.paths[i], entry.decomposition)
            seen.extend(entry.customers)
        prev_subtrees = [st for entry in entries for st in entry.decomposition.subtrees]
    for e, custs in cl.terminal.items():
        for i in custs:
            assert inst.paths[i] == (e,)
        seen.extend(custs)
    assert sorted(seen) == list(range(inst.n))


@settings(max_examples=150, deadline=None)
@given(instances(1, 40, max_customers=12, min_budget=1), st.sampled_from([None, 2, 3, 4, 5]))
def test_classification_partition(inst, k):
    cl = classify(inst, k=k)
    check_partition(inst, cl)
    m = inst.m
    rho = decay_ratio(cl.k)
    for level, size in enumerate(cl.max_sizes, start=1):
        assert size <= rho**level * m or size == 1
    assert cl.L <= level_bound(m, cl.k)


def test_drop_empty_entries_keeps_level_count():
    rng = random.Random(4)
    tree = random_tree(60, rng)
    inst = Instance(tree, tuple(random_customers(tree, 5, rng)))
    full, lean = classify(inst), classify(inst, keep_empty=False)
    assert full.L == lean.L
    assert all(e.customers for entries in lean.levels for e in entries)
    assert [full.level_customers(j) for j in range(full.L)] == [lean.level_customers(j) for j in range(lean.L)]


def test_bad_k():
    with pytest.raises(ValidationError):
        classify(Instance(path_tree(3), ()), k=1)


def test_single_edge_pricing_examples():
    assert single_edge_pricing([F(3), F(5)]) == (F(3), F(6))
    assert single_edge_pricing([F(1)]) == (F(1), F(1))
    assert single_edge_pricing([F(2), F(2), F(7)]) == (F(7), F(7))
    assert single_edge_pricing([F(2), F(4)]) == (F(2), F(4))
    with pytest.raises(ValidationError):
        single_edge_pricing([])


@given(st.lists(st.fractions(min_value=0, max_value=20, max_denominator=5), min_size=1, max_size=8))
def test_single_edge_pricing_is_optimal(budgets):
    price, revenue = single_edge_pricing(budgets)
    assert price in budgets
    assert revenue == price * sum(b >= price for b in budgets)
    for p in budgets:
        assert p * sum(b >= p for b in budgets) <= revenue


def test_solve_full_no_customers():
    scheme, report = solve_full(Instance(path_tree(5), ()))
    assert scheme == PricingScheme.zeros(5)
    assert report.revenue == 0


@settings(max_examples=60, deadline=None)
@given(instances(1, 12, max_customers=0), st.integers(1, 10), st.data())
def test_one_customer_gets_her_budget(inst, budget, data):
    tree = inst.tree
    s = data.draw(st.integers(0, tree.vertex_count - 1))
    t = data.draw(st.integers(0, tree.vertex_count - 1).filter(lambda v: v != s))
    inst = Instance(tree, (Customer(s, t, F(budget)),))
    scheme, report = solve_full(inst)
    assert report.revenue == budget == brute_force_opt(inst, 12, 8).opt_revenue
    assert evaluate_revenue(inst, scheme)[0] == budget


def test_gluing_and_selection():
    rng = random.Random(9)
    for trial in range(25):
        tree = random_tree(rng.randint(4, 30), rng)
        inst = Instance(tree, tuple(random_customers(tree, 8, rng)))
        k = rng.choice([None, 3, 4])
        cl = classify(inst, k=k)
        schemes, _ = class_schemes(inst, cl, seed=trial)
        for level, entries in enumerate(cl.levels):
            glued = schemes[level]
            _, per_glued = evaluate_revenue(inst, glued)
            class_total = F(0)
            for idx, entry in enumerate(entries):
                if not entry.customers:
                    continue
                sub, edge_ids, vertex_ids = restrict(inst, entry.subtree, entry.customers)
                local, _ = solve_decomposition(
                    sub, entry.decomposition.relabel(edge_ids, vertex_ids), seed=f"{trial}/{level}/{idx}"
                )
                assert [glued[e] for e in edge_ids] == list(local.prices)
                _, per_local = evaluate_revenue(sub, local)
                for j, i in enumerate(entry.customers):
                    assert per_glued[i] == per_local[j]
                class_total += sum(per_local)
            assert evaluate_revenue(inst, glued)[0] >= class_total
        scheme, report = solve_full(inst, seed=trial, k=k)
        assert report.revenue == max(report.class_revenues)
        assert report.class_revenues.index(report.revenue) == report.chosen_class
        assert evaluate_revenue(inst, scheme)[0] == report.revenue
        assert len(report.class_revenues) == cl.L + 1


def test_report_dict():
    rng = random.Random(1)
    tree = random_tree(8, rng)
    inst = Instance(tree, tuple(random_customers(tree, 4, rng)))
    _, report = solve_full(inst)
    d = report.to_dict(timing=False)
    assert "elapsed_seconds" not in d
    assert d["terminal_class"] == report.L
    assert F(d["revenue"]) == report.revenue
    assert "elapsed_seconds" in report.to_dict()


def test_randomized_mode_reproducible():
    rng = random.Random(6)
    tree = random_tree(25, rng)
    inst = Instance(tree, tuple(random_customers(tree, 8, rng)))
    a, _ = solve_full(inst, mode="randomized", seed=3, k=3)
    b, _ = solve_full(inst, mode="randomized", seed=3, k=3)
    assert a == b
