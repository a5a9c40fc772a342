"""Pricing for one decomposition whose customers are all separated.

Two candidate schemes are built and the better one is kept:

* scenario I prices only non-skeleton edges: subtrees are switched on or off
  by coins and every active subtree is solved as a single-source problem
  towards its contracted skeleton part;
* scenario II prices only skeleton edges: a total price for every segment is
  guessed from a geometric grid, then each segment gets one of four
  assignments that all keep the segment total equal to the guess.

Derandomized mode enumerates the coin vectors and the assignment choices
instead of sampling them.
"""

from __future__ import annotations

import itertools
import logging
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Union

from .decomposition import Decomposition, SkeletonInfo, extract_skeleton
from .model import Instance, PricingScheme, Tree
from .single_source import SingleSourceInstance, path_single_source, solve_single_source

log = logging.getLogger(__name__)

Seed = Union[int, str, None]


class CapExceeded(RuntimeError):
    """An enumeration is larger than its configured cap and fallback is off."""


class Selector(IntEnum):
    FIRST_EDGE = 0
    LAST_EDGE = 1
    LEFT_ROOTED = 2
    RIGHT_ROOTED = 3


@dataclass(frozen=True)
class SolverConfig:
    max_guesses: int = 10**6
    max_choices: int = 10**6
    fallback_trials: int = 64
    allow_fallback: bool = True


@dataclass(frozen=True)
class GammaGrid:
    values: tuple[Fraction, ...]
    b_max: Fraction
    n: int
    m: int

    def floor(self, x: Fraction) -> Fraction:
        """Largest grid value not above ``x`` (``x >= 0``)."""
        return self.values[bisect_right(self.values, x) - 1]

    @property
    def smallest_positive(self) -> Optional[Fraction]:
        return self.values[1] if len(self.values) > 1 else None


def build_gamma_grid(n: int, m: int, b_max: Fraction) -> GammaGrid:
    """``{0} U {2^l * b_max / (4nm) : 0 <= l <= floor(log2(4 n m^2))}``."""
    if n < 1 or m < 1:
        raise ValueError("grid needs n >= 1 and m >= 1")
    b_max = Fraction(b_max)
    if b_max < 0:
        raise ValueError("b_max must be non-negative")
    if b_max == 0:
        return GammaGrid((Fraction(0),), b_max, n, m)
    top = (4 * n * m * m).bit_length() - 1
    base = b_max / (4 * n * m)
    return GammaGrid((Fraction(0),) + tuple(base * 2**ell for ell in range(top + 1)), b_max, n, m)


@dataclass
class DecompositionStats:
    scenario1_revenue: Fraction = Fraction(0)
    scenario2_revenue: Optional[Fraction] = None
    best_scenario: int = 1
    guesses_examined: int = 0
    outcomes_evaluated: int = 0
    fallbacks: list[str] = field(default_factory=list)


def _rng(seed: Seed) -> random.Random:
    return random.Random(seed if seed is None or isinstance(seed, (int, str)) else str(seed))


class _Revenue:
    """Fast exact revenue of a price list for a fixed set of customers."""

    def __init__(self, instance: Instance):
        self.paths = instance.paths
        self.budgets = [c.budget for c in instance.customers]

    def __call__(self, prices: Sequence[Fraction]) -> Fraction:
        total = Fraction(0)
        for path, budget in zip(self.paths, self.budgets):
            p = sum([prices[e] for e in path], Fraction(0))
            if p <= budget:
                total += p
        return total


# -- scenario I ----------------------------------------------------------------


class _ScenarioOne:
    def __init__(self, sub: Instance, dec: Decomposition, skel: SkeletonInfo):
        self.m = sub.m
        self.k = dec.k
        self.pieces = [self._solve_subtree(sub, dec, skel, j) for j in range(dec.k)]

    @staticmethod
    def _solve_subtree(sub: Instance, dec: Decomposition, skel: SkeletonInfo, j: int) -> dict[int, Fraction]:
        tree = sub.tree
        on_skeleton = skel.vertices
        edges = sorted(dec.subtrees[j] - skel.skeleton_edges)
        verts = {v for e in dec.subtrees[j] for v in tree.edges[e]}
        if not edges or not (verts & on_skeleton):
            return {}
        off = sorted(verts - on_skeleton)
        local = {v: i + 1 for i, v in enumerate(off)}
        for v in verts & on_skeleton:
            local[v] = 0
        contracted = Tree(len(off) + 1, tuple((local[tree.edges[e][0]], local[tree.edges[e][1]]) for e in edges))
        targets = []
        for c in sub.customers:
            for x in (c.s, c.t):
                if x in local and local[x] != 0:
                    targets.append((local[x], c.budget))
        scheme, _ = solve_single_source(SingleSourceInstance(contracted, 0, tuple(targets)))
        return {e: scheme[i] for i, e in enumerate(edges)}

    def prices(self, coins: Sequence[bool]) -> list[Fraction]:
        out = [Fraction(0)] * self.m
        for active, piece in zip(coins, self.pieces):
            if active:
                for e, p in piece.items():
                    out[e] = p
        return out


def scenario1(
    sub: Instance, decomposition: Decomposition, skeleton: SkeletonInfo, coins: Sequence[bool]
) -> PricingScheme:
    """Scheme for one coin vector (``coins[j]`` true means subtree j is active)."""
    if len(coins) != decomposition.k:
        raise ValueError("one coin per subtree required")
    return PricingScheme(tuple(_ScenarioOne(sub, decomposition, skeleton).prices(coins)))


# -- scenario II ---------------------------------------------------------------


class _ScenarioTwo:
    def __init__(self, sub: Instance, dec: Decomposition, skel: SkeletonInfo):
        self.m = sub.m
        self.segments = skel.segments
        self.segment_edges = skel.segment_edges
        self.budgets = [c.budget for c in sub.customers]
        on_skeleton = skel.vertices
        interior: dict[int, tuple[int, int]] = {}
        for q, verts in enumerate(skel.segments):
            for j in range(1, len(verts) - 1):
                interior[verts[j]] = (q, j)

        seg_of_edge = {e: q for q, es in enumerate(skel.segment_edges) for e in es}
        self.contained: list[list[int]] = []
        self.left: list[list[tuple[int, int]]] = [[] for _ in skel.segments]
        self.right: list[list[tuple[int, int]]] = [[] for _ in skel.segments]
        for i, (pv, pe) in enumerate(zip(sub.path_vertices, sub.paths)):
            hits = [j for j, v in enumerate(pv) if v in on_skeleton]
            if not hits:
                self.contained.append([])
                continue
            a, b = hits[0], hits[-1]
            covered: dict[int, int] = {}
            for e in pe[a:b]:
                covered[seg_of_edge[e]] = covered.get(seg_of_edge[e], 0) + 1
            self.contained.append(
                sorted(q for q, cnt in covered.items() if cnt == len(skel.segment_edges[q]))
            )
            if a == b:
                continue
            for end, step in ((a, pv[a + 1]), (b, pv[b - 1])):
                if pv[end] in interior:
                    q, j = interior[pv[end]]
                    verts = skel.segments[q]
                    if step == verts[j - 1]:
                        self.left[q].append((i, j))
                    else:
                        self.right[q].append((i, len(verts) - 1 - j))

    def options(self, guess: Sequence[Fraction]) -> list[tuple[list[Fraction], ...]]:
        """Per segment, edge prices (in segment order) for each of the four selectors."""
        residual = [b - sum((guess[q] for q in qs), Fraction(0)) for b, qs in zip(self.budgets, self.contained)]
        out = []
        for q, verts in enumerate(self.segments):
            g = guess[q]
            length = len(verts) - 1
            first = [g] + [Fraction(0)] * (length - 1)
            last = [Fraction(0)] * (length - 1) + [g]
            left = self._rooted(g, length, self.left[q], residual)
            right = self._rooted(g, length, self.right[q], residual)[::-1]
            out.append((first, last, left, right))
        return out

    @staticmethod
    def _rooted(g: Fraction, length: int, members, residual) -> list[Fraction]:
        if length == 1:
            return [g]
        targets = [(j, min(g, residual[i])) for i, j in members if residual[i] >= 0]
        prices, _ = path_single_source(length - 1, targets)
        leftover = g - sum(prices, Fraction(0))
        if leftover < 0:
            raise AssertionError(f"negative leftover price {leftover} for segment total {g}")
        return prices + [leftover]

    def prices(self, options, choice: Sequence[int]) -> list[Fraction]:
        out = [Fraction(0)] * self.m
        for q, sel in enumerate(choice):
            for e, p in zip(self.segment_edges[q], options[q][sel]):
                out[e] = p
        return out


def scenario2(
    sub: Instance,
    decomposition: Decomposition,
    skeleton: SkeletonInfo,
    guess: Sequence[Fraction],
    choice: Sequence[Union[Selector, int]],
) -> PricingScheme:
    """Skeleton-only scheme for a segment-total guess and one selector per segment."""
    if not skeleton.segments:
        raise ValueError("scenario II needs a skeleton with at least one edge")
    if len(guess) != len(skeleton.segments) or len(choice) != len(skeleton.segments):
        raise ValueError("one guess and one selector per segment required")
    two = _ScenarioTwo(sub, decomposition, skeleton)
    return PricingScheme(tuple(two.prices(two.options(guess), [int(c) for c in choice])))


# -- search --------------------------------------------------------------------


def _space(
    values: Sequence, width: int, cap: int, rng: random.Random, what: str,
    config: SolverConfig, stats: Optional[DecompositionStats],
) -> Iterator[tuple]:
    """Full product space, or a seeded sample of it when above ``cap``."""
    size = len(values) ** width
    if size <= cap:
        return itertools.product(values, repeat=width)
    if not config.allow_fallback:
        raise CapExceeded(f"{what}: {size} outcomes exceed cap {cap}")
    note = f"{what}: sampled {config.fallback_trials} of {size}"
    if stats is not None and note not in stats.fallbacks:
        stats.fallbacks.append(note)
    log.info("%s: %d outcomes exceed cap %d, sampling %d", what, size, cap, config.fallback_trials)
    return iter([tuple(rng.choice(values) for _ in range(width)) for _ in range(config.fallback_trials)])


def solve_decomposition(
    sub: Instance,
    decomposition: Decomposition,
    mode: str = "derandomized",
    seed: Seed = 0,
    config: SolverConfig = SolverConfig(),
    skeleton: Optional[SkeletonInfo] = None,
) -> tuple[PricingScheme, DecompositionStats]:
    """Best of the scenario I and scenario II schemes, measured on ``sub``."""
    if mode not in ("derandomized", "randomized"):
        raise ValueError(f"unknown mode {mode!r}")
    stats = DecompositionStats()
    if not sub.customers:
        return PricingScheme.zeros(sub.m), stats
    rng = _rng(seed)
    skel = skeleton if skeleton is not None else extract_skeleton(sub.tree, decomposition)
    revenue = _Revenue(sub)

    one = _ScenarioOne(sub, decomposition, skel)
    if mode == "derandomized":
        coin_space = _space((False, True), decomposition.k, config.max_choices, rng, "coins", config, stats)
    else:
        coin_space = [tuple(rng.random() < 0.5 for _ in range(decomposition.k))]
    best_prices, best_value = None, Fraction(-1)
    for coins in coin_space:
        prices = one.prices(coins)
        value = revenue(prices)
        stats.outcomes_evaluated += 1
        if value > best_value:
            best_prices, best_value = prices, value
    stats.scenario1_revenue = best_value

    if skel.segments:
        two = _ScenarioTwo(sub, decomposition, skel)
        grid = build_gamma_grid(sub.n, sub.m, sub.b_max)
        width = len(skel.segments)
        s2_value = Fraction(-1)
        guesses = _space(grid.values, width, config.max_guesses, rng, "guesses", config, stats)
        for guess in guesses:
            options = two.options(guess)
            if mode == "derandomized":
                choices = _space(tuple(Selector), width, config.max_choices, rng, "choices", config, stats)
            else:
                choices = [tuple(rng.choice(tuple(Selector)) for _ in range(width))]
            for choice in choices:
                prices = two.prices(options, choice)
                value = revenue(prices)
                stats.outcomes_evaluated += 1
                if value > s2_value:
                    s2_value = value
                    if value > best_value:
                        best_prices, best_value = prices, value
                        stats.best_scenario = 2
            stats.guesses_examined += 1
            if stats.guesses_examined % 1000 == 0:
                log.debug("guesses %d, best revenue %s", stats.guesses_examined, best_value)
        stats.scenario2_revenue = s2_value
    return PricingScheme(tuple(best_prices)), stats


def expected_revenue(
    sub: Instance,
    decomposition: Decomposition,
    scenario: int,
    guess: Optional[Sequence[Fraction]] = None,
    config: SolverConfig = SolverConfig(),
) -> Fraction:
    """Exact mean revenue over the whole uniform sample space of one scenario.

    Scenario 1 averages over all 2^k coin vectors, scenario 2 over all 4^|segments|
    selector vectors for the fixed ``guess``.
    """
    skel = extract_skeleton(sub.tree, decomposition)
    revenue = _Revenue(sub)
    if scenario == 1:
        if 2**decomposition.k > config.max_choices:
            raise CapExceeded(f"2^{decomposition.k} coin vectors exceed cap")
        one = _ScenarioOne(sub, decomposition, skel)
        outcomes = [revenue(one.prices(c)) for c in itertools.product((False, True), repeat=decomposition.k)]
        return sum(outcomes, Fraction(0)) / len(outcomes)
    if scenario == 2:
        if guess is None:
            raise ValueError("scenario 2 expectation needs a guess")
        two = _ScenarioTwo(sub, decomposition, skel)
        return _mean_over_choices(two, revenue, guess, config)
    raise ValueError(f"unknown scenario {scenario!r}")


def _mean_over_choices(two: _ScenarioTwo, revenue: _Revenue, guess, config: SolverConfig) -> Fraction:
    width = len(two.segments)
    if 4**width > config.max_choices:
        raise CapExceeded(f"4^{width} selector vectors exceed cap")
    options = two.options(guess)
    outcomes = [revenue(two.prices(options, c)) for c in itertools.product(range(4), repeat=width)]
    return sum(outcomes, Fraction(0)) / len(outcomes)


def scenario2_expectations(
    sub: Instance, decomposition: Decomposition, config: SolverConfig = SolverConfig()
) -> Iterator[tuple[tuple[Fraction, ...], Fraction]]:
    """``(guess, exact scenario II expectation)`` for every guess on the grid."""
    skel = extract_skeleton(sub.tree, decomposition)
    if not skel.segments:
        return
    two = _ScenarioTwo(sub, decomposition, skel)
    revenue = _Revenue(sub)
    grid = build_gamma_grid(max(sub.n, 1), sub.m, sub.b_max)
    width = len(skel.segments)
    if len(grid.values) ** width > config.max_guesses:
        raise CapExceeded(f"{len(grid.values)}^{width} guesses exceed cap")
    for guess in itertools.product(grid.values, repeat=width):
        yield guess, _mean_over_choices(two, revenue, guess, config)
