"""Exact optimum for tiny instances, plus the grid-rounding construction used to check bounds.

The optimum is found by enumerating winner sets.  For a fixed winner set W the
best prices solve the linear program

    max  sum_{i in W} price(P_i)
    s.t. price(P_i) <= b_i   (i in W),   prices >= 0,

which is solved exactly over the rationals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .decomp_solver import GammaGrid
from .decomposition import SkeletonInfo
from .model import Instance, PricingScheme, ValidationError, evaluate_revenue

Matrix = list[list[Fraction]]


class OracleGuardError(ValidationError):
    """Instance too large for brute force."""


@dataclass(frozen=True)
class OracleResult:
    opt_scheme: PricingScheme
    opt_revenue: Fraction
    winner_set: frozenset[int]


def lp_max_simplex(c: Sequence[Fraction], A: Matrix, b: Sequence[Fraction]) -> tuple[Fraction, list[Fraction]]:
    """Maximize ``c.x`` s.t. ``A x <= b``, ``x >= 0`` with ``b >= 0``.

    Dense tableau simplex over Fractions with Bland's rule.  Starts from the
    all-slack basis, so no phase one is needed.
    """
    rows, cols = len(A), len(c)
    if any(v < 0 for v in b):
        raise ValueError("right-hand side must be non-negative")
    width = cols + rows
    tab = [[Fraction(x) for x in A[i]] + [Fraction(int(i == j)) for j in range(rows)] + [Fraction(b[i])] for i in range(rows)]
    obj = [-Fraction(x) for x in c] + [Fraction(0)] * rows + [Fraction(0)]
    basis = list(range(cols, cols + rows))
    while True:
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(rows):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            raise ValueError("linear program is unbounded")
        pivot = tab[leave][enter]
        prow = [x / pivot for x in tab[leave]]
        tab[leave] = prow
        for i in range(rows):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], prow)]
        if obj[enter] != 0:
            f = obj[enter]
            obj = [x - f * y for x, y in zip(obj, prow)]
        basis[leave] = enter
    x = [Fraction(0)] * cols
    for i, var in enumerate(basis):
        if var < cols:
            x[var] = tab[i][-1]
    return obj[-1], x


def _solve_square(M: Matrix, rhs: list[Fraction]) -> Optional[list[Fraction]]:
    n = len(M)
    aug = [row[:] + [r] for row, r in zip(M, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def lp_max_vertices(c: Sequence[Fraction], A: Matrix, b: Sequence[Fraction]) -> tuple[Fraction, list[Fraction]]:
    """Same program as :func:`lp_max_simplex`, by enumerating every basic solution.

    Exponential; meant as an independent cross-check on tiny programs.
    """
    cols = len(c)
    constraints = [(list(map(Fraction, row)), Fraction(r)) for row, r in zip(A, b)]
    constraints += [([Fraction(int(i == j)) for j in range(cols)], Fraction(0)) for i in range(cols)]
    best_val, best_x = None, None
    for chosen in itertools.combinations(range(len(constraints)), cols):
        x = _solve_square([constraints[i][0] for i in chosen], [constraints[i][1] for i in chosen])
        if x is None or any(v < 0 for v in x):
            continue
        if any(sum(a * v for a, v in zip(row, x)) > r for row, r in zip(A, b)):
            continue
        val = sum(ci * v for ci, v in zip(c, x))
        if best_val is None or val > best_val:
            best_val, best_x = val, x
    return best_val, best_x


def brute_force_opt(instance: Instance, max_edges: int = 8, max_customers: int = 8) -> OracleResult:
    """Exact optimal pricing by winner-set enumeration (exponential in n)."""
    if instance.m > max_edges or instance.n > max_customers:
        raise OracleGuardError(
            f"oracle limited to m <= {max_edges}, n <= {max_customers}; got m={instance.m}, n={instance.n}"
        )
    paths = instance.paths
    budgets = [c.budget for c in instance.customers]
    subsets = sorted(
        range(1 << instance.n),
        key=lambda mask: (-sum((budgets[i] for i in range(instance.n) if mask >> i & 1), Fraction(0)), mask),
    )
    best_scheme = PricingScheme.zeros(instance.m)
    best_value = Fraction(0)
    for mask in subsets:
        winners = [i for i in range(instance.n) if mask >> i & 1]
        if sum((budgets[i] for i in winners), Fraction(0)) <= best_value:
            break
        variables = sorted({e for i in winners for e in paths[i]})
        col = {e: j for j, e in enumerate(variables)}
        A = []
        for i in winners:
            row = [Fraction(0)] * len(variables)
            for e in paths[i]:
                row[col[e]] = Fraction(1)
            A.append(row)
        c = [sum(row[j] for row in A) for j in range(len(variables))]
        _, x = lp_max_simplex(c, A, [budgets[i] for i in winners])
        scheme = PricingScheme.from_mapping(instance.m, {e: x[col[e]] for e in variables})
        value, _ = evaluate_revenue(instance, scheme)
        if value > best_value:
            best_scheme, best_value = scheme, value
    buyers = frozenset(
        i for i, c in enumerate(instance.customers) if best_scheme.total(paths[i]) <= c.budget
    )
    return OracleResult(best_scheme, best_value, buyers)


def grid_search_opt(instance: Instance, max_price: int) -> tuple[Fraction, PricingScheme]:
    """Best scheme with integer prices in ``0..max_price`` on every edge (a lower bound on OPT)."""
    best_value, best = Fraction(-1), None
    for prices in itertools.product(range(max_price + 1), repeat=instance.m):
        scheme = PricingScheme(tuple(Fraction(p) for p in prices))
        value, _ = evaluate_revenue(instance, scheme)
        if value > best_value:
            best_value, best = value, scheme
    return best_value, best


def gamma_round(
    instance: Instance, scheme: PricingScheme, skeleton: SkeletonInfo, grid: GammaGrid
) -> PricingScheme:
    """Round every segment total of ``scheme`` down onto ``grid``.

    Segment edges are first capped at ``grid.b_max``.  A segment whose total is
    below the smallest positive grid value is zeroed; otherwise its edges are
    scaled uniformly so the total becomes the largest grid value not above it.
    Non-skeleton edges keep their prices.
    """
    if len(scheme) != instance.m:
        raise ValidationError("scheme does not match the instance")
    prices = list(scheme.prices)
    low = grid.smallest_positive
    for edges in skeleton.segment_edges:
        for e in edges:
            prices[e] = min(prices[e], grid.b_max)
        total = sum((prices[e] for e in edges), Fraction(0))
        if low is None or total < low:
            for e in edges:
                prices[e] = Fraction(0)
            continue
        factor = grid.floor(total) / total
        for e in edges:
            prices[e] *= factor
    return PricingScheme(tuple(prices))
