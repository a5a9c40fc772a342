"""Instances, pricing schemes and revenue evaluation for tollbooth pricing on trees.

All budgets and prices are :class:`fractions.Fraction` values so that equality
tests (segment totals, revenue comparisons) are exact.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

Rational = Union[int, Fraction, str]


class ValidationError(ValueError):
    """Raised when an instance, scheme or file violates its invariants."""


def as_fraction(value: Rational) -> Fraction:
    if isinstance(value, bool):
        raise ValidationError(f"not a rational value: {value!r}")
    if isinstance(value, float):
        raise ValidationError(f"floats are not accepted, use 'p/q' strings: {value!r}")
    try:
        return Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ValidationError(f"not a rational value: {value!r}") from exc


@dataclass(frozen=True)
class Tree:
    """Undirected tree on vertices ``0 .. vertex_count - 1``.

    Edge ids are positions in ``edges``.
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        n = self.vertex_count
        if n < 1:
            raise ValidationError("a tree needs at least one vertex")
        if len(edges) != n - 1:
            raise ValidationError(f"{n} vertices need {n - 1} edges, got {len(edges)}")
        seen = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge ({u}, {v}) has an invalid endpoint")
            if u == v:
                raise ValidationError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValidationError(f"duplicate edge {key}")
            seen.add(key)
        if len(self._rooted[3]) != n:
            raise ValidationError("edges do not connect all vertices")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """``adjacency[v]`` lists ``(neighbour, edge_id)`` pairs sorted by edge id."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.vertex_count)]
        for eid, (u, v) in enumerate(self.edges):
            adj[u].append((v, eid))
            adj[v].append((u, eid))
        return tuple(tuple(a) for a in adj)

    @cached_property
    def _rooted(self) -> tuple[list[int], list[int], list[int], list[int]]:
        """BFS from vertex 0: ``(parent, parent_edge, depth, order)``."""
        adj = self.adjacency
        parent = [-1] * self.vertex_count
        parent_edge = [-1] * self.vertex_count
        depth = [0] * self.vertex_count
        seen = [False] * self.vertex_count
        seen[0] = True
        order = [0]
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for w, eid in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    parent[w] = u
                    parent_edge[w] = eid
                    depth[w] = depth[u] + 1
                    order.append(w)
                    queue.append(w)
        return parent, parent_edge, depth, order

    def _check_vertex(self, v: int) -> None:
        if not (isinstance(v, int) and 0 <= v < self.vertex_count):
            raise ValidationError(f"invalid vertex id {v!r}")

    def path_vertices(self, u: int, v: int) -> list[int]:
        """Vertices of the unique u-v path, from u to v inclusive."""
        self._check_vertex(u)
        self._check_vertex(v)
        parent, _, depth, _ = self._rooted
        left, right = [u], [v]
        a, b = u, v
        while depth[a] > depth[b]:
            a = parent[a]
            left.append(a)
        while depth[b] > depth[a]:
            b = parent[b]
            right.append(b)
        while a != b:
            a = parent[a]
            b = parent[b]
            left.append(a)
            right.append(b)
        right.pop()
        return left + right[::-1]

    def path(self, u: int, v: int) -> list[int]:
        """Edge ids of the unique u-v path, ordered from u to v."""
        verts = self.path_vertices(u, v)
        parent, parent_edge, _, _ = self._rooted
        out = []
        for a, b in zip(verts, verts[1:]):
            out.append(parent_edge[b] if parent[b] == a else parent_edge[a])
        return out

    def other_end(self, eid: int, v: int) -> int:
        a, b = self.edges[eid]
        return b if a == v else a


def tree_path(tree: Tree, u: int, v: int) -> list[int]:
    """Ordered edge list of the unique path between ``u`` and ``v`` (empty if equal)."""
    return tree.path(u, v)


@dataclass(frozen=True)
class Customer:
    s: int
    t: int
    budget: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "budget", as_fraction(self.budget))
        if self.s == self.t:
            raise ValidationError(f"customer path is empty (s = t = {self.s})")
        if self.budget < 0:
            raise ValidationError(f"negative budget {self.budget}")


@dataclass(frozen=True)
class Instance:
    tree: Tree
    customers: tuple[Customer, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "customers", tuple(self.customers))
        for c in self.customers:
            for v in (c.s, c.t):
                if not (isinstance(v, int) and 0 <= v < self.tree.vertex_count):
                    raise ValidationError(f"customer endpoint {v!r} is not a vertex")

    @property
    def m(self) -> int:
        return self.tree.edge_count

    @property
    def n(self) -> int:
        return len(self.customers)

    @cached_property
    def paths(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(self.tree.path(c.s, c.t)) for c in self.customers)

    @cached_property
    def path_vertices(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(self.tree.path_vertices(c.s, c.t)) for c in self.customers)

    @property
    def b_max(self) -> Fraction:
        return max((c.budget for c in self.customers), default=Fraction(0))


@dataclass(frozen=True)
class PricingScheme:
    """Non-negative exact price per edge, indexed by edge id."""

    prices: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        prices = tuple(as_fraction(p) for p in self.prices)
        if any(p < 0 for p in prices):
            raise ValidationError("prices must be non-negative")
        object.__setattr__(self, "prices", prices)

    @classmethod
    def zeros(cls, m: int) -> PricingScheme:
        return cls((Fraction(0),) * m)

    @classmethod
    def from_mapping(cls, m: int, prices: Mapping[int, Rational]) -> PricingScheme:
        out = [Fraction(0)] * m
        for eid, p in prices.items():
            out[eid] = as_fraction(p)
        return cls(tuple(out))

    def __len__(self) -> int:
        return len(self.prices)

    def __getitem__(self, eid: int) -> Fraction:
        return self.prices[eid]

    def total(self, edges: Iterable[int]) -> Fraction:
        return sum((self.prices[e] for e in edges), Fraction(0))


@dataclass(frozen=True)
class RevenueBreakdown:
    r_s: Fraction
    r_t: Fraction
    r_m: Fraction

    @property
    def total(self) -> Fraction:
        return self.r_s + self.r_t + self.r_m


def _check_scheme(instance: Instance, scheme: PricingScheme) -> None:
    if len(scheme) != instance.m:
        raise ValidationError(f"scheme prices {len(scheme)} edges, tree has {instance.m}")


def evaluate_revenue(instance: Instance, scheme: PricingScheme) -> tuple[Fraction, list[Fraction]]:
    """Total and per-customer revenue; a customer buys when her path price is at most her budget."""
    _check_scheme(instance, scheme)
    per_customer = []
    for c, path in zip(instance.customers, instance.paths):
        price = scheme.total(path)
        per_customer.append(price if price <= c.budget else Fraction(0))
    return sum(per_customer, Fraction(0)), per_customer


def revenue_breakdown(
    instance: Instance, scheme: PricingScheme, vertices: Iterable[int], customer: int
) -> RevenueBreakdown:
    """Split customer ``customer``'s path price around the vertex set ``vertices``.

    ``r_s`` is the price between s and the first path vertex in the set, ``r_t``
    the price between the last such vertex and t, ``r_m`` the rest.
    """
    _check_scheme(instance, scheme)
    vset = vertices if isinstance(vertices, (set, frozenset)) else set(vertices)
    verts = instance.path_vertices[customer]
    edges = instance.paths[customer]
    hits = [j for j, v in enumerate(verts) if v in vset]
    if not hits:
        raise ValidationError(f"path of customer {customer} misses the vertex set")
    first, last = hits[0], hits[-1]
    return RevenueBreakdown(
        scheme.total(edges[:first]), scheme.total(edges[last:]), scheme.total(edges[first:last])
    )


def revenue_split(
    instance: Instance, scheme: PricingScheme, vertices: Iterable[int]
) -> tuple[Fraction, Fraction, Fraction]:
    """Sums of the breakdown parts over customers who actually buy under ``scheme``."""
    vset = frozenset(vertices)
    rs = rt = rm = Fraction(0)
    for i, c in enumerate(instance.customers):
        br = revenue_breakdown(instance, scheme, vset, i)
        if br.total <= c.budget:
            rs += br.r_s
            rt += br.r_t
            rm += br.r_m
    return rs, rt, rm


# -- JSON files --------------------------------------------------------------


def instance_to_dict(instance: Instance) -> dict:
    return {
        "vertices": instance.tree.vertex_count,
        "edges": [list(e) for e in instance.tree.edges],
        "customers": [
            {"s": c.s, "t": c.t, "budget": str(c.budget)} for c in instance.customers
        ],
    }


def instance_from_dict(data: Mapping) -> Instance:
    try:
        tree = Tree(int(data["vertices"]), tuple(tuple(e) for e in data["edges"]))
        customers = tuple(
            Customer(int(c["s"]), int(c["t"]), as_fraction(c["budget"]))
            for c in data.get("customers", [])
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed instance: {exc}") from exc
    return Instance(tree, customers)


def scheme_to_dict(scheme: PricingScheme) -> dict:
    return {"prices": [str(p) for p in scheme.prices]}


def scheme_from_dict(data: Mapping) -> PricingScheme:
    try:
        return PricingScheme(tuple(as_fraction(p) for p in data["prices"]))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed scheme: {exc}") from exc


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def load_instance(path: str | Path) -> Instance:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: {exc}") from exc
    return instance_from_dict(data)


def save_instance(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(dumps(instance_to_dict(instance)))


def load_scheme(path: str | Path, m: int | None = None) -> PricingScheme:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: {exc}") from exc
    scheme = scheme_from_dict(data)
    if m is not None and len(scheme) != m:
        raise ValidationError(f"scheme prices {len(scheme)} edges, tree has {m}")
    return scheme


def save_scheme(scheme: PricingScheme, path: str | Path) -> None:
    Path(path).write_text(dumps(scheme_to_dict(scheme)))


def restrict(
    instance: Instance, edges: Iterable[int], customers: Sequence[int]
) -> tuple[Instance, list[int], list[int]]:
    """Relabel the subtree on ``edges`` as a standalone instance.

    Returns ``(sub, edge_ids, vertex_ids)`` where ``edge_ids[j]`` / ``vertex_ids[j]``
    are the host ids of local edge / vertex ``j``.  Every listed customer's path
    must lie inside the subtree.
    """
    edge_ids = sorted(edges)
    tree = instance.tree
    vertex_ids = sorted({v for e in edge_ids for v in tree.edges[e]})
    vloc = {v: j for j, v in enumerate(vertex_ids)}
    sub_tree = Tree(
        len(vertex_ids), tuple((vloc[tree.edges[e][0]], vloc[tree.edges[e][1]]) for e in edge_ids)
    )
    custs = []
    for i in customers:
        c = instance.customers[i]
        if c.s not in vloc or c.t not in vloc:
            raise ValidationError(f"customer {i} leaves the subtree")
        custs.append(Customer(vloc[c.s], vloc[c.t], c.budget))
    return Instance(sub_tree, tuple(custs)), edge_ids, vertex_ids

