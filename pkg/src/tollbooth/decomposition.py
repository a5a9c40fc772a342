"""Edge-disjoint subtree decompositions and the skeleton they induce.

Every function here works on an edge subset of a host :class:`Tree` (default:
all edges), so recursive decompositions keep host edge and vertex ids.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

from .model import Tree, ValidationError


@dataclass(frozen=True)
class Decomposition:
    subtrees: tuple[frozenset[int], ...]
    border_vertices: frozenset[int]

    @property
    def k(self) -> int:
        return len(self.subtrees)

    @cached_property
    def owner(self) -> dict[int, int]:
        """Edge id -> index of the subtree holding it."""
        return {e: j for j, st in enumerate(self.subtrees) for e in st}

    @property
    def edges(self) -> frozenset[int]:
        return frozenset(self.owner)

    def sizes(self) -> list[int]:
        return [len(st) for st in self.subtrees]

    def relabel(self, edge_ids: list[int], vertex_ids: list[int]) -> Decomposition:
        """Translate host ids to the local ids of a restricted sub-instance."""
        eloc = {e: j for j, e in enumerate(edge_ids)}
        vloc = {v: j for j, v in enumerate(vertex_ids)}
        return Decomposition(
            tuple(frozenset(eloc[e] for e in st) for st in self.subtrees),
            frozenset(vloc[v] for v in self.border_vertices),
        )


@dataclass(frozen=True)
class SkeletonInfo:
    skeleton_edges: frozenset[int]
    vertices: frozenset[int]
    junctions: frozenset[int]
    core: frozenset[int]
    segments: tuple[tuple[int, ...], ...]
    segment_edges: tuple[tuple[int, ...], ...]


def _edge_list(tree: Tree, edges: Optional[Iterable[int]]) -> list[int]:
    return list(range(tree.edge_count)) if edges is None else sorted(edges)


def _local_adjacency(tree: Tree, edges: list[int]) -> dict[int, list[tuple[int, int]]]:
    adj: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for e in edges:
        u, v = tree.edges[e]
        adj[u].append((v, e))
        adj[v].append((u, e))
    return adj


def border_vertices(tree: Tree, subtrees: Iterable[Iterable[int]]) -> frozenset[int]:
    """Vertices incident to edges of at least two different subtrees."""
    seen: dict[int, int] = {}
    border = set()
    for j, st in enumerate(subtrees):
        for e in st:
            for v in tree.edges[e]:
                if seen.setdefault(v, j) != j:
                    border.add(v)
    return frozenset(border)


def is_connected_edge_set(tree: Tree, edges: Iterable[int]) -> bool:
    edges = list(edges)
    if not edges:
        return False
    adj = _local_adjacency(tree, edges)
    start = tree.edges[edges[0]][0]
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w, _ in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(adj)


def centroid_split(
    tree: Tree, edges: Optional[Iterable[int]] = None
) -> tuple[frozenset[int], frozenset[int], int]:
    """Split a subtree into two edge-disjoint connected parts sharing one vertex.

    Each part holds between ceil(E/3) and floor(2E/3) edges.  The split vertex
    is the smallest vertex id at which a greedy fill of branches (largest
    first) lands in that window.
    """
    elist = _edge_list(tree, edges)
    total = len(elist)
    if total < 2:
        raise ValidationError("a centroid split needs at least 2 edges")
    lo, hi = -(-total // 3), (2 * total) // 3
    adj = _local_adjacency(tree, elist)

    # root at the smallest vertex, count edges below every vertex
    root = min(adj)
    parent = {root: None}
    order = [root]
    for u in order:
        for w, _ in adj[u]:
            if w not in parent:
                parent[w] = u
                order.append(w)
    if len(order) != len(adj) or len(adj) != total + 1:
        raise ValidationError("edge set is not a connected subtree")
    below = dict.fromkeys(order, 0)
    for u in reversed(order):
        p = parent[u]
        if p is not None:
            below[p] += below[u] + 1

    for v in sorted(adj):
        branches = []
        for w, e in adj[v]:
            size = below[w] + 1 if parent.get(w) == v else total - below[v]
            branches.append((-size, w, e))
        branches.sort()
        filled, chosen = 0, []
        for neg, _, e in branches:
            if filled >= lo:
                break
            filled -= neg
            chosen.append(e)
        if lo <= filled <= hi:
            return _collect_split(tree, adj, v, set(chosen))
    raise AssertionError("no centroid split found")  # unreachable for trees


def _collect_split(tree, adj, v, first_edges):
    part_a, part_b = set(), set()
    seen = {v}
    for w, e in adj[v]:
        target = part_a if e in first_edges else part_b
        target.add(e)
        seen.add(w)
        stack = [w]
        while stack:
            u = stack.pop()
            for x, f in adj[u]:
                if x not in seen:
                    seen.add(x)
                    target.add(f)
                    stack.append(x)
    return frozenset(part_a), frozenset(part_b), v


def balanced_k_decomposition(
    tree: Tree,
    k: int,
    edges: Optional[Iterable[int]] = None,
    trace: Optional[list[tuple[int, ...]]] = None,
) -> Decomposition:
    """Almost balanced k-decomposition via k-1 centroid splits of the largest part.

    If ``trace`` is a list, the part sizes before the first split and after
    every split are appended to it.
    """
    elist = _edge_list(tree, edges)
    if k < 1:
        raise ValidationError("k must be positive")
    if len(elist) < k:
        raise ValidationError(f"cannot split {len(elist)} edges into {k} subtrees")
    parts: list[frozenset[int]] = [frozenset(elist)]
    if trace is not None:
        trace.append((len(elist),))
    for _ in range(k - 1):
        biggest = max(range(len(parts)), key=lambda j: (len(parts[j]), -j))
        a, b, _ = centroid_split(tree, parts[biggest])
        parts[biggest] = a
        parts.append(b)
        if trace is not None:
            trace.append(tuple(len(p) for p in parts))
    return Decomposition(tuple(parts), border_vertices(tree, parts))


def trivial_decomposition(tree: Tree, edges: Optional[Iterable[int]] = None) -> Decomposition:
    elist = _edge_list(tree, edges)
    if not elist:
        raise ValidationError("cannot decompose an empty edge set")
    parts = tuple(frozenset([e]) for e in elist)
    return Decomposition(parts, border_vertices(tree, parts))


def check_decomposition(tree: Tree, dec: Decomposition, edges: Optional[Iterable[int]] = None) -> None:
    """Raise ``ValidationError`` unless ``dec`` is a valid edge partition of the subtree."""
    elist = _edge_list(tree, edges)
    union: set[int] = set()
    for st in dec.subtrees:
        if union & st:
            raise ValidationError("subtrees overlap")
        union |= st
        if not is_connected_edge_set(tree, st):
            raise ValidationError("a subtree is not connected")
    if union != set(elist):
        raise ValidationError("subtrees do not cover the edge set")
    if dec.border_vertices != border_vertices(tree, dec.subtrees):
        raise ValidationError("border vertex set is wrong")


def in_size_window(size: int, total: int, k: int) -> bool:
    """``total/(3k) <= size <= 3*total/k`` in integer arithmetic."""
    return 3 * k * size >= total and k * size <= 3 * total


def extract_skeleton(tree: Tree, dec: Decomposition) -> SkeletonInfo:
    """Minimal subtree spanning the border vertices, its junctions and segments."""
    border = dec.border_vertices
    adj = _local_adjacency(tree, sorted(dec.edges))
    if len(border) <= 1:
        return SkeletonInfo(frozenset(), border, frozenset(), border, (), ())

    degree = {v: len(a) for v, a in adj.items()}
    alive = set(dec.edges)
    leaves = deque(v for v, d in degree.items() if d == 1 and v not in border)
    while leaves:
        v = leaves.popleft()
        for w, e in adj[v]:
            if e in alive:
                alive.discard(e)
                degree[v] -= 1
                degree[w] -= 1
                if degree[w] == 1 and w not in border:
                    leaves.append(w)

    sk_adj = {v: sorted((e, w) for w, e in adj[v] if e in alive) for v in adj}
    sk_vertices = frozenset(v for v, a in sk_adj.items() if a)
    junctions = frozenset(v for v in sk_vertices if v not in border and len(sk_adj[v]) >= 3)
    core = border | junctions

    used: set[int] = set()
    segments, seg_edges = [], []
    for c in sorted(core):
        for e, w in sk_adj[c]:
            if e in used:
                continue
            verts, eds = [c], [e]
            used.add(e)
            prev, cur = c, w
            while cur not in core:
                verts.append(cur)
                (e1, w1), (e2, w2) = sk_adj[cur]
                e_next, w_next = (e2, w2) if w1 == prev else (e1, w1)
                used.add(e_next)
                eds.append(e_next)
                prev, cur = cur, w_next
            verts.append(cur)
            segments.append(tuple(verts))
            seg_edges.append(tuple(eds))
    return SkeletonInfo(
        frozenset(alive), sk_vertices, junctions, core, tuple(segments), tuple(seg_edges)
    )


def decomposition_to_dot(tree: Tree, dec: Decomposition, name: str = "decomposition") -> str:
    """Graphviz source colouring each edge by its subtree index; border vertices are filled."""
    palette = [
        "red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "teal",
        "gold", "gray40",
    ]
    lines = [f"graph {name} {{"]
    vertices = sorted({v for e in dec.edges for v in tree.edges[e]})
    for v in vertices:
        style = ' [style=filled, fillcolor=black, fontcolor=white]' if v in dec.border_vertices else ""
        lines.append(f"  {v}{style};")
    for e in sorted(dec.edges):
        u, v = tree.edges[e]
        j = dec.owner[e]
        lines.append(f'  {u} -- {v} [color={palette[j % len(palette)]}, label="{j}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
