"""Immutable simple directed graphs, structural predicates, and file I/O.

An edge (u, v) reads "u follows v": u is an in-neighbour (follower) of v,
and v is an out-neighbour (followee) of u.  Content spreads against edge
direction, so walks in this package travel along out-edges.
"""

from __future__ import annotations

import heapq
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    DuplicateEdge,
    GraphFileError,
    NotADag,
    SelfLoop,
    VertexOutOfRange,
)


class GraphClass(Enum):
    """Nested structural families, most specific first."""

    TREE = "tree"
    FOREST = "forest"
    MONOTONE_DAG = "monotone-dag"
    DAG = "dag"
    GENERAL = "general"


class DiGraph:
    """Simple digraph (no self-loops, no parallel edges) with dual adjacency.

    Immutable after construction and safe to share between threads.
    Vertices are the dense integers 0..n-1.
    """

    __slots__ = ("n", "out_adj", "in_adj", "m")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 0:
            raise VertexOutOfRange(f"vertex count must be non-negative, got {n}")
        out_lists: list[list[int]] = [[] for _ in range(n)]
        in_lists: list[list[int]] = [[] for _ in range(n)]
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise VertexOutOfRange(f"edge ({u}, {v}) outside [0, {n})")
            if u == v:
                raise SelfLoop(f"self-loop at vertex {u}")
            if (u, v) in seen:
                raise DuplicateEdge(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            out_lists[u].append(v)
            in_lists[v].append(u)
        self.n = n
        self.m = len(seen)
        self.out_adj: tuple[tuple[int, ...], ...] = tuple(map(tuple, out_lists))
        self.in_adj: tuple[tuple[int, ...], ...] = tuple(map(tuple, in_lists))

    def out_degree(self, v: int) -> int:
        return len(self.out_adj[v])

    def in_degree(self, v: int) -> int:
        return len(self.in_adj[v])

    def edges(self) -> list[tuple[int, int]]:
        """All edges sorted by (source, target)."""
        return sorted((u, v) for u in range(self.n) for v in self.out_adj[u])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.out_adj[u]

    def replace_out_edges(self, v: int, targets: Iterable[int]) -> "DiGraph":
        """New graph equal to this one except vertex v follows exactly `targets`."""
        edges = [(u, w) for u in range(self.n) if u != v for w in self.out_adj[u]]
        edges.extend((v, t) for t in targets)
        return DiGraph(self.n, edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiGraph):
            return NotImplemented
        return self.n == other.n and self.edges() == other.edges()

    def __hash__(self) -> int:
        return hash((self.n, tuple(self.edges())))

    def __repr__(self) -> str:
        return f"DiGraph(n={self.n}, m={self.m})"


def build_graph(n: int, edges: Iterable[tuple[int, int]]) -> DiGraph:
    """Construct a validated simple digraph on vertices 0..n-1."""
    return DiGraph(n, edges)


def _kahn_sinks_first(g: DiGraph) -> list[int] | None:
    """Topological order listing followees before followers, or None on a cycle.

    Ties break toward the lowest vertex id, so the order is deterministic.
    """
    remaining = [g.out_degree(v) for v in range(g.n)]
    ready = [v for v in range(g.n) if remaining[v] == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for u in g.in_adj[v]:
            remaining[u] -= 1
            if remaining[u] == 0:
                heapq.heappush(ready, u)
    if len(order) != g.n:
        return None
    return order


def is_dag(g: DiGraph) -> bool:
    """True iff the graph has no directed cycle."""
    return _kahn_sinks_first(g) is not None


def topological_order(g: DiGraph) -> list[int]:
    """Sinks-first order: for every edge (u, v), u appears after v.

    Raises NotADag on cyclic input.
    """
    order = _kahn_sinks_first(g)
    if order is None:
        raise NotADag("graph contains a directed cycle")
    return order


def sinks(g: DiGraph) -> set[int]:
    """Vertices with no out-edges (roots, in a forest)."""
    return {v for v in range(g.n) if g.out_degree(v) == 0}


def is_tree(g: DiGraph) -> bool:
    """One sink, every other vertex out-degree 1, no cycles.

    Connectivity follows: n-1 edges, acyclic, unique sink.
    """
    if g.n == 0:
        return False
    zero = 0
    for v in range(g.n):
        d = g.out_degree(v)
        if d == 0:
            zero += 1
        elif d != 1:
            return False
    return zero == 1 and is_dag(g)


def is_forest(g: DiGraph) -> bool:
    """Disjoint union of trees: out-degrees at most 1 and no cycles."""
    return all(g.out_degree(v) <= 1 for v in range(g.n)) and is_dag(g)


def classify(g: DiGraph, influence=None) -> GraphClass:
    """Most specific class among Tree, Forest, MonotoneDag, Dag, General.

    Monotonicity (strict influence increase along every edge) is decided in
    exact arithmetic; `influence` may be a precomputed exact table for g.
    """
    if not is_dag(g):
        return GraphClass.GENERAL
    if is_tree(g):
        return GraphClass.TREE
    if is_forest(g):
        return GraphClass.FOREST
    if influence is None:
        from .influence import influence_dag

        influence = influence_dag(g)
    for u in range(g.n):
        for v in g.out_adj[u]:
            if not influence[u] < influence[v]:
                return GraphClass.DAG
    return GraphClass.MONOTONE_DAG


def write_graph(g: DiGraph, path: str | Path, comments: Sequence[str] = ()) -> None:
    """Write the line-based text format: `n m` then one `u v` line per edge.

    Edges are emitted sorted by (u, v) so equal graphs produce identical files.
    Comment lines are prefixed with `#`.
    """
    lines = [f"# {c}" for c in comments]
    lines.append(f"{g.n} {g.m}")
    lines.extend(f"{u} {v}" for u, v in g.edges())
    Path(path).write_text("\n".join(lines) + "\n")


def read_graph(path: str | Path) -> DiGraph:
    """Parse the text format written by write_graph; edge order is free."""
    header: tuple[int, int] | None = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFileError(f"line {lineno}: expected two integers, got {raw!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFileError(f"line {lineno}: expected two integers, got {raw!r}")
        if header is None:
            header = (a, b)
        else:
            edges.append((a, b))
    if header is None:
        raise GraphFileError("empty graph file")
    n, m = header
    if len(edges) != m:
        raise GraphFileError(f"header promises {m} edges, file has {len(edges)}")
    try:
        return DiGraph(n, edges)
    except (SelfLoop, DuplicateEdge, VertexOutOfRange) as exc:
        raise GraphFileError(str(exc)) from exc
