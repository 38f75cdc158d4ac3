"""Random-walk diffusion influence, exact and Monte Carlo.

The influence of x on y is the probability that a random walk started at y
(uniform out-edge steps, stopping at an out-degree-0 vertex or on revisiting
the current path) passes through x.  Equivalently it is the sum, over simple
paths from y to x, of the product of 1/out_degree along the path.  The total
influence I(x) sums this over all start vertices; I(x, x) = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import NoSinks, NotADag, TooLargeForExact
from .graphs import DiGraph, sinks, topological_order

EXACT_GENERAL_CAP = 14


@dataclass(frozen=True)
class InfluenceTable:
    """Per-vertex total influence, exact (Fraction) or approximate (float)."""

    totals: tuple
    exact: bool

    @property
    def n(self) -> int:
        return len(self.totals)

    def __getitem__(self, v: int):
        return self.totals[v]

    def i_star(self):
        """Maximal influence in the graph."""
        return max(self.totals)

    def top_vertex(self) -> int:
        """A vertex attaining the maximal influence (lowest id on ties)."""
        best = self.i_star()
        return min(v for v, t in enumerate(self.totals) if t == best)

    def as_floats(self) -> tuple[float, ...]:
        return tuple(float(t) for t in self.totals)


class MonteCarloInfluence(NamedTuple):
    table: InfluenceTable
    stderr: tuple[float, ...]


def influence_dag(g: DiGraph) -> InfluenceTable:
    """Exact total influence on a DAG via the follower recursion.

    I(x) = 1 + sum over followers y of I(y)/out_degree(y), evaluated with
    followers before followees (reverse of the sinks-first order).
    """
    order = topological_order(g)
    totals: list[Fraction | None] = [None] * g.n
    for x in reversed(order):
        acc = Fraction(1)
        for y in g.in_adj[x]:
            acc += totals[y] / g.out_degree(y)
        totals[x] = acc
    return InfluenceTable(tuple(totals), exact=True)


def influence_dag_float(g: DiGraph) -> InfluenceTable:
    """Same recursion in float64, for large experiment graphs."""
    order = topological_order(g)
    totals = [0.0] * g.n
    out_deg = [g.out_degree(v) for v in range(g.n)]
    for x in reversed(order):
        acc = 1.0
        for y in g.in_adj[x]:
            acc += totals[y] / out_deg[y]
        totals[x] = acc
    return InfluenceTable(tuple(totals), exact=False)


class PairwiseInfluence:
    """Lazy exact pairwise influence I(x, y) on a DAG.

    Rows are computed by one dynamic-programming pass per x:
    I(x, y) = (1/out_degree(y)) * sum over followees v of y of I(x, v),
    with I(x, x) = 1 and I(x, y) = 0 when y has no path to x.
    """

    def __init__(self, g: DiGraph):
        self.g = g
        self._order = topological_order(g)
        self._rows: dict[int, tuple[Fraction, ...]] = {}

    def row(self, x: int) -> tuple[Fraction, ...]:
        """I(x, y) for every y."""
        cached = self._rows.get(x)
        if cached is not None:
            return cached
        g = self.g
        vals = [Fraction(0)] * g.n
        for y in self._order:
            if y == x:
                vals[y] = Fraction(1)
                continue
            d = g.out_degree(y)
            if d == 0:
                continue
            acc = Fraction(0)
            for v in g.out_adj[y]:
                acc += vals[v]
            if acc:
                vals[y] = acc / d
        row = tuple(vals)
        self._rows[x] = row
        return row

    def pair(self, x: int, y: int) -> Fraction:
        return self.row(x)[y]


def influence_pair_dag(g: DiGraph, x: int, y: int) -> Fraction:
    """Exact influence of x on y on a DAG."""
    return PairwiseInfluence(g).pair(x, y)


def influence_pair_general(
    g: DiGraph, x: int, y: int, cap: int = EXACT_GENERAL_CAP
) -> Fraction:
    """Exact influence of x on y on any digraph, by enumerating the simple
    paths from y that reach x.  Exponential; capped."""
    if g.n > cap:
        raise TooLargeForExact(f"n={g.n} exceeds exact enumeration cap {cap}")
    if x == y:
        return Fraction(1)
    out_adj = g.out_adj
    total = Fraction(0)

    def sweep(v: int, on_path: list[bool], prob: Fraction) -> None:
        nonlocal total
        if v == x:
            total += prob
            return
        deg = len(out_adj[v])
        if deg == 0:
            return
        step = prob / deg
        on_path[v] = True
        for w in out_adj[v]:
            if not on_path[w]:
                sweep(w, on_path, step)
        on_path[v] = False

    sweep(y, [False] * g.n, Fraction(1))
    return total


def influence_exact_general(g: DiGraph, cap: int = EXACT_GENERAL_CAP) -> InfluenceTable:
    """Exact total influence on any digraph by simple-path enumeration.

    Every prefix of the walk tree from each start is a simple path, so a
    depth-first sweep accumulating the running probability at each reached
    vertex yields I(x) for all x in one pass per start.  Exponential; capped.
    """
    if g.n > cap:
        raise TooLargeForExact(f"n={g.n} exceeds exact enumeration cap {cap}")
    totals = [Fraction(0)] * g.n
    out_adj = g.out_adj

    def sweep(v: int, on_path: list[bool], prob: Fraction) -> None:
        totals[v] += prob
        deg = len(out_adj[v])
        if deg == 0:
            return
        step = prob / deg
        on_path[v] = True
        for w in out_adj[v]:
            if not on_path[w]:
                sweep(w, on_path, step)
        on_path[v] = False

    for start in range(g.n):
        sweep(start, [False] * g.n, Fraction(1))
    return InfluenceTable(tuple(totals), exact=True)


def _csr(g: DiGraph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Out-adjacency in compressed form: (indptr, indices, out_degrees)."""
    deg = np.fromiter((g.out_degree(v) for v in range(g.n)), dtype=np.int64, count=g.n)
    indptr = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    indices = np.fromiter(
        (w for v in range(g.n) for w in g.out_adj[v]), dtype=np.int64, count=g.m
    )
    return indptr, indices, deg


MC_CHUNK = 1 << 16


def _walk_chunk(
    indptr: np.ndarray,
    indices: np.ndarray,
    deg: np.ndarray,
    n: int,
    trials: int,
    rng: np.random.Generator,
    visits: np.ndarray,
) -> None:
    """Simulate `trials` random paths, adding per-vertex visit indicators.

    Vertices on a path are distinct, so summing one count per (walk, step)
    equals the visit indicator sum.  Walkers are compacted as they stop.
    """
    cur = rng.integers(0, n, size=trials)
    visits += np.bincount(cur, minlength=n)
    alive = deg[cur] > 0
    cur = cur[alive]
    history = [cur]
    while cur.size:
        d = deg[cur]
        nxt = indices[indptr[cur] + rng.integers(0, d)]
        fresh = np.ones(cur.size, dtype=bool)
        for col in history:
            fresh &= col != nxt
        nxt = nxt[fresh]
        if nxt.size == 0:
            break
        visits += np.bincount(nxt, minlength=n)
        history = [col[fresh] for col in history]
        go = deg[nxt] > 0
        cur = nxt[go]
        history = [col[go] for col in history]
        history.append(cur)


def influence_montecarlo(
    g: DiGraph, trials: int, seed: int, chunk: int = MC_CHUNK
) -> MonteCarloInfluence:
    """Estimate I(x) = n * Pr(random path visits x) from `trials` paths.

    Trials are simulated in fixed-size chunks; chunk i draws from a stream
    seeded by (seed, i), and chunk results merge by summation, so the output
    depends only on (trials, seed), not on batching or scheduling.
    Standard errors use the binomial normal approximation per vertex.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    indptr, indices, deg = _csr(g)
    visits = np.zeros(g.n, dtype=np.int64)
    done = 0
    index = 0
    while done < trials:
        take = min(chunk, trials - done)
        rng = np.random.default_rng([seed, index])
        _walk_chunk(indptr, indices, deg, g.n, take, rng, visits)
        done += take
        index += 1
    p_hat = visits / trials
    totals = tuple(float(x) for x in (g.n * p_hat))
    stderr = tuple(float(x) for x in (g.n * np.sqrt(p_hat * (1.0 - p_hat) / trials)))
    return MonteCarloInfluence(InfluenceTable(totals, exact=False), stderr)


@dataclass(frozen=True)
class BalanceReport:
    """Sink-average influence against the maximum: alpha = (n/s) / I*."""

    n: int
    sink_count: int
    i_star: object
    alpha: object

    def is_balanced(self, alpha) -> bool:
        return self.alpha >= alpha


def balance_report(g: DiGraph, inf: InfluenceTable) -> BalanceReport:
    """Balance of influence across sinks; raises NoSinks when s = 0."""
    s = len(sinks(g))
    if s == 0:
        raise NoSinks("graph has no sinks")
    i_star = inf.i_star()
    if inf.exact:
        alpha = Fraction(g.n, s) / i_star
    else:
        alpha = (g.n / s) / i_star
    return BalanceReport(n=g.n, sink_count=s, i_star=i_star, alpha=alpha)


def progeny_counts(g: DiGraph) -> list[int]:
    """Number of vertices with a directed path into each vertex (excluding it).

    Independent reachability computation used as a cross-check on forests,
    where exact influence equals progeny + 1.
    """
    counts = []
    for x in range(g.n):
        seen = {x}
        stack = [x]
        while stack:
            v = stack.pop()
            for u in g.in_adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        counts.append(len(seen) - 1)
    return counts
