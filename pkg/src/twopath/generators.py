"""Random network generators: scale-free DAGs, a Twitter-like growth model,
and uniform test instances (trees, forests, monotone DAGs).

All generators are deterministic for a fixed seed.  Preferential attachment
weights use degree + 1 smoothing so the edgeless cold start is well defined;
sampling proportional to (degree + c) is implemented with repeated-entry
lists, appending a vertex once at creation per smoothing unit and once per
acquired edge endpoint.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import InvalidParams, MonotoneRejectionExhausted
from .graphs import DiGraph, GraphClass, classify


@dataclass(frozen=True)
class BaDagParams:
    """Preferential-attachment DAG: s initial edgeless vertices (the sinks),
    then each new vertex follows min(k, #existing) distinct earlier vertices
    chosen proportionally to in-degree + 1."""

    n_total: int
    s: int
    k: int
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.s < self.n_total:
            raise InvalidParams(f"need 1 <= s < n_total, got s={self.s}, n={self.n_total}")
        if self.k < 1:
            raise InvalidParams(f"need k >= 1, got {self.k}")


@dataclass(frozen=True)
class PqrParams:
    """Growth model events: with probability p a new vertex follows an
    existing one (target weight in-degree + c); with probability q a new
    vertex is followed by an existing one (source weight out-degree + c);
    with probability r an edge is added between existing vertices."""

    n_total: int
    p: float
    q: float
    r: float
    seed: int = 0
    smoothing: int = 1
    allow_q_ge_p: bool = False

    def __post_init__(self):
        if self.n_total < 1:
            raise InvalidParams("n_total must be >= 1")
        if min(self.p, self.q, self.r) < 0:
            raise InvalidParams("probabilities must be non-negative")
        if abs(self.p + self.q + self.r - 1.0) > 1e-9:
            raise InvalidParams(f"p+q+r must be 1, got {self.p + self.q + self.r}")
        if self.p + self.q <= 0:
            raise InvalidParams("p+q must be positive or the graph never grows")
        if self.q >= self.p and not self.allow_q_ge_p:
            raise InvalidParams(f"model assumes q < p (q={self.q}, p={self.p})")
        if self.smoothing < 1:
            raise InvalidParams("smoothing must be a positive integer")


def gen_ba_dag(params: BaDagParams) -> DiGraph:
    """Directed acyclic preferential-attachment network.

    Edges always point from the new vertex to existing ones, so the result
    is a DAG whose sinks are exactly the initial s vertices.  The k targets
    of one new vertex are distinct and drawn against the weights as of the
    start of its step.
    """
    rng = random.Random(params.seed)
    n, s, k = params.n_total, params.s, params.k
    # pool holds each vertex once per unit of (in-degree + 1)
    pool = list(range(s))
    edges: list[tuple[int, int]] = []
    for v in range(s, n):
        need = min(k, v)
        if need == v:
            chosen = list(range(v))
        else:
            chosen_set: set[int] = set()
            while len(chosen_set) < need:
                cand = pool[rng.randrange(len(pool))]
                chosen_set.add(cand)
            chosen = sorted(chosen_set)
        for t in chosen:
            edges.append((v, t))
        pool.extend(chosen)
        pool.append(v)
    return DiGraph(n, edges)


def gen_pqr(params: PqrParams, stats: dict | None = None) -> DiGraph:
    """Twitter-like growth network (may contain cycles).

    The first event always creates a vertex.  Edge events between existing
    vertices retry up to 32 times on self-loops or duplicates, then the
    event is skipped and counted in `stats` when a dict is passed.
    """
    rng = random.Random(params.seed)
    n, p, q, c = params.n_total, params.p, params.q, params.smoothing
    in_pool: list[int] = []
    out_pool: list[int] = []
    edge_set: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []
    skipped = 0
    count = 0

    def create() -> int:
        nonlocal count
        v = count
        count += 1
        in_pool.extend([v] * c)
        out_pool.extend([v] * c)
        return v

    def add_edge(u: int, v: int) -> None:
        edge_set.add((u, v))
        edges.append((u, v))
        out_pool.append(u)
        in_pool.append(v)

    create()
    while count < n:
        roll = rng.random()
        if roll < p:
            target = in_pool[rng.randrange(len(in_pool))]
            u = create()
            add_edge(u, target)
        elif roll < p + q:
            source = out_pool[rng.randrange(len(out_pool))]
            u = create()
            add_edge(source, u)
        else:
            for _ in range(32):
                u = out_pool[rng.randrange(len(out_pool))]
                v = in_pool[rng.randrange(len(in_pool))]
                if u != v and (u, v) not in edge_set:
                    add_edge(u, v)
                    break
            else:
                skipped += 1
    if stats is not None:
        stats["skipped_edge_events"] = skipped
        stats["edges"] = len(edges)
    return DiGraph(n, edges)


def gen_random_tree(n: int, seed: int) -> DiGraph:
    """Random recursive tree under a uniformly shuffled labelling."""
    if n < 1:
        raise InvalidParams("tree needs at least one vertex")
    rng = random.Random(seed)
    labels = list(range(n))
    rng.shuffle(labels)
    edges = [(labels[i], labels[rng.randrange(i)]) for i in range(1, n)]
    return DiGraph(n, edges)


def gen_random_forest(n: int, s: int, seed: int) -> DiGraph:
    """Forest of exactly s trees over a uniformly random vertex partition."""
    if not 1 <= s <= n:
        raise InvalidParams(f"need 1 <= s <= n, got s={s}, n={n}")
    rng = random.Random(seed)
    labels = list(range(n))
    rng.shuffle(labels)
    cuts = sorted(rng.sample(range(1, n), s - 1)) if s > 1 else []
    bounds = [0] + cuts + [n]
    edges = []
    for b in range(s):
        part = labels[bounds[b] : bounds[b + 1]]
        for i in range(1, len(part)):
            edges.append((part[i], part[rng.randrange(i)]))
    return DiGraph(n, edges)


def gen_random_dag(n: int, m: int, seed: int) -> DiGraph:
    """Uniform random DAG shape: m distinct edges descending a hidden order."""
    if n < 1 or m < 0 or m > n * (n - 1) // 2:
        raise InvalidParams(f"bad n={n}, m={m}")
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    pairs = [(order[j], order[i]) for i in range(n) for j in range(i + 1, n)]
    return DiGraph(n, rng.sample(pairs, m))


def gen_random_digraph(n: int, m: int, seed: int, require_cycle: bool = False) -> DiGraph:
    """Random simple digraph with m edges; optionally reject until cyclic."""
    if n < 1 or m < 0 or m > n * (n - 1):
        raise InvalidParams(f"bad n={n}, m={m}")
    rng = random.Random(seed)
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    from .graphs import is_dag

    for _ in range(10000):
        g = DiGraph(n, rng.sample(pairs, m))
        if not require_cycle or not is_dag(g):
            return g
    raise InvalidParams(f"no cyclic graph found with n={n}, m={m}")


def gen_random_monotone_dag(
    n: int,
    density: float,
    seed: int,
    max_attempts: int = 20000,
) -> DiGraph:
    """Rejection-sample random DAGs until one is strictly monotone and not a
    forest (so the instance genuinely exercises the DAG generalization).

    Monotonicity is checked in exact arithmetic.  Raises
    MonotoneRejectionExhausted when the attempt budget runs out.
    """
    if n < 2:
        raise InvalidParams("monotone DAG sampling needs n >= 2")
    if not 0.0 < density <= 1.0:
        raise InvalidParams("density must be in (0, 1]")
    rng = random.Random(seed)
    for attempt in range(max_attempts):
        order = list(range(n))
        rng.shuffle(order)
        edges = []
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < density:
                    edges.append((order[j], order[i]))
        g = DiGraph(n, edges)
        if classify(g) is GraphClass.MONOTONE_DAG:
            return g
    raise MonotoneRejectionExhausted(
        f"no monotone DAG in {max_attempts} attempts (n={n}, density={density})"
    )
