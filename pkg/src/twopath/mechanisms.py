"""Sampling implementations of the three selection mechanisms.

* Two Path: repeatedly draw two independent random paths from uniform start
  vertices; if they intersect, the first intersection (in first-path order)
  is selected when unmarked, otherwise the outcome is null; non-intersecting
  paths are marked and the loop repeats.
* Analytic Two Path: an explicit exact distribution for monotone DAGs built
  from first-meeting weights; null with probability one elsewhere.
* General Two Path: a uniformly random vertex ordering prunes every edge
  that descends in rank, which forces acyclicity, then Two Path runs on the
  residual graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import NotADag
from .graphs import DiGraph, GraphClass, classify, is_dag, sinks
from .influence import InfluenceTable, PairwiseInfluence, influence_dag


class Mechanism(Enum):
    TWO_PATH = "two-path"
    ANALYTIC = "analytic"
    GENERAL_TWO_PATH = "general-two-path"


class StopReason(Enum):
    SINK = "sink"
    REVISIT = "revisit"


@dataclass(frozen=True)
class RandomPath:
    start: int
    vertices: tuple[int, ...]
    stop_reason: StopReason


@dataclass(frozen=True)
class Outcome:
    """Either a selected vertex or null (vertex is None)."""

    vertex: Optional[int]

    @property
    def is_null(self) -> bool:
        return self.vertex is None


@dataclass(frozen=True)
class RoundRecord:
    x: int
    path1: tuple[int, ...]
    y: int
    path2: tuple[int, ...]
    meeting: Optional[int]
    marked_size: int


@dataclass(frozen=True)
class MechanismTranscript:
    """Full record of one mechanism run."""

    seed: Optional[int]
    rounds: tuple[RoundRecord, ...]
    outcome: Outcome
    cap_hit: bool
    marked_all: bool

    def to_text(self) -> str:
        """Line-oriented debug rendering, one round per line (not normative)."""
        lines = []
        for i, r in enumerate(self.rounds):
            meet = "-" if r.meeting is None else str(r.meeting)
            lines.append(
                f"round {i}: x={r.x} p1={','.join(map(str, r.path1))} "
                f"y={r.y} p2={','.join(map(str, r.path2))} "
                f"meet={meet} marked={r.marked_size}"
            )
        out = "null" if self.outcome.is_null else str(self.outcome.vertex)
        flags = []
        if self.cap_hit:
            flags.append("cap-hit")
        if self.marked_all:
            flags.append("all-marked")
        suffix = f" [{' '.join(flags)}]" if flags else ""
        lines.append(f"outcome: {out}{suffix}")
        return "\n".join(lines)


def default_max_rounds(n: int) -> int:
    """Safety cap on mechanism rounds; termination is almost sure long before."""
    return 10 * n * n


def _walk(out_adj, start: int, rng) -> tuple[list[int], StopReason]:
    """One random path: uniform out-edge steps, stop at a sink or on the
    first step that would revisit the current path (the repeat is dropped)."""
    path = [start]
    on_path = {start}
    v = start
    while True:
        nbrs = out_adj[v]
        d = len(nbrs)
        if d == 0:
            return path, StopReason.SINK
        v = nbrs[rng.randrange(d)]
        if v in on_path:
            return path, StopReason.REVISIT
        path.append(v)
        on_path.add(v)


def sample_random_path(g: DiGraph, start: int, rng) -> RandomPath:
    """Draw one random path starting at `start`."""
    if not 0 <= start < g.n:
        raise ValueError(f"start {start} outside [0, {g.n})")
    path, reason = _walk(g.out_adj, start, rng)
    return RandomPath(start=start, vertices=tuple(path), stop_reason=reason)


def run_two_path(
    g: DiGraph,
    rng,
    max_rounds: Optional[int] = None,
    seed: Optional[int] = None,
    record: bool = True,
) -> MechanismTranscript:
    """Run the Two Path mechanism once and return its transcript.

    Each round draws start x and path P1, then start y and path P2.  If the
    paths share a vertex, the first vertex of P1 lying in P2 is selected when
    unmarked and the run returns null otherwise.  Disjoint paths are marked
    wholesale and the loop repeats; if everything becomes marked, or the
    round cap is exhausted, the outcome is null (flagged in the transcript).

    With record=False round records are skipped; the random stream and the
    outcome are identical either way.
    """
    n = g.n
    if n < 1:
        raise ValueError("mechanism needs at least one vertex")
    if max_rounds is None:
        max_rounds = default_max_rounds(n)
    out_adj = g.out_adj
    randrange = rng.randrange
    marked: set[int] = set()
    rounds: list[RoundRecord] = []
    selected: Optional[int] = None
    cap_hit = False
    marked_all = False
    for _ in range(max_rounds):
        x = randrange(n)
        p1, _ = _walk(out_adj, x, rng)
        y = randrange(n)
        p2, _ = _walk(out_adj, y, rng)
        s2 = set(p2)
        meeting = None
        for v in p1:
            if v in s2:
                meeting = v
                break
        if meeting is None:
            marked.update(p1)
            marked.update(s2)
            if record:
                rounds.append(
                    RoundRecord(x, tuple(p1), y, tuple(p2), None, len(marked))
                )
            if len(marked) == n:
                marked_all = True
                break
        else:
            if meeting not in marked:
                selected = meeting
            if record:
                rounds.append(
                    RoundRecord(x, tuple(p1), y, tuple(p2), meeting, len(marked))
                )
            break
    else:
        cap_hit = True
    return MechanismTranscript(
        seed=seed,
        rounds=tuple(rounds),
        outcome=Outcome(selected),
        cap_hit=cap_hit,
        marked_all=marked_all,
    )


@dataclass(frozen=True)
class AnalyticDistribution:
    """Exact selection law of the analytic mechanism.

    Intermediates are kept for testing: `meeting_weight[v]` is the per-vertex
    first-meeting weight, `stage_meet_prob` the single-stage intersection
    probability (sum over sinks of squared normalized influence), and
    `stage_meet_without[v]` the same quantity recomputed on the graph with
    v's out-edges deleted.  They are None when the input is not a monotone
    DAG and the law is null with probability one.
    """

    probs: tuple[Fraction, ...]
    null_prob: Fraction
    meeting_weight: Optional[tuple[Fraction, ...]]
    stage_meet_prob: Optional[Fraction]
    stage_meet_without: Optional[tuple[Fraction, ...]]

    def support(self) -> list[int]:
        return [v for v, p in enumerate(self.probs) if p > 0]


def first_meeting_weights(
    g: DiGraph,
    inf: Optional[InfluenceTable] = None,
    pairwise: Optional[PairwiseInfluence] = None,
) -> tuple[tuple[Fraction, ...], Fraction]:
    """Per-vertex weight that two independent random paths first meet there.

    weight(v) = (I(v)/n)^2 - sum over followers u of I(v,u) * (I(u)/n)^2.
    On a forest this is exactly the probability that v is the first meeting
    vertex of one stage; on general DAGs it is the generalization the
    analytic mechanism is built from.  Also returns the single-stage
    intersection probability: the sum over sinks r of (I(r)/n)^2.

    The weights sum to at most the intersection probability, with equality
    on forests; on general DAGs the sum can fall strictly below it.
    """
    if not is_dag(g):
        raise NotADag("first-meeting weights are defined on DAGs")
    if inf is None:
        inf = influence_dag(g)
    if pairwise is None:
        pairwise = PairwiseInfluence(g)
    n = g.n
    weights = []
    for v in range(n):
        acc = Fraction(inf[v], n) ** 2
        if g.in_adj[v]:
            row = pairwise.row(v)
            for u in g.in_adj[v]:
                acc -= row[u] * Fraction(inf[u], n) ** 2
        weights.append(acc)
    total = sum((Fraction(inf[r], n) ** 2 for r in sinks(g)), Fraction(0))
    return tuple(weights), total


def analytic_two_path_distribution(g: DiGraph) -> AnalyticDistribution:
    """Exact law of the analytic mechanism on the reported graph.

    On a monotone DAG, vertex v gets weight(v) / (meet_without(v) + 2 I(v)/n),
    where meet_without(v) is the single-stage intersection probability of the
    graph with v's out-edges removed; the remaining mass is null.  Any report
    outside the monotone-DAG family yields null with probability one.
    """
    n = g.n
    zero = tuple(Fraction(0) for _ in range(n))
    if not is_dag(g):
        return AnalyticDistribution(zero, Fraction(1), None, None, None)
    inf = influence_dag(g)
    cls = classify(g, inf)
    if cls not in (GraphClass.TREE, GraphClass.FOREST, GraphClass.MONOTONE_DAG):
        return AnalyticDistribution(zero, Fraction(1), None, None, None)
    weights, total = first_meeting_weights(g, inf)
    probs = []
    without = []
    for v in range(n):
        if g.out_degree(v) == 0:
            total_v = total
        else:
            g_v = g.replace_out_edges(v, [])
            inf_v = influence_dag(g_v)
            total_v = sum(
                (Fraction(inf_v[r], n) ** 2 for r in sinks(g_v)), Fraction(0)
            )
        without.append(total_v)
        probs.append(weights[v] / (total_v + Fraction(2 * inf[v], n)))
    null = Fraction(1) - sum(probs)
    return AnalyticDistribution(
        probs=tuple(probs),
        null_prob=null,
        meeting_weight=weights,
        stage_meet_prob=total,
        stage_meet_without=tuple(without),
    )


def sample_analytic(
    g: DiGraph, rng, dist: Optional[AnalyticDistribution] = None
) -> Outcome:
    """One draw from the analytic distribution (computed here unless given)."""
    if dist is None:
        dist = analytic_two_path_distribution(g)
    r = rng.random()
    acc = 0.0
    for v, p in enumerate(dist.probs):
        acc += float(p)
        if r < acc:
            return Outcome(v)
    return Outcome(None)


@dataclass(frozen=True)
class GeneralRunResult:
    transcript: MechanismTranscript
    ordering: tuple[int, ...]


def run_general_two_path(
    g: DiGraph,
    rng,
    max_rounds: Optional[int] = None,
    seed: Optional[int] = None,
    record: bool = True,
) -> GeneralRunResult:
    """One run of the general-graph mechanism.

    Draws a uniform ordering of the vertices, keeps edge (u, v) only when u
    has lower rank than v, and runs Two Path on the residual graph, which is
    acyclic because every surviving edge ascends in rank.  The sampled
    ordering is returned with the transcript for reproducibility.
    """
    n = g.n
    perm = list(range(n))
    rng.shuffle(perm)
    rank = [0] * n
    for pos, v in enumerate(perm):
        rank[v] = pos
    kept = [
        (u, v) for u in range(n) for v in g.out_adj[u] if rank[u] < rank[v]
    ]
    residual = DiGraph(n, kept)
    assert is_dag(residual)
    transcript = run_two_path(
        residual, rng, max_rounds=max_rounds, seed=seed, record=record
    )
    return GeneralRunResult(transcript=transcript, ordering=tuple(perm))


def select_general_two_path(
    g: DiGraph, rng, max_rounds: Optional[int] = None
) -> tuple[Optional[int], bool]:
    """Lean general-graph run for large simulations: no transcript, no
    residual-graph materialization.  Returns (selected or None, cap_hit).

    Edge filtering happens on the fly at each walk step, checking that the
    step ascends in rank, so the walk provably stays on the residual DAG.
    Consumes the random stream exactly like run_general_two_path.
    """
    n = g.n
    if max_rounds is None:
        max_rounds = default_max_rounds(n)
    perm = list(range(n))
    rng.shuffle(perm)
    rank = [0] * n
    for pos, v in enumerate(perm):
        rank[v] = pos
    out_adj = g.out_adj
    randrange = rng.randrange

    def walk(start: int) -> list[int]:
        path = [start]
        on_path = {start}
        v = start
        rv = rank[v]
        while True:
            cand = [w for w in out_adj[v] if rank[w] > rv]
            if not cand:
                return path
            v = cand[randrange(len(cand))]
            rv = rank[v]
            if v in on_path:
                return path
            path.append(v)
            on_path.add(v)

    marked: set[int] = set()
    for _ in range(max_rounds):
        x = randrange(n)
        p1 = walk(x)
        y = randrange(n)
        p2 = walk(y)
        s2 = set(p2)
        meeting = None
        for v in p1:
            if v in s2:
                meeting = v
                break
        if meeting is None:
            marked.update(p1)
            marked.update(s2)
            if len(marked) == n:
                return None, False
        else:
            return (meeting if meeting not in marked else None), False
    return None, True


def _forest_arrays(g: DiGraph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(parent, depth, root) arrays for a forest; parent of a root is -1."""
    n = g.n
    parent = np.full(n, -1, dtype=np.int64)
    for v in range(n):
        nbrs = g.out_adj[v]
        if len(nbrs) > 1:
            raise ValueError("not a forest: out-degree above 1")
        if nbrs:
            parent[v] = nbrs[0]
    depth = np.zeros(n, dtype=np.int64)
    root = np.zeros(n, dtype=np.int64)
    order = [v for v in range(n) if parent[v] < 0]
    for r in order:
        root[r] = r
    stack = list(order)
    while stack:
        v = stack.pop()
        for c in g.in_adj[v]:
            depth[c] = depth[v] + 1
            root[c] = root[v]
            stack.append(c)
    return parent, depth, root


def _lca_vec(
    parent: np.ndarray, depth: np.ndarray, x: np.ndarray, y: np.ndarray
) -> np.ndarray:
    """Vectorized lowest common ancestor for same-tree vertex pairs."""
    a = x.copy()
    b = y.copy()
    da = depth[a]
    db = depth[b]
    while True:
        deeper_a = da > db
        if deeper_a.any():
            a[deeper_a] = parent[a[deeper_a]]
            da[deeper_a] -= 1
        deeper_b = db > da
        if deeper_b.any():
            b[deeper_b] = parent[b[deeper_b]]
            db[deeper_b] -= 1
        if not (deeper_a.any() or deeper_b.any()):
            break
    while True:
        diff = a != b
        if not diff.any():
            return a
        a[diff] = parent[a[diff]]
        b[diff] = parent[b[diff]]


def _mark_paths(
    marks: np.ndarray, parent: np.ndarray, rows: np.ndarray, start: np.ndarray
) -> None:
    """Mark the root-paths of `start` in each run's row, stopping early when a
    vertex is already marked (marked sets are closed under ancestors)."""
    cur = start.copy()
    r = rows.copy()
    while cur.size:
        fresh = ~marks[r, cur]
        r = r[fresh]
        cur = cur[fresh]
        if cur.size == 0:
            return
        marks[r, cur] = True
        cur = parent[cur]
        live = cur >= 0
        r = r[live]
        cur = cur[live]


@dataclass(frozen=True)
class ForestBatchResult:
    """Aggregated outcomes of many forest runs: per-vertex selection counts
    with the null count in the trailing slot, plus how many runs were cut off
    by the round cap (those count as null)."""

    counts: np.ndarray
    cap_hits: int

    def frequencies(self) -> np.ndarray:
        return self.counts / self.counts.sum()


def run_two_path_forest_batch(
    g: DiGraph,
    runs: int,
    seed: int,
    max_rounds: Optional[int] = None,
    batch: int = 4096,
) -> ForestBatchResult:
    """Outcome counts of `runs` Two Path runs on a forest, vectorized.

    On a forest every path is the deterministic climb to its tree's root, so
    a round reduces to: same tree means the paths meet at the lowest common
    ancestor (selected iff still unmarked), different trees mean both
    root-paths get marked.  Once every vertex is marked any later meeting
    lands on a marked vertex, so the explicit all-marked exit of the
    sequential runner does not change the law; the round cap still bounds
    the loop.

    Runs are processed in fixed-size batches, each with a stream seeded by
    (seed, batch index); counts merge by summation.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    parent, depth, root = _forest_arrays(g)
    n = g.n
    if max_rounds is None:
        max_rounds = default_max_rounds(n)
    counts = np.zeros(n + 1, dtype=np.int64)
    cap_hits = 0
    done = 0
    index = 0
    while done < runs:
        take = min(batch, runs - done)
        rng = np.random.default_rng([seed, index])
        marks = np.zeros((take, n), dtype=bool)
        active = np.arange(take)
        rounds = 0
        while active.size and rounds < max_rounds:
            a = active.size
            x = rng.integers(0, n, size=a)
            y = rng.integers(0, n, size=a)
            same = root[x] == root[y]
            if same.any():
                rows = active[same]
                z = _lca_vec(parent, depth, x[same], y[same])
                hit_marked = marks[rows, z]
                chosen = z[~hit_marked]
                if chosen.size:
                    counts[:n] += np.bincount(chosen, minlength=n)
                counts[n] += int(hit_marked.sum())
            miss = ~same
            rows = active[miss]
            if rows.size:
                _mark_paths(marks, parent, rows, x[miss])
                _mark_paths(marks, parent, rows, y[miss])
            active = rows
            rounds += 1
        counts[n] += active.size
        cap_hits += int(active.size)
        done += take
        index += 1
    return ForestBatchResult(counts=counts, cap_hits=cap_hits)
