"""Exact selection laws, brute-force incentive checks, and tree scoring.

The solver computes the exact outcome distribution of the Two Path loop by
enumerating every random-path realization with its rational probability and
treating the marked set as the state of an absorbing Markov chain over the
subset lattice.  Self-transitions (both paths disjoint and already marked)
are eliminated algebraically, so everything stays in exact arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .errors import NotATree, TooLargeForExact
from .graphs import DiGraph, is_dag, is_tree
from .influence import InfluenceTable, influence_dag
from .mechanisms import Mechanism, analytic_two_path_distribution

EXACT_TWO_PATH_CAP = 9
EXACT_GENERAL_CAP = 7


@dataclass(frozen=True)
class SelectionDistribution:
    """Exact probability of each vertex being selected, plus the null mass."""

    probs: tuple[Fraction, ...]
    null_prob: Fraction

    def __post_init__(self):
        total = sum(self.probs, self.null_prob)
        if total != 1:
            raise ValueError(f"distribution sums to {total}, not 1")

    @property
    def n(self) -> int:
        return len(self.probs)


def _path_catalog(g: DiGraph) -> list[tuple[tuple[int, ...], int, Fraction]]:
    """All random-path realizations as (vertex order, vertex bitmask, prob).

    Probabilities include the uniform choice of the start vertex and sum to
    one.  A realization ends at a sink, or on drawing an already-visited
    vertex; distinct revisit draws collapse into one entry via the aggregate
    stop probability |F(v) on path| / out_degree(v).
    """
    n = g.n
    out_adj = g.out_adj
    paths: list[tuple[tuple[int, ...], int, Fraction]] = []

    def sweep(v: int, order: list[int], mask: int, prob: Fraction) -> None:
        nbrs = out_adj[v]
        d = len(nbrs)
        if d == 0:
            paths.append((tuple(order), mask, prob))
            return
        stop = sum(1 for w in nbrs if mask >> w & 1)
        if stop:
            paths.append((tuple(order), mask, prob * Fraction(stop, d)))
        step = prob / d
        for w in nbrs:
            if not mask >> w & 1:
                order.append(w)
                sweep(w, order, mask | (1 << w), step)
                order.pop()

    start_weight = Fraction(1, n)
    for s in range(n):
        sweep(s, [s], 1 << s, start_weight)
    return paths


def _tree_law(g: DiGraph) -> SelectionDistribution:
    """Closed form on trees: both paths climb to the root, so the winner is
    the lowest common ancestor of the two starts and the run never nulls.
    Pr(v) = (I(v)/n)^2 - sum over followers u of (I(u)/n)^2."""
    inf = influence_dag(g)
    n = g.n
    probs = []
    for v in range(n):
        acc = Fraction(inf[v], n) ** 2
        for u in g.in_adj[v]:
            acc -= Fraction(inf[u], n) ** 2
        probs.append(acc)
    return SelectionDistribution(tuple(probs), Fraction(1) - sum(probs))


def exact_two_path_distribution(
    g: DiGraph, cap: int = EXACT_TWO_PATH_CAP, force_chain: bool = False
) -> SelectionDistribution:
    """Exact law of the Two Path mechanism with an unbounded round budget.

    Trees bypass the cap through the single-round closed form (force_chain
    runs the full solver anyway, for cross-validation).  Otherwise the
    marked-set chain is solved exactly: per state U, one round either selects
    an unmarked meeting vertex, nulls on a marked one, self-loops (disjoint
    paths already inside U), or jumps to a strict superset of U.
    """
    n = g.n
    if n < 1:
        raise ValueError("need at least one vertex")
    if is_tree(g) and not force_chain:
        return _tree_law(g)
    if n > cap:
        raise TooLargeForExact(f"n={g.n} exceeds exact solver cap {cap}")

    paths = _path_catalog(g)
    # Scale to integers over a common denominator: every realization's
    # probability has denominator dividing n * prod(out degrees)^2.
    common = n
    for v in range(n):
        d = g.out_degree(v)
        if d:
            common *= d * d
    weighted = []
    for order, mask, prob in paths:
        scaled = prob * common
        assert scaled.denominator == 1
        weighted.append((order, mask, scaled.numerator))

    mass_by_set: dict[int, int] = {}
    for _, mask, w in weighted:
        mass_by_set[mask] = mass_by_set.get(mask, 0) + w
    set_items = list(mass_by_set.items())

    meet_mass = [0] * n
    jump_mass: dict[int, int] = {}
    for order, m1, w1 in weighted:
        for m2, w2 in set_items:
            w = w1 * w2
            if m1 & m2:
                for v in order:
                    if m2 >> v & 1:
                        meet_mass[v] += w
                        break
            else:
                u = m1 | m2
                jump_mass[u] = jump_mass.get(u, 0) + w

    denom = common * common
    meet = [Fraction(w, denom) for w in meet_mass]
    jumps = [(m, Fraction(w, denom)) for m, w in jump_mass.items()]

    memo: dict[int, list[Fraction]] = {}

    def solve(state: int) -> list[Fraction]:
        cached = memo.get(state)
        if cached is not None:
            return cached
        out = [Fraction(0)] * (n + 1)
        for v in range(n):
            if state >> v & 1:
                out[n] += meet[v]
            else:
                out[v] += meet[v]
        stay = Fraction(0)
        targets: dict[int, Fraction] = {}
        for mask, w in jumps:
            nxt = state | mask
            if nxt == state:
                stay += w
            else:
                targets[nxt] = targets.get(nxt, Fraction(0)) + w
        for nxt, w in targets.items():
            sub = solve(nxt)
            for i in range(n + 1):
                out[i] += w * sub[i]
        if stay:
            scale = 1 / (Fraction(1) - stay)
            out = [p * scale for p in out]
        memo[state] = out
        return out

    law = solve(0)
    return SelectionDistribution(tuple(law[:n]), law[n])


@lru_cache(maxsize=262144)
def _cached_two_path_law(
    n: int, edges: tuple[tuple[int, int], ...]
) -> SelectionDistribution:
    return exact_two_path_distribution(DiGraph(n, edges))


@lru_cache(maxsize=65536)
def _cached_analytic_law(n: int, edges: tuple[tuple[int, int], ...]):
    return analytic_two_path_distribution(DiGraph(n, edges))


def exact_general_two_path_distribution(
    g: DiGraph, cap: int = EXACT_GENERAL_CAP
) -> SelectionDistribution:
    """Exact law of the general-graph mechanism: the average, over all n!
    equiprobable vertex orderings, of the Two Path law on the residual DAG
    that keeps only rank-ascending edges."""
    n = g.n
    if n > cap:
        raise TooLargeForExact(f"n={g.n} exceeds ordering exact cap {cap}")
    edges = g.edges()
    probs = [Fraction(0)] * n
    null = Fraction(0)
    count = 0
    for perm in itertools.permutations(range(n)):
        rank = [0] * n
        for pos, v in enumerate(perm):
            rank[v] = pos
        kept = tuple(sorted((u, v) for u, v in edges if rank[u] < rank[v]))
        law = _cached_two_path_law(n, kept)
        for v in range(n):
            probs[v] += law.probs[v]
        null += law.null_prob
        count += 1
    return SelectionDistribution(
        tuple(p / count for p in probs), null / count
    )


class DeviationClass(Enum):
    STAYS_ACYCLIC = "stays-acyclic"
    CREATES_CYCLE = "creates-cycle"
    ANY = "any"


@dataclass(frozen=True)
class DeviationReport:
    """Best misreport of one vertex's out-edges against its true probability."""

    vertex: int
    baseline: Fraction
    best_targets: tuple[int, ...]
    best: Fraction
    gain: Fraction
    deviation_class: DeviationClass


def _law_for(mechanism: Mechanism, g: DiGraph):
    key = (g.n, tuple(g.edges()))
    if mechanism is Mechanism.TWO_PATH:
        return _cached_two_path_law(*key)
    if mechanism is Mechanism.ANALYTIC:
        return _cached_analytic_law(*key)
    if mechanism is Mechanism.GENERAL_TWO_PATH:
        return exact_general_two_path_distribution(g)
    raise ValueError(mechanism)


def verify_ic(
    g: DiGraph,
    mechanism: Mechanism,
    deviation_class: DeviationClass = DeviationClass.ANY,
) -> list[DeviationReport]:
    """Brute-force incentive check: for every vertex, try every out-edge set.

    Each vertex's selection probability under every admissible misreport is
    compared against its truthful probability; incentive compatibility holds
    on this instance iff every reported gain is <= 0.  Deviations are
    filtered by class: staying acyclic, creating a cycle, or unrestricted.
    Only the deviating vertex's own probability is ever compared.
    """
    n = g.n
    base = _law_for(mechanism, g)
    reports = []
    for v in range(n):
        others = [u for u in range(n) if u != v]
        baseline = base.probs[v]
        best: Optional[Fraction] = None
        best_targets: tuple[int, ...] = ()
        for bits in range(1 << len(others)):
            targets = tuple(others[i] for i in range(len(others)) if bits >> i & 1)
            g2 = g.replace_out_edges(v, targets)
            if deviation_class is DeviationClass.STAYS_ACYCLIC and not is_dag(g2):
                continue
            if deviation_class is DeviationClass.CREATES_CYCLE and is_dag(g2):
                continue
            p = _law_for(mechanism, g2).probs[v]
            if best is None or p > best:
                best = p
                best_targets = targets
        if best is None:
            # class admits no deviation for this vertex (e.g. cycle-creating
            # reports on a vertex that cannot close a cycle)
            best = baseline
            best_targets = tuple(g.out_adj[v])
        reports.append(
            DeviationReport(
                vertex=v,
                baseline=baseline,
                best_targets=best_targets,
                best=best,
                gain=best - baseline,
                deviation_class=deviation_class,
            )
        )
    return reports


def tree_selection_loss(g: DiGraph) -> int:
    """Integer score sum(I(v)^2 * (I(parent) - I(v))) over non-root vertices.

    The Two Path expectation on a tree equals (n^3 - score) / n^2, so among
    trees of one order the score is maximal exactly where the mechanism does
    worst; the maximizer is the path.
    """
    if not is_tree(g):
        raise NotATree("selection loss is defined for trees")
    inf = influence_dag(g)
    vals = [int(x) for x in inf.totals]
    score = 0
    for v in range(g.n):
        if g.out_degree(v) == 0:
            continue
        parent = g.out_adj[v][0]
        score += vals[v] * vals[v] * (vals[parent] - vals[v])
    return score


def expected_influence(
    dist, inf: InfluenceTable
) -> tuple[Fraction, Optional[Fraction]]:
    """Expected influence of the selection (null counts zero) and the ratio
    of the maximal influence to it; the ratio is None when the expectation
    vanishes (an unbounded ratio)."""
    expectation = sum(
        (inf[v] * p for v, p in enumerate(dist.probs)), Fraction(0)
    )
    if expectation == 0:
        return expectation, None
    return expectation, inf.i_star() / expectation


# --- exhaustive instance enumeration (small n, up to isomorphism) ---


def _canonical_key(n: int, edges: list[tuple[int, int]]) -> tuple:
    best = None
    for perm in itertools.permutations(range(n)):
        mapped = tuple(sorted((perm[u], perm[v]) for u, v in edges))
        if best is None or mapped < best:
            best = mapped
    return best


def all_dags_upto_iso(n: int) -> list[DiGraph]:
    """Every DAG on n vertices, one representative per isomorphism class.

    Every DAG relabels onto descending edges (source id above target id),
    so subsets of those pairs cover all classes; canonical keys deduplicate.
    """
    pairs = [(u, v) for u in range(n) for v in range(u)]
    seen = set()
    out = []
    for bits in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if bits >> i & 1]
        key = _canonical_key(n, edges)
        if key not in seen:
            seen.add(key)
            out.append(DiGraph(n, edges))
    return out


def all_digraphs_upto_iso(n: int) -> list[DiGraph]:
    """Every simple digraph on n vertices up to isomorphism."""
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    seen = set()
    out = []
    for bits in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if bits >> i & 1]
        key = _canonical_key(n, edges)
        if key not in seen:
            seen.add(key)
            out.append(DiGraph(n, edges))
    return out


def _ahu(children: list[list[int]], v: int) -> str:
    return "(" + "".join(sorted(_ahu(children, c) for c in children[v])) + ")"


def all_trees_upto_iso(n: int) -> list[DiGraph]:
    """Every rooted tree of order n up to isomorphism, edges child -> parent.

    Generated from parent arrays (each vertex attaches to an earlier one,
    which reaches every shape) and deduplicated by canonical subtree strings.
    """
    if n < 1:
        return []
    if n == 1:
        return [DiGraph(1, [])]
    seen = set()
    out = []
    for parents in itertools.product(*[range(i) for i in range(1, n)]):
        edges = [(i + 1, p) for i, p in enumerate(parents)]
        children: list[list[int]] = [[] for _ in range(n)]
        for c, p in edges:
            children[p].append(c)
        key = _ahu(children, 0)
        if key not in seen:
            seen.add(key)
            out.append(DiGraph(n, edges))
    return out
