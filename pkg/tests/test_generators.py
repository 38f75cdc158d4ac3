import random

import pytest

from twopath import (
    BaDagParams,
    GraphClass,
    InvalidParams,
    MonotoneRejectionExhausted,
    PqrParams,
    classify,
    gen_ba_dag,
    gen_pqr,
    gen_random_dag,
    gen_random_digraph,
    gen_random_forest,
    gen_random_monotone_dag,
    gen_random_tree,
    is_dag,
    is_forest,
    is_tree,
    sinks,
)


def test_ba_params_validation():
    with pytest.raises(InvalidParams):
        BaDagParams(5, 5, 1)
    with pytest.raises(InvalidParams):
        BaDagParams(5, 0, 1)
    with pytest.raises(InvalidParams):
        BaDagParams(5, 1, 0)


def test_ba_single_sink_unit_degree_is_tree():
    g = gen_ba_dag(BaDagParams(80, 1, 1, seed=3))
    assert is_tree(g) and sinks(g) == {0}


def test_ba_min_clamp_out_degrees():
    g = gen_ba_dag(BaDagParams(5, 2, 3, seed=1))
    assert [g.out_degree(v) for v in range(5)] == [0, 0, 2, 3, 3]


def test_ba_structure_and_sinks():
    g = gen_ba_dag(BaDagParams(2000, 50, 10, seed=9))
    assert is_dag(g)
    assert sinks(g) == set(range(50))
    assert all(g.out_degree(v) == min(10, v) for v in range(50, 2000))


def test_ba_deterministic():
    a = gen_ba_dag(BaDagParams(300, 5, 4, seed=11))
    b = gen_ba_dag(BaDagParams(300, 5, 4, seed=11))
    c = gen_ba_dag(BaDagParams(300, 5, 4, seed=12))
    assert a == b
    assert a != c


@pytest.mark.slow
def test_ba_in_degrees_heavier_than_uniform_attachment():
    # rich-get-richer: the top percentile's in-degree share must beat a
    # uniform-attachment twin generated side by side
    def top_share(g, top):
        degs = sorted((g.in_degree(v) for v in range(g.n)), reverse=True)
        return sum(degs[:top]) / max(1, sum(degs))

    n, k = 10_000, 10
    pref = gen_ba_dag(BaDagParams(n, 100, k, seed=21))
    rng = random.Random(21)
    edges = []
    for v in range(100, n):
        for t in rng.sample(range(v), min(k, v)):
            edges.append((v, t))
    from twopath import build_graph

    uniform = build_graph(n, edges)
    assert top_share(pref, n // 100) > top_share(uniform, n // 100)


def test_pqr_params_validation():
    with pytest.raises(InvalidParams):
        PqrParams(10, 0.5, 0.4, 0.2)  # does not sum to 1
    with pytest.raises(InvalidParams):
        PqrParams(10, 0.1, 0.3, 0.6)  # q >= p
    PqrParams(10, 0.1, 0.3, 0.6, allow_q_ge_p=True)
    with pytest.raises(InvalidParams):
        PqrParams(10, 0.0, 0.0, 1.0)  # never grows
    with pytest.raises(InvalidParams):
        PqrParams(10, 0.5, 0.2, 0.3, smoothing=0)


def test_pqr_no_edge_events_gives_tree_like_counts():
    g = gen_pqr(PqrParams(500, 0.7, 0.3, 0.0, seed=2))
    assert g.m == 499
    assert all(g.out_degree(v) + g.in_degree(v) >= 1 for v in range(500))


def test_pqr_pure_growth_is_acyclic():
    g = gen_pqr(PqrParams(400, 1.0, 0.0, 0.0, seed=8))
    assert is_dag(g)


def test_pqr_simple_and_exact_count():
    stats = {}
    g = gen_pqr(PqrParams(3000, 0.08, 0.02, 0.9, seed=5), stats=stats)
    assert g.n == 3000
    assert stats["edges"] == g.m
    seen = set()
    for u in range(g.n):
        for v in g.out_adj[u]:
            assert u != v and (u, v) not in seen
            seen.add((u, v))


def test_pqr_deterministic():
    a = gen_pqr(PqrParams(800, 0.1, 0.05, 0.85, seed=4))
    b = gen_pqr(PqrParams(800, 0.1, 0.05, 0.85, seed=4))
    assert a == b


@pytest.mark.slow
def test_pqr_average_in_degree_matches_model():
    # expected average in-degree is 1/(p+q); averaged over 50 seeds at
    # n=10,000 the sample mean lands within ten percent
    total = 0.0
    seeds = 50
    for s in range(seeds):
        g = gen_pqr(PqrParams(10_000, 0.08, 0.02, 0.9, seed=s))
        total += g.m / g.n
    mean = total / seeds
    assert abs(mean - 10.0) <= 1.0


def test_random_tree_and_forest_shapes():
    assert gen_random_tree(1, seed=0).n == 1
    for i in range(40):
        rng = random.Random(i)
        n = rng.randint(1, 40)
        s = rng.randint(1, n)
        f = gen_random_forest(n, s, seed=i)
        assert is_forest(f)
        assert len(sinks(f)) == s
        assert all(f.out_degree(v) <= 1 for v in range(n))
    with pytest.raises(InvalidParams):
        gen_random_forest(3, 4, seed=0)
    with pytest.raises(InvalidParams):
        gen_random_tree(0, seed=0)


def test_random_tree_deterministic():
    assert gen_random_tree(25, seed=7) == gen_random_tree(25, seed=7)


def test_random_dag_and_digraph():
    g = gen_random_dag(8, 12, seed=1)
    assert is_dag(g) and g.m == 12
    h = gen_random_digraph(8, 12, seed=1, require_cycle=True)
    assert not is_dag(h) and h.m == 12
    with pytest.raises(InvalidParams):
        gen_random_dag(3, 10, seed=0)


def test_monotone_generator_classifies_monotone():
    for s in range(25):
        g = gen_random_monotone_dag(4 + s % 9, 0.25, seed=s)
        assert classify(g) is GraphClass.MONOTONE_DAG


def test_monotone_generator_exhausts():
    # order two admits only empty and single-edge graphs, both forests,
    # so the non-forest monotone filter can never accept
    with pytest.raises(MonotoneRejectionExhausted):
        gen_random_monotone_dag(2, 0.5, seed=0, max_attempts=64)
    with pytest.raises(InvalidParams):
        gen_random_monotone_dag(1, 0.5, seed=0)
    with pytest.raises(InvalidParams):
        gen_random_monotone_dag(5, 0.0, seed=0)
