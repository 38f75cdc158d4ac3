import random
from fractions import Fraction as F

import pytest

from twopath import (
    DeviationClass,
    Mechanism,
    NotATree,
    SelectionDistribution,
    TooLargeForExact,
    all_dags_upto_iso,
    all_digraphs_upto_iso,
    all_trees_upto_iso,
    build_graph,
    exact_general_two_path_distribution,
    exact_two_path_distribution,
    expected_influence,
    first_meeting_weights,
    gen_random_dag,
    gen_random_forest,
    gen_random_tree,
    influence_dag,
    influence_exact_general,
    tree_selection_loss,
    verify_ic,
)
from twopath.oracle import _path_catalog
from conftest import make_path


def test_distribution_must_normalize():
    with pytest.raises(ValueError):
        SelectionDistribution((F(1, 2),), F(1, 4))


def test_path_catalog_probabilities_sum_to_one():
    rng = random.Random(2)
    from twopath import gen_random_digraph

    for i in range(40):
        g = gen_random_digraph(6, rng.randint(0, 16), seed=i)
        paths = _path_catalog(g)
        assert sum(p for _, _, p in paths) == 1
        for order, mask, _ in paths:
            assert sum(1 << v for v in order) == mask


def test_exact_law_path3(path3):
    law = exact_two_path_distribution(path3)
    assert list(law.probs) == [F(1, 9), F(3, 9), F(5, 9)]
    assert law.null_prob == 0


def test_exact_law_two_isolated():
    law = exact_two_path_distribution(build_graph(2, []))
    assert list(law.probs) == [F(1, 4), F(1, 4)] and law.null_prob == F(1, 2)


def test_exact_law_three_isolated():
    # hand-solved chain: each vertex 1/7, null 4/7
    law = exact_two_path_distribution(build_graph(3, []))
    assert list(law.probs) == [F(1, 7)] * 3 and law.null_prob == F(4, 7)


def test_exact_law_two_cycle(two_cycle):
    law = exact_two_path_distribution(two_cycle)
    assert list(law.probs) == [F(1, 2), F(1, 2)] and law.null_prob == 0


def test_exact_law_cap():
    with pytest.raises(TooLargeForExact):
        exact_two_path_distribution(build_graph(10, []))
    # trees bypass the cap via the closed form
    law = exact_two_path_distribution(make_path(40))
    assert law.null_prob == 0 and len(law.probs) == 40


def test_tree_law_closed_form_equals_chain_solver():
    for n in range(1, 7):
        for t in all_trees_upto_iso(n):
            fast = exact_two_path_distribution(t)
            slow = exact_two_path_distribution(t, force_chain=True)
            assert fast.probs == slow.probs
            assert fast.null_prob == slow.null_prob == 0


def test_tree_law_equals_meeting_weights():
    for i in range(60):
        t = gen_random_tree(random.Random(i).randint(1, 40), seed=i)
        law = exact_two_path_distribution(t)
        w, total = first_meeting_weights(t)
        assert law.probs == w and total == sum(w)


def test_forest_single_stage_intersection_identity():
    # the probability that one round's paths intersect equals the sink mass
    for i in range(40):
        rng = random.Random(i)
        n = rng.randint(2, 9)
        f = gen_random_forest(n, rng.randint(1, n), seed=i)
        paths = _path_catalog(f)
        by_mask: dict[int, F] = {}
        for _, mask, p in paths:
            by_mask[mask] = by_mask.get(mask, F(0)) + p
        one_round_meet = F(0)
        for o1, m1, w1 in paths:
            for m2, w2 in by_mask.items():
                if m1 & m2:
                    one_round_meet += w1 * w2
        _, total = first_meeting_weights(f)
        assert one_round_meet == total


def test_expected_influence_path_instances():
    for n, want in ((2, F(7, 4)), (3, F(22, 9))):
        g = make_path(n)
        e, ratio = expected_influence(
            exact_two_path_distribution(g), influence_dag(g)
        )
        assert e == want
        assert ratio == F(n) / want


def test_expected_influence_formula_path_n():
    for n in range(2, 20):
        g = make_path(n)
        e, _ = expected_influence(exact_two_path_distribution(g), influence_dag(g))
        assert e == F(n * (n + 1) * (4 * n - 1), 6 * n * n)


def test_expected_influence_all_null():
    dist = SelectionDistribution((F(0), F(0)), F(1))
    inf = influence_dag(build_graph(2, []))
    e, ratio = expected_influence(dist, inf)
    assert e == 0 and ratio is None


def test_tree_ratio_bound_small():
    for i in range(80):
        t = gen_random_tree(random.Random(i).randint(1, 9), seed=1000 + i)
        e, ratio = expected_influence(exact_two_path_distribution(t), influence_dag(t))
        assert ratio <= F(3, 2)


def test_tree_selection_loss_examples(path3):
    assert tree_selection_loss(path3) == 5
    star = build_graph(3, [(0, 2), (1, 2)])
    assert tree_selection_loss(star) == 4
    with pytest.raises(NotATree):
        tree_selection_loss(build_graph(2, []))


def test_path_maximizes_selection_loss_up_to_six():
    for n in range(2, 7):
        scores = {}
        for t in all_trees_upto_iso(n):
            scores[tuple(t.edges())] = tree_selection_loss(t)
        path_score = tree_selection_loss(make_path(n))
        assert path_score == max(scores.values())
        others = [s for s in scores.values() if s != path_score]
        assert all(s < path_score for s in others)


def test_general_law_empty_graph_matches_plain():
    g = build_graph(3, [])
    assert exact_general_two_path_distribution(g) == exact_two_path_distribution(g)


def test_general_law_single_edge():
    g = build_graph(2, [(0, 1)])
    law = exact_general_two_path_distribution(g)
    assert list(law.probs) == [F(1, 4), F(1, 2)] and law.null_prob == F(1, 4)


def test_general_law_two_cycle(two_cycle):
    law = exact_general_two_path_distribution(two_cycle)
    assert law.probs[0] == law.probs[1] == F(1, 2)


def test_general_law_cap():
    g = build_graph(8, [])
    with pytest.raises(TooLargeForExact):
        exact_general_two_path_distribution(g)


def test_verify_ic_two_cycle_counterexample(two_cycle):
    reports = verify_ic(two_cycle, Mechanism.TWO_PATH, DeviationClass.ANY)
    for r in reports:
        assert r.baseline == F(1, 2)
        assert r.best == F(3, 4)
        assert r.gain == F(1, 4)
        assert r.best_targets == ()  # dropping the out-edge is optimal


def test_verify_ic_two_path_acyclic_no_gain_n4():
    for g in all_dags_upto_iso(4):
        for r in verify_ic(g, Mechanism.TWO_PATH, DeviationClass.STAYS_ACYCLIC):
            assert r.gain == 0


def test_verify_ic_general_no_gain_n3():
    for g in all_digraphs_upto_iso(3):
        for r in verify_ic(g, Mechanism.GENERAL_TWO_PATH, DeviationClass.ANY):
            assert r.gain == 0


def test_verify_ic_analytic_no_gain_small():
    from twopath import gen_random_monotone_dag

    for s in range(8):
        g = gen_random_monotone_dag(6, 0.3, seed=s)
        for r in verify_ic(g, Mechanism.ANALYTIC, DeviationClass.ANY):
            assert r.gain == 0


def test_verify_ic_creates_cycle_class_reported():
    g = build_graph(2, [(0, 1)])
    reports = verify_ic(g, Mechanism.TWO_PATH, DeviationClass.CREATES_CYCLE)
    # vertex 1 can close the 2-cycle; its probability there drops
    r1 = reports[1]
    assert r1.best_targets == (0,)
    assert r1.best == F(1, 2) and r1.baseline == F(3, 4)
    assert r1.gain == F(-1, 4)
    # vertex 0 has no cycle-creating report, baseline is echoed
    r0 = reports[0]
    assert r0.gain == 0


def test_enumeration_counts():
    assert [len(all_dags_upto_iso(n)) for n in range(1, 5)] == [1, 2, 6, 31]
    assert [len(all_digraphs_upto_iso(n)) for n in range(1, 5)] == [1, 3, 16, 218]
    assert [len(all_trees_upto_iso(n)) for n in range(1, 9)] == [1, 1, 2, 4, 9, 20, 48, 115]


def test_exact_law_on_dags_matches_influence_identity():
    # on any graph the exact law is a bona fide distribution; on trees the
    # expected selection equals the full meeting-weight scalar product
    for i in range(30):
        rng = random.Random(i)
        n = rng.randint(2, 8)
        g = gen_random_dag(n, rng.randint(0, n * (n - 1) // 2), seed=2000 + i)
        law = exact_two_path_distribution(g)
        assert sum(law.probs) + law.null_prob == 1
        assert all(p >= 0 for p in law.probs) and law.null_prob >= 0


def test_exact_law_matches_example_values(example_six):
    law = exact_two_path_distribution(example_six)
    inf = influence_exact_general(example_six)
    e, ratio = expected_influence(law, inf)
    assert e > 0 and ratio is not None and ratio >= 1
