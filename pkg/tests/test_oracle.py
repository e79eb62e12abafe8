import math

import numpy as np
import pytest

from percolab import (CustomUpSet, EdgeCountAtLeast, FamilySpec, LargeComponentExists,
                      MergeScoreAtLeast, SizeGuardError, build_graph,
                      config_component_sizes, exact_cluster_stats,
                      exact_cluster_stats_grid, exact_event_prob, exact_pivotal_prob,
                      generate, graph_metrics, verify_monotone, weights_by_popcount)


def test_weights_sum_to_one():
    for m in (1, 5, 12):
        for p in (0.0, 0.2, 0.5, 0.9, 1.0):
            w = weights_by_popcount(m, p)
            total = sum(math.comb(m, k) * w[k] for k in range(m + 1))
            assert total == pytest.approx(1.0, abs=1e-12)


def test_component_sizes_per_config():
    p3 = generate(FamilySpec.path(3))
    assert sorted(config_component_sizes(p3, 0b00)) == [1, 1, 1]
    assert sorted(config_component_sizes(p3, 0b01)) == [1, 2]
    assert sorted(config_component_sizes(p3, 0b11)) == [3]


def test_k3_connected_probability():
    k3 = generate(FamilySpec.complete(3))
    st = exact_cluster_stats(k3, 0.5, [2, 3])
    assert st.p_connected == pytest.approx(0.5, abs=1e-12)
    assert st.e_l1 == pytest.approx(19 / 8, abs=1e-12)


def test_path3_expected_l1():
    p3 = generate(FamilySpec.path(3))
    st = exact_cluster_stats(p3, 0.5, [3])
    assert st.e_l1 == pytest.approx(2.0, abs=1e-12)
    assert st.p_l1_ge[3] == pytest.approx(0.25, abs=1e-12)


def test_p_zero_is_trivial(corpus):
    for _, g in corpus:
        st = exact_cluster_stats(g, 0.0, [2])
        assert st.e_l1 == pytest.approx(1.0, abs=1e-12)
        assert st.p_two_ge[2] == 0.0


def test_p_one_matches_full_graph(corpus):
    for _, g in corpus:
        st = exact_cluster_stats(g, 1.0, [2])
        met = graph_metrics(g)
        assert (st.p_connected == 1.0) == met.connected
        assert st.e_l1 == pytest.approx(max(config_component_sizes(g, (1 << g.m) - 1)))


def test_event_prob_examples():
    k3 = generate(FamilySpec.complete(3))
    assert exact_event_prob(k3, 0.37, EdgeCountAtLeast(0)) == pytest.approx(1.0)
    assert exact_event_prob(k3, 0.37, EdgeCountAtLeast(k3.m + 1)) == 0.0
    assert exact_event_prob(k3, 0.5, LargeComponentExists(2)) == pytest.approx(7 / 8, abs=1e-12)


def test_event_prob_monotone_in_p(corpus):
    grid = np.linspace(0.0, 1.0, 11)
    for _, g in corpus:
        if g.m > 12:
            continue
        for upset in (LargeComponentExists(2), MergeScoreAtLeast(0.3, 1)):
            vals = [exact_event_prob(g, p, upset) for p in grid]
            assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_exact_pivotal_single_edge():
    e1 = build_graph(2, [(0, 1)])
    for p in (0.0, 0.3, 1.0):
        assert exact_pivotal_prob(e1, p, EdgeCountAtLeast(1)) == pytest.approx(1.0)


def test_exact_pivotal_path3_spanning():
    p3 = generate(FamilySpec.path(3))
    for p in (0.25, 0.5, 0.75):
        got = exact_pivotal_prob(p3, p, LargeComponentExists(3))
        assert got == pytest.approx(p, abs=1e-12)


def test_verify_monotone():
    p3 = generate(FamilySpec.path(3))
    assert verify_monotone(p3, LargeComponentExists(3))
    assert verify_monotone(p3, MergeScoreAtLeast(0.4, 1))
    exactly_one = CustomUpSet(lambda g, m: m.bit_count() == 1,
                              declared_monotone=False, name="exactly1")
    assert not verify_monotone(p3, exactly_one)


def test_size_guards():
    big = generate(FamilySpec.complete(8))  # 28 edges
    with pytest.raises(SizeGuardError):
        exact_cluster_stats(big, 0.5, [2])
    mid = generate(FamilySpec.complete(7))  # 21 edges: stats ok, pivotal not
    with pytest.raises(SizeGuardError):
        exact_pivotal_prob(mid, 0.5, EdgeCountAtLeast(1))
    with pytest.raises(SizeGuardError):
        verify_monotone(mid, EdgeCountAtLeast(1))


def test_two_large_never_beats_one_large(corpus):
    for _, g in corpus:
        for p in (0.2, 0.5, 0.8):
            st = exact_cluster_stats(g, p, [2, 3])
            for s in (2, 3):
                assert st.p_two_ge[s] <= st.p_l1_ge[s] + 1e-12


def test_grid_matches_single_calls():
    c6 = generate(FamilySpec.cycle(6))
    ps = [0.1, 0.5, 0.9]
    grid_stats = exact_cluster_stats_grid(c6, ps, [2, 3])
    for p, st in zip(ps, grid_stats):
        single = exact_cluster_stats(c6, p, [2, 3])
        assert st.e_l1 == pytest.approx(single.e_l1, abs=1e-14)
        assert st.p_two_ge[3] == pytest.approx(single.p_two_ge[3], abs=1e-14)
