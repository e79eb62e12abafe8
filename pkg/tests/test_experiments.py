import json
import math

import numpy as np
import pytest

from percolab import (FamilySpec, PreconditionError, counterexample_demo,
                      crossing_bracket, exact_cluster_stats, generate,
                      percolated_expander_cheeger, sprinkling_giant_demo,
                      threshold_scan, uniqueness_scan, write_report_csv,
                      write_report_json)


def test_crossing_bracket_on_synthetic_curve():
    grid = np.linspace(0, 1, 101)
    mean = np.clip((grid - 0.4) * 2.0, 0.0, 1.0)
    se = np.full_like(grid, 0.002)
    br = crossing_bracket(grid, mean, se, a=0.1)
    assert br["lo"] <= br["p_hat"] <= br["hi"]
    assert br["p_hat"] == pytest.approx(0.45, abs=1e-9)
    assert br["resolution"] == pytest.approx(0.01)
    flat = np.zeros_like(grid)
    assert crossing_bracket(grid, flat, se, a=0.1) is None


def test_uniqueness_scan_exact_mode_matches_oracle():
    spec = FamilySpec.complete(6)
    rep = uniqueness_scan([spec], c=1 / 3, trials=0, seed=1, grid_points=11, exact=True)
    g = generate(spec)
    for pt in rep.points:
        st = exact_cluster_stats(g, pt["p"], [pt["threshold"]])
        assert pt["delta"] == pytest.approx(st.p_two_ge[pt["threshold"]], abs=1e-12)
        assert pt["delta_se"] == 0.0
    assert rep.summary["per_family"][0]["mode"] == "exact"


def test_uniqueness_scan_sweep_agrees_with_exact():
    spec = FamilySpec.complete(6)
    exact = uniqueness_scan([spec], c=1 / 3, trials=0, seed=1, grid_points=11, exact=True)
    sweep = uniqueness_scan([spec], c=1 / 3, trials=600, seed=2, grid_points=11)
    for pe, ps in zip(exact.points, sweep.points):
        tol = 4 * max(ps["delta_se"], 1e-3)
        assert abs(pe["delta"] - ps["delta"]) <= tol


def test_uniqueness_scan_omega_mode():
    rep = uniqueness_scan([FamilySpec.random_regular(60, 3, seed=4)], c=None,
                          omega=0.5, trials=40, seed=3, grid_points=21)
    thr = rep.summary["per_family"][0]["threshold"]
    assert thr == math.ceil(60 ** 0.5 - 1e-9)


def test_uniqueness_scan_omega_097_degenerate_at_desk_scale():
    # at omega = 0.97 the size threshold exceeds n/2 until n ~ 2^33, so two
    # such components cannot coexist: the failure probability is identically
    # zero at both sizes (trivially non-increasing)
    specs = [FamilySpec.random_regular(10 ** 3, 3, seed=11),
             FamilySpec.random_regular(10 ** 4, 3, seed=12)]
    rep = uniqueness_scan(specs, c=None, omega=0.97, trials=30, seed=42)
    small, big = rep.summary["per_family"]
    assert 2 * small["threshold"] > 10 ** 3 and 2 * big["threshold"] > 10 ** 4
    assert small["sup_delta"] == 0.0 and big["sup_delta"] == 0.0
    assert big["sup_delta"] <= small["sup_delta"]


def test_complete_graph_giant_emerges_near_one_over_n():
    # on the complete graph the giant emerges at p ~ 1/n: the smoothed
    # fraction crosses the giant-scale level 0.2 between 0.5/n and 2/n
    from percolab import binomial_smooth, generate, newman_ziff_sweep

    n = 200
    g = generate(FamilySpec.complete(n))
    rec = newman_ziff_sweep(g, trials=60, thresholds=(), seed=9)
    below = binomial_smooth(rec, 0.5 / n).l1 / n
    above = binomial_smooth(rec, 2.0 / n).l1 / n
    assert below < 0.2 < above


def test_counterexample_cycle16_exact_agreement():
    rep = counterexample_demo("cycle", 16, trials=20000, seed=4, exact=True)
    s = rep.summary
    tol = 4 * math.hypot(s["se"], s["oracle_se"]) + 1e-9
    assert abs(s["estimate"] - s["oracle_estimate"]) <= tol
    assert abs(s["estimate"] - s["exact_value"]) <= 4 * s["se"] + 1e-9
    assert s["threshold"] == 4 and s["p"] == pytest.approx(1 - 3 / 16)


def test_counterexample_cycle_product_bounded_away_from_zero():
    vals = []
    for n in (60, 120):
        rep = counterexample_demo("cycle_product", n, trials=4000, seed=5)
        vals.append(rep.summary["estimate"])
        assert rep.summary["n"] == 3 * n
    assert all(v > 0.05 for v in vals)


def test_counterexample_kind_validation():
    with pytest.raises(PreconditionError):
        counterexample_demo("torus", 100, trials=10, seed=0)


def test_threshold_scan_structure_and_reproducibility():
    specs = [FamilySpec.random_regular(400, 3, seed=8)]
    rep1 = threshold_scan(specs, a=0.05, trials=80, seed=21, grid_points=51)
    rep2 = threshold_scan(specs, a=0.05, trials=80, seed=21, grid_points=51)
    assert rep1.points == rep2.points  # bit-identical estimates
    assert rep1.summary == rep2.summary
    row = rep1.summary["per_family"][0]
    assert row["bracket_lo"] <= row["p_hat"] <= row["bracket_hi"]
    assert 0.3 < row["p_hat"] < 0.7
    assert {"family", "n", "p", "L1_frac", "L1_frac_se"} <= set(rep1.points[0])


def test_threshold_scan_subcritical_point_stays_below_level():
    # at p = (1 - 0.1)/(d-1) the smoothed giant fraction sits below a = 0.05
    # once n is large in the scan sequence
    rep = threshold_scan([FamilySpec.random_regular(10 ** 4, 3, seed=22)], a=0.05,
                         trials=100, seed=31)
    frac = {round(pt["p"], 2): pt["L1_frac"] for pt in rep.points}
    assert frac[0.45] < 0.05


def test_sprinkling_demo_saturated_phase():
    # eps large enough that p = 1: the union is the full (connected) graph
    rep = sprinkling_giant_demo(FamilySpec.random_regular(200, 3, seed=6), eps=1.5,
                                trials=3, seed=7)
    assert rep.summary["p"] == 1.0
    assert rep.summary["union_frac"] == pytest.approx(1.0)
    assert rep.summary["gw_survival"] == 1.0


def test_sprinkling_demo_regular_graph_required():
    with pytest.raises(PreconditionError, match="regular"):
        sprinkling_giant_demo(FamilySpec.path(5), eps=0.5, trials=2, seed=0)


def test_sprinkling_demo_mechanism_small():
    rep = sprinkling_giant_demo(FamilySpec.random_regular(3000, 4, seed=9), eps=0.5,
                                trials=6, seed=10)
    s = rep.summary
    assert (1 - s["p1"]) * (1 - s["p2"]) == pytest.approx(1 - s["p"], rel=1e-12)
    assert s["marginal_sigma"] < 5.0
    assert abs(s["union_frac"] - s["gw_survival"]) < 0.15
    assert s["phase1_frac_ge_m"] >= s["union_frac"] - 1.0  # sanity: fields populated


def test_sprinkling_demo_lattice_mode_is_exploratory():
    # box-regime run: p = (1+eps)/(2*dim) on a torus, report-only
    rep = sprinkling_giant_demo(FamilySpec.box(3, 4, torus=True), eps=0.5, trials=2,
                                seed=3, p_mode="lattice")
    s = rep.summary
    assert s["exploratory"] is True
    assert s["d"] == 6 and s["p"] == pytest.approx(1.5 / 6)
    assert (1 - s["p1"]) * (1 - s["p2"]) == pytest.approx(1 - s["p"], rel=1e-12)


def test_sprinkling_demo_explicit_m_floor():
    rep = sprinkling_giant_demo(FamilySpec.random_regular(100, 3, seed=2), eps=0.5,
                                trials=2, seed=3, m_mode=7)
    assert rep.summary["m_threshold"] == 7
    with pytest.raises(PreconditionError):
        sprinkling_giant_demo(FamilySpec.random_regular(100, 3, seed=2), eps=0.5,
                              trials=2, seed=3, m_mode="huge")


def test_percolated_expander_cheeger_small():
    rep = percolated_expander_cheeger(FamilySpec.random_regular(12, 3, seed=3),
                                      p_list=[0.7, 0.9, 1.0], trials=40, seed=11)
    s = rep.summary
    freqs = [pt["pass_frequency"] for pt in rep.points]
    assert s["coupling_violations"] == 0
    assert all(b >= a for a, b in zip(freqs, freqs[1:]))  # coupled monotonicity
    if s["full_graph_passes"]:
        assert freqs[-1] == 1.0  # p = 1 keeps the full graph


def test_report_writers(tmp_path):
    rep = counterexample_demo("cycle", 16, trials=500, seed=4)
    jpath = tmp_path / "rep.json"
    cpath = tmp_path / "rep.csv"
    write_report_json(rep, str(jpath))
    write_report_csv(rep, str(cpath))
    payload = json.loads(jpath.read_text())
    assert set(payload) == {"id", "config", "points", "summary", "seed", "runtime_s"}
    assert payload["seed"] == 4
    lines = cpath.read_text().splitlines()
    assert lines[0] == "# experiment=counterexample_demo"
    assert any(line.startswith("# seed=4") for line in lines)
    # identical reruns agree on everything except runtime
    rep2 = counterexample_demo("cycle", 16, trials=500, seed=4)
    d1, d2 = rep.to_dict(), rep2.to_dict()
    d1.pop("runtime_s"), d2.pop("runtime_s")
    assert d1 == d2
