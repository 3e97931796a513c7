"""Smoke tests for the python module: one probe per exposed operation."""

import math

import pytest

import cascadelab as cl


TC = cl.WeightDistribution([0.0, 2.0], [0.5, 0.5])


def test_distribution_roundtrip():
    d = cl.WeightDistribution.parse("atoms=0.5,1.5;probs=0.5,0.5")
    assert d.atoms == [0.5, 1.5]
    assert d.mean() == pytest.approx(1.0)
    assert d.variance() == pytest.approx(0.25)
    assert d.moment(2.0) == pytest.approx(1.25)
    with pytest.raises(ValueError):
        cl.WeightDistribution.parse("atoms=0,7;probs=0.5,0.5")


def test_structure_function_vanishes_for_the_critical_branching_law():
    sf = cl.StructureFunction(2, TC)
    assert sf.is_totally_critical()
    for q in (1.5, 2.0, 3.7, 8.0):
        assert sf.phi(q) == pytest.approx(0.0, abs=1e-12)
    assert sf.find_critical_exponent()["kind"] == "totally_critical"
    assert sf.classify(2.0)["regime"] == "critical"


def test_structure_function_locates_a_genuine_root():
    sqrt3 = cl.WeightDistribution.parse(
        "atoms=2.732050807568877,0.42264973081037416;probs=0.25,0.75"
    )
    root = cl.StructureFunction(2, sqrt3).find_critical_exponent()
    assert root["kind"] == "root"
    assert root["q_crit"] == pytest.approx(2.0, abs=1e-8)


def test_cascade_moments_match_the_closed_population_law():
    table = cl.cascade_moments(2, TC, 2, 64)
    for n in (0, 1, 10, 64):
        assert table.value(n, 2) == pytest.approx(1 + n / 2, rel=1e-12)
    assert table.value(5, 1) == pytest.approx(1.0)
    csv = table.to_csv()
    assert csv.splitlines()[0] == "n,k,value,log_value,domain"


def test_theta_moments_on_a_depth_one_tree():
    row = cl.theta_moments(2, [1.0, 1.0], TC, 2)
    assert row["value"][1] == pytest.approx(3.0)
    assert row["value"][2] == pytest.approx(11.0)


def test_reduce_profile_worked_example():
    red = cl.reduce_profile(2, [1.0, 1.0], TC)
    assert red["beta"] == [11.0]
    assert red["var_x"] == pytest.approx(1.0)
    assert red["squared_atoms"] == [0.0, 4.0]


def test_reduction_pipeline_halves_the_exponent():
    out = cl.reduction_pipeline(2, cl.WeightDistribution([0.5, 1.5], [0.5, 0.5]), 4.0, 5)
    assert [s["exponent"] for s in out["stages"]] == [4.0, 2.0, 1.0]
    assert out["preflight"]["regime"] == "subcritical"
    with pytest.raises(RuntimeError):
        cl.reduction_pipeline(2, TC, 4.0, 5)


def test_bounds_bracket_the_exact_moment():
    bounds = cl.evaluate_bounds(2, [0.0, 0.0, 0.25], TC, 2.0)
    exact = cl.cascade_moments(2, TC, 2, 2).value(2, 2)
    assert bounds["lower"] <= exact <= 3.0 * bounds["upper_core"]


def test_monte_carlo_is_reproducible_across_threads():
    kwargs = dict(branching=2, dist=TC, depth=6, q=2.0, seed=42, samples=2000)
    a = cl.estimate_moment(**kwargs, threads=1)
    b = cl.estimate_moment(**kwargs, threads=3)
    assert a == b
    exact = cl.cascade_moments(2, TC, 2, 6).value(6, 2)
    assert abs(a["mean"] - exact) <= 5 * a["stderr"]


def test_theorem_report_verdict():
    verdict = cl.theorem_report(2, TC, 2.0, 512, tolerance=0.05)
    assert verdict["theorem"] == "totally_critical_moment_growth"
    assert verdict["pass"]
    assert verdict["slope"] == pytest.approx(1.0, abs=0.05)
