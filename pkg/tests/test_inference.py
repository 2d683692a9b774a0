import numpy as np
import pytest
from scipy import stats

from graphcorr.errors import ValidationError
from graphcorr.graph import from_upper, vectorize_upper
from graphcorr.inference import (
    NAIVE,
    PowerResult,
    _t_pvalue,
    naive_pearson_test,
    pearson_analytic_pvalue,
    power_estimate,
    pvalue_test,
    rejection_region,
    replicate_rng,
    simulate_power,
    two_sided_pvalue,
)
from graphcorr.samplers import sample_correlated_bernoulli_sbm
from graphcorr.settings import FIG3, FIG4


def test_pvalue_all_ties_clamps_to_one_over_r():
    assert two_sided_pvalue(0.3, np.full(20, 0.3)) == pytest.approx(0.05)


def test_pvalue_extreme_and_central():
    null = np.linspace(-1, 1, 100)
    assert two_sided_pvalue(5.0, null) == pytest.approx(0.01)
    assert two_sided_pvalue(-5.0, null) == pytest.approx(0.01)
    assert two_sided_pvalue(0.0, null) == pytest.approx(1.0)
    # 10 of 100 null values exceed 0.81 -> 2 * 10 / 100
    assert two_sided_pvalue(0.81, null) == pytest.approx(0.2)


def test_rejection_region_linear_percentiles():
    lo, hi = rejection_region(np.arange(100.0), 0.05)
    assert lo == pytest.approx(2.475)
    assert hi == pytest.approx(96.525)


def test_pvalue_test_identical_graphs():
    rng = np.random.default_rng(0)
    x, _ = sample_correlated_bernoulli_sbm(FIG3[3].params(100, 0.0), rng)
    res = pvalue_test(x, x, r=500, method="dcorr")
    assert res.observed == pytest.approx(1.0)
    assert res.null_stats.max() < 1.0
    assert res.pvalue == pytest.approx(1 / 500)
    assert res.null_stats.shape == (500,)


def test_null_concentrates_away_from_zero_on_sbm():
    rng = np.random.default_rng(14)
    params = FIG3[3].params(100, 0.0)
    x, y = sample_correlated_bernoulli_sbm(params, rng)
    res = pvalue_test(x, y, r=100, method="pearson", z=params.z)
    # shared block structure alone correlates the two graphs
    assert res.null_stats.mean() > 0.1
    assert res.pvalue > 0.01


def test_pvalue_test_deterministic_and_estimates_once():
    rng = np.random.default_rng(1)
    x, y = sample_correlated_bernoulli_sbm(FIG3[4].params(40, 0.0), rng)
    a = pvalue_test(x, y, r=40, method="pearson", seed=3)
    b = pvalue_test(x, y, r=40, method="pearson", seed=3)
    np.testing.assert_array_equal(a.null_stats, b.null_stats)
    assert a.k_used == b.k_used
    d = a.to_dict()
    assert d["replicates"] == 40 and len(d["null_stats"]) == 40


def test_pvalue_test_detects_strong_dependence():
    rng = np.random.default_rng(2)
    x, y = sample_correlated_bernoulli_sbm(FIG3[3].params(60, 0.6), rng)
    for method in ("pearson", "dcorr", "mgc"):
        res = pvalue_test(x, y, r=100, method=method, z=FIG3[3].params(60, 0.6).z)
        assert res.pvalue <= 0.02


def test_pvalue_test_rejects_small_r():
    x = np.ones((5, 5)) - np.eye(5)
    with pytest.raises(ValidationError):
        pvalue_test(x, x, r=10)


def test_analytic_pvalue_matches_scipy_pearsonr():
    rng = np.random.default_rng(3)
    n = 30
    m = n * (n - 1) // 2
    x = from_upper(rng.random(m), n)
    y = from_upper(0.2 * vectorize_upper(x) + rng.random(m), n)
    ref = stats.pearsonr(vectorize_upper(x), vectorize_upper(y)).pvalue
    assert pearson_analytic_pvalue(x, y) == pytest.approx(ref, rel=1e-9)
    assert naive_pearson_test(x, y) == (ref < 0.05)


def test_analytic_pvalue_perfect_and_zero_correlation():
    x = from_upper(np.arange(10.0), 5)
    assert pearson_analytic_pvalue(x, x) == 0.0
    assert _t_pvalue(0.0, 45) == 1.0


def test_power_one_for_identical_er_graphs():
    res = simulate_power(FIG3[1], 1.0, 10, ("pearson", "dcorr", "mgc"), r=100, seed=15)
    assert all(v.power == 1.0 for v in res.values())


def test_replicate_rng_streams_are_distinct_and_stable():
    a = replicate_rng(7, 1, 2).random(3)
    b = replicate_rng(7, 1, 2).random(3)
    c = replicate_rng(7, 2, 1).random(3)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)


def test_simulate_power_small_run():
    res = simulate_power(FIG4[1], 0.5, 20, ("pearson", "dcorr", NAIVE), r=100, seed=4)
    assert set(res) == {"pearson", "dcorr", NAIVE}
    for v in res.values():
        assert isinstance(v, PowerResult)
        assert 0 <= v.power <= 1
    assert res["pearson"].power > 0.9


def test_simulate_power_deterministic_and_thread_independent():
    a = simulate_power(FIG3[1], 0.1, 20, ("dcorr",), r=100, seed=5)
    b = simulate_power(FIG3[1], 0.1, 20, ("dcorr",), r=100, seed=5)
    c = simulate_power(FIG3[1], 0.1, 20, ("dcorr",), r=100, seed=5, threads=2)
    assert a["dcorr"].power == b["dcorr"].power == c["dcorr"].power


def test_null_per_draw_pools_more_permutations():
    a = simulate_power(FIG3[3], 0.0, 20, ("pearson",), r=100, seed=8)
    b = simulate_power(FIG3[3], 0.0, 20, ("pearson",), r=100, seed=8, null_per_draw=1)
    c = simulate_power(FIG3[3], 0.0, 20, ("pearson",), r=100, seed=8, null_per_draw=5)
    d = simulate_power(FIG3[3], 0.0, 20, ("pearson",), r=100, seed=8, null_per_draw=5, threads=2)
    assert a["pearson"].power == b["pearson"].power
    assert c["pearson"].power == d["pearson"].power
    assert 0 <= c["pearson"].power <= 0.2
    with pytest.raises(ValidationError):
        simulate_power(FIG3[3], 0.0, 20, r=100, null_per_draw=0)


def test_power_estimate_wrapper_and_mc_error():
    res = power_estimate(FIG3[2], 0.0, 20, r=100, method="pearson", seed=6)
    assert res.method == "pearson" and res.replicates == 100
    assert res.mc_error == pytest.approx(np.sqrt(max(res.power * (1 - res.power), 1e-12) / 100))


def test_simulate_power_validates():
    with pytest.raises(ValidationError):
        simulate_power(FIG3[1], 0.0, 20, r=50)
    with pytest.raises(ValidationError):
        simulate_power(FIG3[1], 0.0, 20, r=100, alpha=1.5)
