import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from imprediction import dists
from imprediction.datasets import get_dataset
from imprediction.engine import build_empirical_G, build_endpoint_Gs, eval_G, region
from imprediction.errors import ParameterDomainError
from imprediction.models import (
    LocationScaleStats,
    PredictionTarget,
    SampleData,
    binomial_endpoint_sampler,
    binomial_modified_sampler,
    gamma_sampler,
    gamma_stats,
    lognormal_mean_of_m_sampler,
    lognormal_stats,
    make_sampler,
    normal_kth_of_m_sampler,
    normal_next_interval,
    normal_stats,
    poisson_arrival_cdf,
    poisson_arrival_quantile,
    poisson_arrival_sampler,
)
from imprediction.streams import UniformStream

import oracles

# oracles.student_t_quantile(3, 0.95)
T3_095 = 2.353363434801821
# oracles.gamma_ratio_quantile_sim(5, 2, 0.9), 10^6 draws
RATIO_Q_5_2_09 = 1.0443409609407248


def test_normal_next_interval_frozen():
    reg = normal_next_interval(LocationScaleStats(4, 10.0, 2.0), 0.10)
    half = T3_095 * 2 * math.sqrt(1.25)
    assert reg.lower == pytest.approx(10 - half, abs=1e-9)
    assert reg.upper == pytest.approx(10 + half, abs=1e-9)
    assert (round(reg.lower, 2), round(reg.upper, 2)) == (4.74, 15.26)


def test_normal_next_interval_large_n_and_symmetry():
    reg = normal_next_interval(LocationScaleStats(10**7, 0.0, 1.0), 0.05)
    assert reg.upper == pytest.approx(1.959964, abs=1e-5)
    assert reg.lower == pytest.approx(-reg.upper)


def test_normal_sampler_matches_scaled_t():
    st_ = LocationScaleStats(8, 3.0, 1.5)
    G = build_empirical_G(normal_kth_of_m_sampler(st_, 1, 1), 10_000, UniformStream(4))
    grid = np.linspace(-3, 9, 200)
    exact = dists.cdf(dists.student_t(7), (grid - 3.0) / (1.5 * math.sqrt(1 + 1 / 8)))
    assert np.max(np.abs(eval_G(G, grid) - exact)) < 0.02


def test_sprinkler_setting_interval_is_finite():
    st_ = LocationScaleStats(20, 0.0, 1.0)
    G = build_empirical_G(normal_kth_of_m_sampler(st_, 40, 36), 100_000, UniformStream(0))
    reg = region(G, "singleton", 0.10)
    assert np.isfinite(reg.lower) and np.isfinite(reg.upper) and reg.lower < reg.upper
    # the 36th largest of 40 sits in the lower tail, so the interval lies below the sample mean
    assert reg.upper < st_.mean


def test_kth_largest_order_statistic_law():
    # with a huge sample the parameter uncertainty vanishes: check against sorted normals
    st_ = LocationScaleStats(10**8, 0.0, 1.0)
    G = build_empirical_G(normal_kth_of_m_sampler(st_, 5, 2), 200_000, UniformStream(1))
    ref = np.sort(np.random.default_rng(0).standard_normal((200_000, 5)), axis=1)[:, 5 - 2]
    for p in (0.1, 0.5, 0.9):
        assert G.quantile(p) == pytest.approx(np.quantile(ref, p), abs=0.02)


def test_lognormal_m1_reduces_to_t_bound():
    x = np.log(get_dataset("soil_lead_offsite").values)
    s = lognormal_stats(np.exp(x))
    G = build_empirical_G(lognormal_mean_of_m_sampler(s, 1), 200_000, UniformStream(2))
    closed = math.exp(x.mean() + dists.quantile(dists.student_t(14), 0.95) * x.std(ddof=1) * math.sqrt(1 + 1 / 15))
    assert region(G, "right", 0.05).upper == pytest.approx(closed, rel=0.03)


def test_lognormal_needs_log_scale_stats():
    with pytest.raises(ParameterDomainError):
        lognormal_mean_of_m_sampler(normal_stats([1.0, 2.0, 3.0]), 5)


def test_onsite_mean_below_offsite_bound():
    data = SampleData.sample(get_dataset("soil_lead_offsite").values, "lognormal")
    G = build_empirical_G(make_sampler(data, PredictionTarget("mean_of_m", m=5)), 20_000, UniformStream(0))
    assert np.mean(get_dataset("soil_lead_onsite").values) == pytest.approx(83.6)
    assert region(G, "right", 0.05).contains(83.6)


def test_gamma_stats_and_am_gm():
    s = gamma_stats(get_dataset("machine_breakdowns").values)
    assert s.n == 20 and s.t1 == 1591
    assert s.t2 < 0
    with pytest.raises(ParameterDomainError):
        gamma_stats([5.0, 5.0, 5.0])


def test_gamma_draws_mean_for_large_sample():
    y = np.random.default_rng(5).gamma(3.0, 2.0, 20_000)
    G = build_empirical_G(gamma_sampler(gamma_stats(y), PredictionTarget()), 20_000, UniformStream(3))
    assert G.draws.mean() == pytest.approx(6.0, rel=0.02)


def test_gamma_max_dominates_next():
    s = gamma_stats(get_dataset("machine_breakdowns").values)
    a = build_empirical_G(gamma_sampler(s, PredictionTarget()), 5000, UniformStream(0))
    b = build_empirical_G(gamma_sampler(s, PredictionTarget("max_of_m", m=5)), 5000, UniformStream(0))
    # same stream, Ut**(1/m) >= Ut, so every draw increases
    assert region(b, "left", 0.1).lower >= region(a, "left", 0.1).lower
    with pytest.raises(ParameterDomainError):
        gamma_sampler(s, PredictionTarget("mean_of_m", m=5))


def test_binomial_endpoints_ordered_and_contain_modified():
    lo, hi = binomial_endpoint_sampler(7, 40, 30).draw(UniformStream(9), 5000)
    assert np.all(lo <= hi)
    mid = binomial_modified_sampler(7, 40, 30).draw(UniformStream(9), 5000)
    assert np.all((lo <= mid) & (mid <= hi))


def test_binomial_degenerate_edges():
    lo, hi = binomial_endpoint_sampler(0, 10, 5).draw(UniformStream(0), 1000)
    assert np.all(lo == 0)
    lo, hi = binomial_endpoint_sampler(10, 10, 5).draw(UniformStream(0), 1000)
    assert np.all(hi == 5)


def test_binomial_modified_median_symmetric():
    d = binomial_modified_sampler(50, 100, 100).draw(UniformStream(1), 20_000)
    assert np.median(d) == pytest.approx(50, abs=1)
    # brute force: theta from the posterior-like mixture, then a binomial count
    rng = np.random.default_rng(2)
    u = rng.random(20_000)
    th = special.betaincinv(50, 51, u) + (special.betaincinv(51, 50, u) - special.betaincinv(50, 51, u)) * rng.random(20_000)
    assert np.mean(d) == pytest.approx(np.mean(rng.binomial(100, th)), abs=0.3)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 50), st.data())
def test_binomial_endpoint_beta_identity(n, data):
    # each endpoint is a theta at which y is a boundary of the binomial cdf
    y = data.draw(st.integers(0, n))
    u = np.array([data.draw(st.floats(0.01, 0.99))])
    lo = special.betaincinv(y, n - y + 1, u) if y > 0 else np.zeros(1)
    hi = special.betaincinv(y + 1, n - y, u) if y < n else np.ones(1)
    assert lo[0] <= hi[0]
    if y > 0:
        assert 1 - dists.cdf(dists.binomial(n, lo[0]), y - 1) == pytest.approx(u[0], abs=1e-9)
    if y < n:
        assert dists.cdf(dists.binomial(n, hi[0]), y) == pytest.approx(1 - u[0], abs=1e-9)


def test_poisson_quantile_k1_closed_form():
    assert poisson_arrival_quantile(1, 1, 0.5, 1.0) == pytest.approx(2.0, abs=1e-12)
    assert poisson_arrival_quantile(1, 1, 0.5, 1.0) == pytest.approx(1 + oracles.power_law_ratio_quantile(1, 1, 0.5), abs=1e-10)
    for n in (1, 4, 9):
        assert poisson_arrival_quantile(n, 1, 0.7, 2.0) == pytest.approx(2.0 * 0.3 ** (-1 / n))


def test_poisson_quantile_matches_ratio_simulation():
    assert poisson_arrival_quantile(5, 2, 0.9, 1.0) - 1 == pytest.approx(RATIO_Q_5_2_09, rel=0.01)


def test_poisson_quantile_lower_limit():
    assert poisson_arrival_quantile(3, 2, 1e-12, 4.0) == pytest.approx(4.0)


@given(st.integers(1, 30), st.integers(1, 30), st.floats(0.001, 0.999))
def test_poisson_cdf_inverts_quantile(n, k, w):
    assert poisson_arrival_cdf(n, k, poisson_arrival_quantile(n, k, w, 3.0), 3.0) == pytest.approx(w, abs=1e-9)


def test_poisson_sampler_agrees_with_closed_form():
    G = build_empirical_G(poisson_arrival_sampler(2.0, 6, 3), 100_000, UniformStream(0))
    for p in (0.1, 0.5, 0.9):
        assert G.quantile(p) == pytest.approx(poisson_arrival_quantile(6, 3, p, 2.0), rel=0.02)


def test_targets():
    for text in ("next", "mean-of-m:5", "max-of-m:3", "kth-largest:40:36", "arrival:3", "count-of-m:12694"):
        assert PredictionTarget.parse(text).label() == text
    with pytest.raises(ParameterDomainError):
        PredictionTarget("kth_largest_of_m", m=3, k=4)
    with pytest.raises(ParameterDomainError):
        PredictionTarget.parse("median:4")


def test_sample_data_validation():
    with pytest.raises(ParameterDomainError):
        SampleData.sample([1.0], "normal")
    with pytest.raises(ParameterDomainError):
        SampleData.sample([1.0, -2.0], "lognormal")
    with pytest.raises(ParameterDomainError):
        SampleData.binomial(5, 3)
    with pytest.raises(ParameterDomainError):
        normal_stats([2.0, 2.0, 2.0])


def test_model_target_mismatch():
    with pytest.raises(ParameterDomainError):
        make_sampler(SampleData.binomial(3, 10), PredictionTarget("mean_of_m", m=5))
    with pytest.raises(ParameterDomainError):
        make_sampler(SampleData.sample([1.0, 2.0, 4.0], "lognormal"), PredictionTarget("max_of_m", m=2))


def test_make_sampler_dispatch():
    s = make_sampler(SampleData.binomial(3, 10), PredictionTarget("binomial_count_of_m", m=4), binomial_method="endpoints")
    assert s.paired and s.discrete
    lo, hi = build_endpoint_Gs(s, 100, UniformStream(0))
    assert lo.n == hi.n == 100
    s = make_sampler(SampleData.arrival(3.0, 4), PredictionTarget("arrival_n_plus_k", k=2))
    assert not s.paired
