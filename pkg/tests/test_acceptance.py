"""Acceptance gate.

Each criterion runs at its stated tolerance and records one PASS/FAIL line;
the lines are printed in the pytest terminal summary (and by running this
file directly).  A criterion that fails for an understood reason is marked
``xfail(strict=True)``: the check still runs in full, and an unexpected
pass would turn the suite red.
"""
import math
import time

import numpy as np
import pytest

from imprediction import cli
from imprediction.datasets import get_dataset
from imprediction.engine import build_empirical_G, build_endpoint_Gs, region, region_from_endpoint_pairs
from imprediction.gamma_solver import GammaSolveConfig, approx_cdf_T2, solve_theta1
from imprediction.models import (
    LocationScaleStats,
    PredictionTarget,
    SampleData,
    make_sampler,
    normal_kth_of_m_sampler,
    normal_next_interval,
    poisson_arrival_quantile,
)
from imprediction.streams import UniformStream, derive_stream_id
from imprediction.validity import (
    SimScenario,
    binomial_grid,
    gamma_grid,
    grid_runner,
    ks_critical,
    lognormal_grid,
    run_scenario,
)

import oracles

RESULTS = {}

# published values
SOIL_BOUND = 136.16
BREAKDOWN_BOUND = 73.53
HEARING_INTERVAL = (6, 21)

# Monte Carlo sizes for the coverage grids (per replication)
LOGNORMAL_GRID_DRAWS = 10_000
GAMMA_GRID_DRAWS = 2_000


def record(num, ok, detail):
    RESULTS[num] = (bool(ok), detail)
    return ok


def report_lines():
    return [f"CRITERION {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}" for k, (ok, detail) in sorted(RESULTS.items())]


def soil_bound(seed=0, draws=100_000):
    data = SampleData.sample(get_dataset("soil_lead_offsite").values, "lognormal")
    G = build_empirical_G(make_sampler(data, PredictionTarget("mean_of_m", m=5)), draws, UniformStream(seed))
    return region(G, "right_sided", 0.05).upper, G


def test_c1_lognormal_soil():
    t0 = time.perf_counter()
    upper, _ = soil_bound()
    dt = time.perf_counter() - t0
    rel = upper / SOIL_BOUND - 1
    ok = abs(rel) <= 0.02 and dt < 10
    record(1, ok, f"soil upper bound {upper:.3f} vs {SOIL_BOUND} ({rel:+.2%}, tol 2%), {dt:.1f}s (< 10s)")
    assert ok


def breakdown_bound(seed=0, draws=100_000):
    data = SampleData.sample(get_dataset("machine_breakdowns").values, "gamma")
    sampler = make_sampler(data, PredictionTarget("max_of_m", m=5), solver=GammaSolveConfig("gamma_matched_approx"))
    G = build_empirical_G(sampler, draws, UniformStream(seed))
    return region(G, "left_sided", 0.10).lower


def test_c2_gamma_breakdowns():
    t0 = time.perf_counter()
    lower = breakdown_bound()
    dt = time.perf_counter() - t0
    rel = lower / BREAKDOWN_BOUND - 1
    ok = abs(rel) <= 0.02 and dt < 60
    record(2, ok, f"breakdown lower bound {lower:.3f} vs {BREAKDOWN_BOUND} ({rel:+.2%}, tol 2%), {dt:.1f}s (< 60s)")
    assert ok


def test_c3_binomial_hearing_loss():
    t0 = time.perf_counter()
    data = SampleData.binomial(23, 23061)
    sampler = make_sampler(data, PredictionTarget("binomial_count_of_m", m=12694), binomial_method="endpoints")
    lo, hi = build_endpoint_Gs(sampler, 10_000, UniformStream(0))
    reg = region_from_endpoint_pairs(lo, hi, 0.10, "singleton")
    dt = time.perf_counter() - t0
    ok = (reg.lower, reg.upper) == HEARING_INTERVAL and dt < 5
    record(3, ok, f"interval ({reg.lower:g}, {reg.upper:g}) vs {HEARING_INTERVAL} exactly, {dt:.2f}s (< 5s)")
    assert ok


def normal_cases():
    # design fixed before the first run: conventional levels and moderate samples
    rng = np.random.default_rng(20240601)
    for i in range(20):
        n = int(rng.integers(5, 51))
        mean = rng.uniform(-100, 100)
        sd = math.exp(rng.uniform(math.log(0.1), math.log(10)))
        alpha = rng.uniform(0.05, 0.20)
        yield i, n, mean, sd, alpha


def test_c4_normal_closed_form():
    worst, misses = 0.0, []
    for i, n, mean, sd, alpha in normal_cases():
        st_ = LocationScaleStats(n, mean, sd)
        G = build_empirical_G(normal_kth_of_m_sampler(st_, 1, 1), 10**6, UniformStream(0, derive_stream_id("c4", i)))
        mc, exact = region(G, "singleton", alpha), normal_next_interval(st_, alpha)
        err = max(abs(mc.lower - exact.lower), abs(mc.upper - exact.upper)) / sd
        worst = max(worst, err)
        if err > 0.005:
            misses.append(f"case {i} (n={n}, alpha={alpha:.3f}): {err:.4f} sd")
    ok = not misses
    record(4, ok, f"worst endpoint error {worst:.4f} sd (tol 0.005 sd) over 20 cases; misses: {misses or 'none'}")
    assert ok


def test_c5_pit_lognormal():
    t0 = time.perf_counter()
    sc = SimScenario("lognormal", {"mu": 2.173, "sigma2": 2.3808}, 15, PredictionTarget("mean_of_m", m=5),
                     replications=2000, mc_draws=10_000, seed=0)
    rep = run_scenario(sc)
    dt = time.perf_counter() - t0
    crit = ks_critical(2000, 0.01)
    ok = rep.ks_statistic < crit and dt < 300
    record(5, ok, f"KS {rep.ks_statistic:.4f} < 1% critical {crit:.4f} (2000 reps), {dt:.0f}s (< 300s)")
    assert ok


def test_c6_coverage_grids():
    t0 = time.perf_counter()
    cells = lognormal_grid(replications=1000, mc_draws=LOGNORMAL_GRID_DRAWS) + gamma_grid(
        replications=1000, mc_draws=GAMMA_GRID_DRAWS)
    reps = grid_runner(cells)
    dt = time.perf_counter() - t0
    band = 3 * math.sqrt(0.9 * 0.1 / 1000)
    bad = [
        f"{r.scenario.model} {r.scenario.params} n={r.scenario.n} {r.scenario.target.label()}: {r.coverage_estimate}"
        for r in reps if r.error or abs(r.coverage_estimate - 0.90) > band
    ]
    covs = [r.coverage_estimate for r in reps if not r.error]
    ok = not bad and dt < 1800
    record(6, ok, f"{len(reps)} cells, coverage range [{min(covs):.3f}, {max(covs):.3f}] vs 0.90 +/- {band:.3f}, "
                  f"{dt:.0f}s (< 1800s); outside: {bad or 'none'}")
    assert ok


def test_c7_binomial_validity():
    reps = grid_runner(binomial_grid())
    detail, ok = [], True
    for r in reps:
        cell_ok = r.error is None and r.coverage_estimate >= 0.95 - 3 * r.mc_standard_error
        ok &= cell_ok
        detail.append(f"theta={r.scenario.params['theta']}: {r.coverage_estimate:.3f}")
    record(7, ok, "coverage of 95% upper limits (>= 0.95 - 3 SE): " + ", ".join(detail))
    assert ok


W_LEVELS = (0.1, 0.5, 0.9)


@pytest.mark.xfail(strict=True, reason="the stated density (1+r)^-(n+k) is the ratio law only for k = 1")
def test_c8_poisson_closed_form():
    worst_int, agree = 0.0, 0
    for n in range(1, 11):
        for k in range(1, 11):
            errs = [abs(poisson_arrival_quantile(n, k, w, 1.0) - 1 - oracles.power_law_ratio_quantile(n, k, w))
                    for w in W_LEVELS]
            worst_int = max(worst_int, max(errs))
            agree += max(errs) <= 1e-10
    sim_errs = []
    for n in range(1, 11):
        for k in range(1, 11):
            for w in (0.5, 0.9):
                q = poisson_arrival_quantile(n, k, w, 1.0) - 1
                sim = oracles.gamma_ratio_quantile_sim(n, k, w, seed=1000 * n + k)
                sim_errs.append((abs(q / sim - 1), n, k, w))
    worst_sim = max(sim_errs)
    within = sum(e <= 0.01 for e, *_ in sim_errs)
    ok = agree == 100 and worst_sim[0] <= 0.01
    record(8, ok, f"vs integrated (1+r)^-(n+k): {agree}/100 (n,k) pairs within 1e-10 (worst {worst_int:.3g}); "
                  f"vs 10^6-draw ratio simulation: {within}/{len(sim_errs)} within 1%, worst {worst_sim[0]:.2%} "
                  f"at (n,k,w)={worst_sim[1:]}")
    assert ok


def test_c9_gamma_solver():
    rng = np.random.default_rng(99)
    fails = 0
    xs = np.geomspace(1e-4, 1e5, 400)
    for _ in range(200):
        n = int(rng.integers(2, 201))
        t2 = -math.exp(rng.uniform(math.log(1e-3), math.log(5.0)))
        u2 = rng.uniform(0.001, 0.999)
        f = approx_cdf_T2(xs, t2, n)
        monotone = np.all(np.diff(f) <= 0)
        crosses = int(np.sum((f[:-1] > u2) & (f[1:] <= u2)))
        root = solve_theta1(t2, u2, n)
        fails += not (monotone and crosses == 1 and abs(approx_cdf_T2(root, t2, n) - u2) < 1e-6)
    worst = 0.0
    mc_cfg = GammaSolveConfig(method="mc_bisection", mc_draws=100_000, rel_tol=1e-5)
    for _ in range(8):
        n = int(rng.integers(20, 61))
        t2 = -math.exp(rng.uniform(math.log(0.01), math.log(2.0)))
        u2 = rng.uniform(0.05, 0.95)
        a, b = solve_theta1(t2, u2, n), solve_theta1(t2, u2, n, mc_cfg)
        worst = max(worst, abs(a / b - 1))
    ok = fails == 0 and worst <= 0.05
    record(9, ok, f"existence/uniqueness failures {fails}/200; matched vs MC-bisection worst rel. root error "
                  f"{worst:.2%} over 8 triples with n >= 20 (tol 5%)")
    assert ok


def test_c10_determinism(capsys):
    same_soil = soil_bound(seed=3, draws=20_000)[1].draws.tobytes() == soil_bound(seed=3, draws=20_000)[1].draws.tobytes()
    sc = SimScenario("gamma", {"shape": 0.5, "scale": 1.0}, 10, PredictionTarget("max_of_m", m=5),
                     replications=120, mc_draws=1000, seed=11)
    one, two = run_scenario(sc, workers=1), run_scenario(sc, workers=2)
    same_workers = one.pit_samples.tobytes() == two.pit_samples.tobytes() and all(
        np.array_equal(one.covered[k], two.covered[k]) for k in one.covered)
    argv = ["interval", "--model", "binomial", "--count", "23/23061", "--future-trials", "12694", "--alpha", "0.1"]
    cli.main(argv)
    first = capsys.readouterr().out
    cli.main(argv)
    same_cli = capsys.readouterr().out == first
    ok = same_soil and same_workers and same_cli
    record(10, ok, f"repeat run identical: {same_soil}; workers 1 vs 2 identical: {same_workers}; "
                   f"CLI JSON byte-identical: {same_cli}")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
