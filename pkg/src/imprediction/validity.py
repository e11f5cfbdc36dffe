"""Simulation studies: PIT uniformity of ``G_Y(Y_future)`` and region coverage.

Each replication draws fresh data and a fresh future value from the true
model, builds the empirical predictive distribution from the data alone, and
records the PIT value and whether each kind of prediction region covers the
future value.  Replication ``r`` of a scenario uses streams keyed by the
scenario's coordinates and ``r`` only, so results do not depend on grid
order or on how replications are split across workers.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sstats

from .engine import (
    DEFAULT_MC_DRAWS,
    build_empirical_G,
    build_endpoint_Gs,
    eval_G,
    region,
    region_from_endpoint_pairs,
)
from .errors import NumericalFailure, ParameterDomainError
from .gamma_solver import GammaSolveConfig
from .models import PredictionTarget, SampleData, make_sampler
from .randsets import AssertionKind, plausibility_from_G
from .streams import UniformStream, derive_stream_id

TRUE_PARAMS = {
    "normal": ("mu", "sigma"),
    "lognormal": ("mu", "sigma2"),
    "gamma": ("shape", "scale"),
    "binomial": ("theta",),
    "poisson_process": ("rate",),
}

KINDS = tuple(AssertionKind)


@dataclass(frozen=True)
class SimScenario:
    """One cell of a simulation study."""

    model: str
    params: dict
    n: int
    target: PredictionTarget = field(default_factory=PredictionTarget)
    alpha: float = 0.10
    assertion: AssertionKind = AssertionKind.right_sided
    replications: int = 1000
    mc_draws: int = DEFAULT_MC_DRAWS
    seed: int = 0
    binomial_method: str = "modified"
    solver: GammaSolveConfig | None = None

    def __post_init__(self):
        if self.model not in TRUE_PARAMS:
            raise ParameterDomainError(f"unknown model {self.model!r}")
        missing = set(TRUE_PARAMS[self.model]) - set(self.params)
        if missing:
            raise ParameterDomainError(f"{self.model} scenario needs {sorted(missing)}")
        p = self.params
        if self.model == "binomial":
            if not 0 <= p["theta"] <= 1:
                raise ParameterDomainError("theta must lie in [0, 1]")
        else:
            for name in TRUE_PARAMS[self.model]:
                if name != "mu" and not p[name] > 0:
                    raise ParameterDomainError(f"{name} must be positive")
        if self.replications < 100:
            raise ParameterDomainError("replications must be >= 100")
        if not 0 < self.alpha < 1:
            raise ParameterDomainError("alpha must lie in (0, 1)")
        if self.n < (1 if self.model in ("binomial", "poisson_process") else 2):
            raise ParameterDomainError("sample size too small")
        object.__setattr__(self, "assertion", AssertionKind.parse(self.assertion))

    @property
    def key(self):
        """Coordinates that determine the simulated data (alpha and assertion excluded)."""
        return (
            self.model,
            tuple(sorted((k, float(v)) for k, v in self.params.items())),
            self.n,
            self.target.kind,
            self.target.m,
            self.target.k,
            self.mc_draws,
            self.binomial_method,
        )

    def describe(self):
        return {
            "model": self.model,
            "params": json.dumps({k: self.params[k] for k in sorted(self.params)}),
            "n": self.n,
            "target": self.target.label(),
            "alpha": self.alpha,
            "assertion": self.assertion.value,
            "replications": self.replications,
            "mc_draws": self.mc_draws,
            "seed": self.seed,
        }


def ks_uniform(p):
    """Kolmogorov-Smirnov distance between the sample ``p`` and Unif(0, 1)."""
    p = np.sort(np.asarray(p, dtype=float))
    n = p.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - p), np.max(p - (i - 1) / n)))


def ks_critical(n, level=0.01):
    """Upper ``level`` critical value of the one-sample KS distance for ``n`` points."""
    return float(sstats.kstwo.isf(level, n))


@dataclass(eq=False)
class ValidityReport:
    scenario: SimScenario
    pit_samples: np.ndarray
    covered: dict
    ks_statistic: float
    ks_pvalue: float
    coverage_estimate: float
    mc_standard_error: float
    error: str | None = None

    def coverage_for(self, assertion) -> float:
        return float(np.mean(self.covered[AssertionKind.parse(assertion)]))

    def standard_error_for(self, assertion) -> float:
        c = self.coverage_for(assertion)
        return math.sqrt(c * (1 - c) / self.scenario.replications)

    def fraction_implausible(self, alpha, assertion) -> float:
        """Share of replications with ``pl(Y_future) <= alpha``."""
        pl = plausibility_from_G(self.pit_samples, AssertionKind.parse(assertion))
        return float(np.mean(np.asarray(pl) <= alpha))

    def row(self):
        out = self.scenario.describe()
        out.update(
            coverage=self.coverage_estimate,
            se=self.mc_standard_error,
            ks=self.ks_statistic,
            ks_pvalue=self.ks_pvalue,
            error=self.error or "",
        )
        return out


def _simulate_data(sc: SimScenario, stream: UniformStream):
    """Observed data and the realized future value under the true parameters."""
    p, t = sc.params, sc.target
    g = stream.generator
    if sc.model in ("normal", "lognormal"):
        sigma = p["sigma"] if sc.model == "normal" else math.sqrt(p["sigma2"])
        x = p["mu"] + sigma * g.standard_normal(sc.n)
        if sc.model == "normal":
            future = p["mu"] + sigma * g.standard_normal(t.m)
            # kth largest of m
            value = np.sort(future)[t.m - t.k] if t.kind == "kth_largest_of_m" else future[0]
            return SampleData.sample(x, "normal"), float(value)
        future = np.exp(p["mu"] + sigma * g.standard_normal(t.m))
        value = future.mean() if t.kind == "mean_of_m" else future[0]
        return SampleData.sample(np.exp(x), "lognormal"), float(value)
    if sc.model == "gamma":
        x = p["scale"] * g.standard_gamma(p["shape"], sc.n)
        future = p["scale"] * g.standard_gamma(p["shape"], t.m)
        value = future.max() if t.kind == "max_of_m" else future[0]
        return SampleData.sample(x, "gamma"), float(value)
    if sc.model == "binomial":
        y = int(g.binomial(sc.n, p["theta"]))
        return SampleData.binomial(y, sc.n), float(g.binomial(t.m, p["theta"]))
    t_n = g.standard_gamma(sc.n) / p["rate"]
    return SampleData.arrival(t_n, sc.n), float(t_n + g.standard_gamma(t.k) / p["rate"])


def simulate_replication(sc: SimScenario, r: int):
    """PIT value and per-kind coverage indicators for replication ``r``."""
    data_stream = UniformStream(sc.seed, derive_stream_id(sc.key, r, "data"))
    mc_stream = UniformStream(sc.seed, derive_stream_id(sc.key, r, "mc"))
    data, future = _simulate_data(sc, data_stream)
    sampler = make_sampler(data, sc.target, binomial_method=sc.binomial_method, solver=sc.solver)
    try:
        if sampler.paired:
            lower, upper = build_endpoint_Gs(sampler, sc.mc_draws, mc_stream)
            pit = math.nan
            regions = {k: region_from_endpoint_pairs(lower, upper, sc.alpha, k) for k in KINDS}
        else:
            G = build_empirical_G(sampler, sc.mc_draws, mc_stream)
            pit = eval_G(G, future)
            regions = {k: region(G, k, sc.alpha) for k in KINDS}
    except NumericalFailure as exc:
        exc.diagnostics["replication"] = r
        raise
    return pit, tuple(bool(regions[k].contains(future)) for k in KINDS)


def _run_block(args):
    sc, indices = args
    return [simulate_replication(sc, r) for r in indices]


def _report(sc: SimScenario, results) -> ValidityReport:
    pit = np.array([r[0] for r in results], dtype=float)
    flags = np.array([r[1] for r in results], dtype=bool).reshape(-1, len(KINDS))
    covered = {k: flags[:, i] for i, k in enumerate(KINDS)}
    cov = float(np.mean(covered[sc.assertion]))
    if np.all(np.isnan(pit)):
        ks, pval = math.nan, math.nan
    else:
        ks = ks_uniform(pit)
        pval = float(sstats.kstwo.sf(ks, pit.size))
    return ValidityReport(sc, pit, covered, ks, pval, cov, math.sqrt(cov * (1 - cov) / sc.replications))


def run_scenario(sc: SimScenario, workers: int = 1) -> ValidityReport:
    """All replications of one scenario; identical output for any ``workers``."""
    indices = list(range(sc.replications))
    if workers <= 1:
        results = _run_block((sc, indices))
    else:
        blocks = [indices[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_block, [(sc, b) for b in blocks]))
        results = [None] * sc.replications
        for block, part in zip(blocks, parts):
            for r, res in zip(block, part):
                results[r] = res
    return _report(sc, results)


def pit_study(sc: SimScenario, workers: int = 1) -> ValidityReport:
    """Distribution of ``G_Y(Y_future)`` across replications, with its KS distance to uniform."""
    return run_scenario(sc, workers)


def coverage_study(sc: SimScenario, workers: int = 1) -> ValidityReport:
    """Share of replications whose prediction region contains the future value."""
    return run_scenario(sc, workers)


def grid_runner(grid, workers: int = 1) -> list[ValidityReport]:
    """One report per scenario.  A failing cell yields a report carrying the error."""
    grid = list(grid)
    if not grid:
        raise ParameterDomainError("grid must be non-empty")
    reports = []
    for sc in grid:
        try:
            reports.append(run_scenario(sc, workers))
        except (NumericalFailure, ParameterDomainError) as exc:
            empty = np.array([])
            reports.append(
                ValidityReport(sc, empty, {k: empty for k in KINDS}, math.nan, math.nan, math.nan, math.nan,
                               error=f"{type(exc).__name__}: {exc}")
            )
    return reports


CSV_FIELDS = (
    "model", "params", "n", "target", "alpha", "assertion", "replications", "mc_draws", "seed",
    "coverage", "se", "ks", "ks_pvalue", "error",
)


def reports_to_csv(reports, fh=None) -> str:
    """Write one CSV row per report; returns the text when ``fh`` is None."""
    buf = fh or io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\r\n")
    writer.writeheader()
    for rep in reports:
        writer.writerow(rep.row())
    return buf.getvalue() if fh is None else ""


def lognormal_grid(full=False, replications=1000, mc_draws=DEFAULT_MC_DRAWS, alpha=0.10,
                   assertion="right_sided", seed=0):
    """Log-normal coverage cells: a 16-cell desk grid, or the 270-cell long-run grid."""
    if full:
        mus, sig2s, ns, ms = (2, 3, 10), (0.0625, 0.2, 0.5, 1, 2, 10), (5, 10, 20, 30, 100), (1, 5, 10)
    else:
        mus, sig2s, ns, ms = (2, 3), (0.5, 10), (10, 30), (1, 5)
    return [
        SimScenario("lognormal", {"mu": mu, "sigma2": s2}, n,
                    PredictionTarget("mean_of_m", m=m) if m > 1 else PredictionTarget(),
                    alpha, assertion, replications, mc_draws, seed)
        for mu in mus for s2 in sig2s for n in ns for m in ms
    ]


def gamma_grid(full=False, replications=1000, mc_draws=DEFAULT_MC_DRAWS, alpha=0.10,
               assertion="left_sided", seed=0):
    """Gamma coverage cells (scale fixed at 1): 8-cell desk grid or 24-cell long-run grid."""
    if full:
        ns, shapes, ms = (10, 25, 125), (0.5, 1, 5, 10), (1, 5)
    else:
        ns, shapes, ms = (10, 25), (0.5, 5), (1, 5)
    return [
        SimScenario("gamma", {"shape": a, "scale": 1.0}, n,
                    PredictionTarget("max_of_m", m=m) if m > 1 else PredictionTarget(),
                    alpha, assertion, replications, mc_draws, seed)
        for n in ns for a in shapes for m in ms
    ]


def binomial_grid(thetas=(0.1, 0.3, 0.5, 0.7, 0.9), n=100, m=100, replications=500,
                  mc_draws=DEFAULT_MC_DRAWS, alpha=0.05, seed=0):
    """Upper prediction limits for a future count under the modified association."""
    return [
        SimScenario("binomial", {"theta": th}, n, PredictionTarget("binomial_count_of_m", m=m),
                    alpha, "right_sided", replications, mc_draws, seed)
        for th in thetas
    ]
