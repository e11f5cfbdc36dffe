"""Marginal associations for a future observable.

Each sampler eliminates the unknown parameter by pushing fresh auxiliary
draws through the solved-for parameter ``theta(Y, V)`` and then through the
future-value association.  The distribution of its output, at fixed data,
is the predictive distribution ``G_Y``.  Samplers are vectorized: ``draw``
consumes a :class:`UniformStream` and returns ``size`` iid realizations.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import dists
from .engine import PredictionRegion
from .errors import ParameterDomainError
from .gamma_solver import GammaSolveConfig, solve_theta1, solve_theta2
from .randsets import AssertionKind
from .streams import UniformStream

MODELS = ("normal", "lognormal", "gamma", "binomial", "poisson_process")


@dataclass(frozen=True)
class SampleData:
    """Observed data: a univariate sample, a binomial count, or an arrival time."""

    model: str
    values: tuple[float, ...] | None = None
    count: int | None = None
    trials: int | None = None
    t_n: float | None = None
    arrivals: int | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ParameterDomainError(f"unknown model {self.model!r}")
        if self.model in ("normal", "lognormal", "gamma"):
            if self.values is None or len(self.values) < 2:
                raise ParameterDomainError("continuous models need at least 2 observations")
            if not all(math.isfinite(v) for v in self.values):
                raise ParameterDomainError("observations must be finite")
            if self.model != "normal" and min(self.values) <= 0:
                raise ParameterDomainError(f"{self.model} observations must be strictly positive")
        elif self.model == "binomial":
            if self.count is None or self.trials is None:
                raise ParameterDomainError("binomial data needs count and trials")
            if self.trials < 1 or not 0 <= self.count <= self.trials:
                raise ParameterDomainError(f"need 0 <= y <= n and n >= 1, got {self.count}/{self.trials}")
        else:
            if self.t_n is None or self.arrivals is None:
                raise ParameterDomainError("arrival data needs t_n and the arrival count n")
            if not self.t_n > 0 or self.arrivals < 1:
                raise ParameterDomainError("need t_n > 0 and n >= 1")

    @classmethod
    def sample(cls, values, model="normal"):
        return cls(model=model, values=tuple(float(v) for v in values))

    @classmethod
    def binomial(cls, y, n):
        return cls(model="binomial", count=int(y), trials=int(n))

    @classmethod
    def arrival(cls, t_n, n):
        return cls(model="poisson_process", t_n=float(t_n), arrivals=int(n))


@dataclass(frozen=True)
class LocationScaleStats:
    """Sample size, mean and standard deviation (on the log scale if ``log_scale``)."""

    n: int
    mean: float
    sd: float
    log_scale: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ParameterDomainError("n must be >= 2")
        if not self.sd > 0:
            raise ParameterDomainError("degenerate sample: standard deviation must be > 0")


@dataclass(frozen=True)
class GammaStats:
    """``T1 = sum(y)`` and ``T2 = mean(log y) - log(mean y)`` (strictly negative)."""

    n: int
    t1: float
    t2: float

    def __post_init__(self):
        if self.n < 2:
            raise ParameterDomainError("n must be >= 2")
        if not self.t1 > 0:
            raise ParameterDomainError("T1 must be positive")
        if not self.t2 < 0:
            raise ParameterDomainError("degenerate sample: T2 must be < 0 (all values equal?)")


SufficientStats = LocationScaleStats | GammaStats


def normal_stats(values) -> LocationScaleStats:
    x = np.asarray(values, dtype=float)
    return LocationScaleStats(x.size, float(x.mean()), float(x.std(ddof=1)) if x.size > 1 else 0.0)


def lognormal_stats(values) -> LocationScaleStats:
    x = np.asarray(values, dtype=float)
    if np.any(x <= 0):
        raise ParameterDomainError("log-normal observations must be strictly positive")
    s = normal_stats(np.log(x))
    return LocationScaleStats(s.n, s.mean, s.sd, log_scale=True)


def gamma_stats(values) -> GammaStats:
    x = np.asarray(values, dtype=float)
    if np.any(x <= 0):
        raise ParameterDomainError("gamma observations must be strictly positive")
    t1 = float(x.sum())
    t2 = float(np.log(x).mean() - np.log(t1 / x.size))
    # AM-GM gives t2 <= 0; equality only for a constant sample
    return GammaStats(x.size, t1, min(t2, 0.0))


@dataclass(frozen=True)
class PredictionTarget:
    """What is being predicted.

    ``m`` is the number of future observations (or future trials for
    ``binomial_count_of_m``); ``k`` is the order-statistic rank for
    ``kth_largest_of_m`` or the arrival offset for ``arrival_n_plus_k``.
    """

    kind: str = "next_observation"
    m: int = 1
    k: int = 1

    KINDS = (
        "next_observation",
        "kth_largest_of_m",
        "mean_of_m",
        "max_of_m",
        "arrival_n_plus_k",
        "binomial_count_of_m",
    )

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ParameterDomainError(f"unknown target {self.kind!r}")
        if self.m < 1 or self.k < 1:
            raise ParameterDomainError("m and k must be >= 1")
        if self.kind == "kth_largest_of_m" and self.k > self.m:
            raise ParameterDomainError(f"need 1 <= k <= m, got k={self.k}, m={self.m}")

    @classmethod
    def parse(cls, text: str) -> "PredictionTarget":
        """Parse ``next``, ``mean-of-m:5``, ``max-of-m:5``, ``kth-largest:40:36``,
        ``arrival:3`` or ``count-of-m:12694``."""
        t = text.strip().lower().replace("_", "-")
        if t in ("next", "next-observation"):
            return cls()
        if m := re.fullmatch(r"(mean|max)-of-m:(\d+)", t):
            return cls(f"{m.group(1)}_of_m", m=int(m.group(2)))
        if m := re.fullmatch(r"kth-(?:largest|of-m):(\d+):(\d+)", t):
            return cls("kth_largest_of_m", m=int(m.group(1)), k=int(m.group(2)))
        if m := re.fullmatch(r"arrival(?:-n-plus-k)?:(\d+)", t):
            return cls("arrival_n_plus_k", k=int(m.group(1)))
        if m := re.fullmatch(r"(?:binomial-)?count-of-m:(\d+)", t):
            return cls("binomial_count_of_m", m=int(m.group(1)))
        raise ParameterDomainError(f"cannot parse prediction target {text!r}")

    def label(self) -> str:
        if self.kind == "next_observation":
            return "next"
        if self.kind == "kth_largest_of_m":
            return f"kth-largest:{self.m}:{self.k}"
        if self.kind == "arrival_n_plus_k":
            return f"arrival:{self.k}"
        if self.kind == "binomial_count_of_m":
            return f"count-of-m:{self.m}"
        return f"{self.kind.replace('_', '-')}:{self.m}"


class MarginalSampler:
    """Base class: draws from the predictive distribution at fixed data."""

    model = ""
    discrete = False
    paired = False

    def __init__(self, stats, target: PredictionTarget):
        self.stats = stats
        self.target = target

    def draw(self, stream: UniformStream, size: int):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(stats={self.stats!r}, target={self.target.label()!r})"


class NormalOrderStatSampler(MarginalSampler):
    """k-th largest of m future normal observations (m = k = 1: the next one).

    ``mean - sd * U1 / (sqrt(n) U2) + sd * Ut / U2`` with ``U1 ~ N(0,1)``,
    ``(n-1) U2^2 ~ chi2(n-1)`` and ``Ut`` the k-th largest of m standard
    normals, drawn as ``Phi^{-1}(B)`` with ``B ~ Beta(m-k+1, k)``.
    """

    model = "normal"

    def draw(self, stream, size):
        s, m, k = self.stats, self.target.m, self.target.k
        u1 = stream.normal(size)
        u2 = np.sqrt(stream.chisquare(s.n - 1, size) / (s.n - 1))
        w = stream.uniform(size)
        if m == 1:
            ut = special.ndtri(w)
        else:
            ut = special.ndtri(special.betaincinv(m - k + 1, k, w))
        mu = s.mean - s.sd / math.sqrt(s.n) * u1 / u2
        return mu + s.sd / u2 * ut


class LognormalMeanSampler(MarginalSampler):
    """Arithmetic mean of m future log-normal observations."""

    model = "lognormal"

    def draw(self, stream, size):
        s, m = self.stats, self.target.m
        u1 = stream.normal(size)
        u2 = np.sqrt(stream.chisquare(s.n - 1, size) / (s.n - 1))
        ut = stream.normal((size, m))
        mu = s.mean - s.sd / math.sqrt(s.n) * u1 / u2
        sigma = s.sd / u2
        return np.exp(mu[:, None] + sigma[:, None] * ut).mean(axis=1)


class GammaSampler(MarginalSampler):
    """Next observation, or maximum of m, under a gamma model.

    Each draw solves for ``(theta1, theta2)`` from its own ``(U1, U2)`` and
    returns ``theta2 * Gamma^{-1}_{theta1}(Ut)``, where ``Ut`` is uniform or
    the maximum of m uniforms (``V^{1/m}``).
    """

    model = "gamma"

    def __init__(self, stats, target, solver: GammaSolveConfig | None = None):
        super().__init__(stats, target)
        self.solver = solver or GammaSolveConfig()

    def draw(self, stream, size):
        s = self.stats
        u1 = stream.uniform(size)
        u2 = stream.uniform(size)
        ut = stream.uniform(size)
        if self.target.kind == "max_of_m" and self.target.m > 1:
            ut = ut ** (1.0 / self.target.m)
        theta1 = solve_theta1(s.t2, u2, s.n, self.solver)
        theta2 = solve_theta2(s.t1, theta1, u1, s.n)
        return theta2 * special.gammaincinv(theta1, ut)


def _beta_endpoints(y, n, u):
    """theta-interval ``[G^{-1}_{y, n-y+1}(u), G^{-1}_{y+1, n-y}(u))``; point masses at the edges."""
    lo = special.betaincinv(y, n - y + 1, u) if y > 0 else np.zeros_like(u)
    hi = special.betaincinv(y + 1, n - y, u) if y < n else np.ones_like(u)
    return lo, hi


@dataclass(frozen=True)
class BinomialStats:
    y: int
    n: int


class BinomialEndpointSampler(MarginalSampler):
    """Lower and upper endpoints of the interval association for a future count.

    Both endpoints share the same ``1 - Ut``.  ``draw`` returns ``(lower, upper)``.
    """

    model = "binomial"
    discrete = True
    paired = True

    def draw(self, stream, size):
        s, m = self.stats, self.target.m
        u = stream.uniform(size)
        ut = stream.uniform(size)
        theta1, theta2 = _beta_endpoints(s.y, s.n, u)
        p = 1.0 - ut
        return dists.binomial_quantile(m, theta1, p), dists.binomial_quantile(m, theta2, p)


class BinomialModifiedSampler(MarginalSampler):
    """Future count with theta drawn uniformly inside the interval association."""

    model = "binomial"
    discrete = True

    def draw(self, stream, size):
        s, m = self.stats, self.target.m
        u = stream.uniform(size)
        ut = stream.uniform(size)
        v = stream.uniform(size)
        theta1, theta2 = _beta_endpoints(s.y, s.n, u)
        theta = theta1 + (theta2 - theta1) * v
        return dists.binomial_quantile(m, theta, 1.0 - ut)


@dataclass(frozen=True)
class ArrivalStats:
    t_n: float
    n: int


class PoissonArrivalSampler(MarginalSampler):
    """Time of arrival n + k given the n-th arrival time: ``t_n (1 + G_k^{-1}(Ut) / G_n^{-1}(U))``."""

    model = "poisson_process"

    def draw(self, stream, size):
        s, k = self.stats, self.target.k
        return s.t_n * (1.0 + stream.gamma(float(k), size) / stream.gamma(float(s.n), size))


def normal_next_interval(stats: LocationScaleStats, alpha: float) -> PredictionRegion:
    """Closed-form two-sided interval ``mean +/- t_{n-1,1-alpha/2} sd sqrt(1 + 1/n)``."""
    if not 0 < alpha < 1:
        raise ParameterDomainError("alpha must lie in (0, 1)")
    half = dists.quantile(dists.student_t(stats.n - 1), 1 - alpha / 2) * stats.sd * math.sqrt(1 + 1 / stats.n)
    return PredictionRegion(alpha, AssertionKind.singleton, stats.mean - half, stats.mean + half)


def normal_kth_of_m_sampler(stats: LocationScaleStats, m: int = 1, k: int = 1) -> NormalOrderStatSampler:
    target = PredictionTarget("next_observation") if m == k == 1 else PredictionTarget("kth_largest_of_m", m=m, k=k)
    return NormalOrderStatSampler(stats, target)


def lognormal_mean_of_m_sampler(stats: LocationScaleStats, m: int = 1) -> LognormalMeanSampler:
    if not stats.log_scale:
        raise ParameterDomainError("log-normal sampler needs statistics computed on the log scale")
    target = PredictionTarget("next_observation") if m == 1 else PredictionTarget("mean_of_m", m=m)
    return LognormalMeanSampler(stats, target)


def gamma_sampler(stats: GammaStats, target: PredictionTarget, solver: GammaSolveConfig | None = None) -> GammaSampler:
    if target.kind not in ("next_observation", "max_of_m"):
        raise ParameterDomainError(f"gamma model supports next/max-of-m targets, not {target.kind}")
    return GammaSampler(stats, target, solver)


def _check_binomial(y, n, m):
    if n < 1 or not 0 <= y <= n:
        raise ParameterDomainError(f"need 0 <= y <= n and n >= 1, got {y}/{n}")
    if m < 1:
        raise ParameterDomainError("m must be >= 1")


def binomial_endpoint_sampler(y: int, n: int, m: int) -> BinomialEndpointSampler:
    _check_binomial(y, n, m)
    return BinomialEndpointSampler(BinomialStats(y, n), PredictionTarget("binomial_count_of_m", m=m))


def binomial_modified_sampler(y: int, n: int, m: int) -> BinomialModifiedSampler:
    _check_binomial(y, n, m)
    return BinomialModifiedSampler(BinomialStats(y, n), PredictionTarget("binomial_count_of_m", m=m))


def poisson_arrival_sampler(t_n: float, n: int, k: int) -> PoissonArrivalSampler:
    if not t_n > 0 or n < 1 or k < 1:
        raise ParameterDomainError("need t_n > 0, n >= 1, k >= 1")
    return PoissonArrivalSampler(ArrivalStats(t_n, n), PredictionTarget("arrival_n_plus_k", k=k))


def poisson_arrival_quantile(n: int, k: int, w: float, t_n: float) -> float:
    """Quantile of the predicted arrival time ``T_{n+k}`` given ``T_n = t_n``.

    ``T_{n+k} = t_n (1 + R)`` with ``R`` the ratio of independent Gamma(k) and
    Gamma(n) variables, so ``R / (1 + R) ~ Beta(k, n)``.  For ``k = 1`` this is
    ``t_n (1 - w)^{-1/n}``.
    """
    if n < 1 or k < 1:
        raise ParameterDomainError("need n >= 1 and k >= 1")
    if not 0 < w < 1:
        raise ParameterDomainError("w must lie in (0, 1)")
    if not t_n > 0:
        raise ParameterDomainError("t_n must be positive")
    if k == 1:
        r = math.expm1(-math.log1p(-w) / n)
    else:
        b = float(special.betaincinv(k, n, w))
        r = b / (1.0 - b)
    return t_n * (1.0 + r)


def poisson_arrival_cdf(n: int, k: int, y, t_n: float):
    """Predictive CDF of ``T_{n+k}``; the inverse of :func:`poisson_arrival_quantile`."""
    y = np.asarray(y, dtype=float)
    r = np.maximum(y / t_n - 1.0, 0.0)
    out = special.betainc(k, n, r / (1.0 + r))
    return out.item() if out.ndim == 0 else out


TARGETS_BY_MODEL = {
    "normal": ("next_observation", "kth_largest_of_m"),
    "lognormal": ("next_observation", "mean_of_m"),
    "gamma": ("next_observation", "max_of_m"),
    "binomial": ("binomial_count_of_m",),
    "poisson_process": ("arrival_n_plus_k",),
}


def make_sampler(data: SampleData, target: PredictionTarget, *, binomial_method="modified", solver=None):
    """Build the sampler for ``data`` and ``target``; rejects incompatible pairs."""
    if target.kind not in TARGETS_BY_MODEL[data.model]:
        raise ParameterDomainError(
            f"target {target.kind} is not available for model {data.model}; "
            f"choose from {TARGETS_BY_MODEL[data.model]}"
        )
    if data.model == "normal":
        m, k = (target.m, target.k) if target.kind == "kth_largest_of_m" else (1, 1)
        return normal_kth_of_m_sampler(normal_stats(data.values), m, k)
    if data.model == "lognormal":
        return lognormal_mean_of_m_sampler(lognormal_stats(data.values), target.m if target.kind == "mean_of_m" else 1)
    if data.model == "gamma":
        return gamma_sampler(gamma_stats(data.values), target, solver)
    if data.model == "binomial":
        if binomial_method == "endpoints":
            return binomial_endpoint_sampler(data.count, data.trials, target.m)
        if binomial_method != "modified":
            raise ParameterDomainError(f"unknown binomial method {binomial_method!r}")
        return binomial_modified_sampler(data.count, data.trials, target.m)
    return poisson_arrival_sampler(data.t_n, data.arrivals, target.k)
