"""Empirical predictive distributions, plausibility curves and prediction regions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure, ParameterDomainError
from .randsets import AssertionKind, plausibility_from_G

DEFAULT_MC_DRAWS = 10_000
DEFAULT_GRID_POINTS = 512
_CHUNK = 250_000


@dataclass(frozen=True)
class PredictionRegion:
    """``{y : pl(y) > alpha}`` as an interval; one-sided regions have an infinite end."""

    alpha: float
    kind: AssertionKind
    lower: float = -math.inf
    upper: float = math.inf

    def __post_init__(self):
        if self.lower > self.upper:
            raise ParameterDomainError(f"empty region: lower {self.lower} > upper {self.upper}")

    def contains(self, y):
        y = np.asarray(y, dtype=float)
        return (y >= self.lower) & (y <= self.upper)

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "kind": self.kind.value,
            "lower": None if math.isinf(self.lower) else float(self.lower),
            "upper": None if math.isinf(self.upper) else float(self.upper),
        }


@dataclass(frozen=True, eq=False)
class EmpiricalG:
    """Sorted Monte Carlo draws from a predictive distribution."""

    draws: np.ndarray
    seed: int | None = None
    stream_id: int | None = None
    discrete: bool = False

    @property
    def n(self) -> int:
        return int(self.draws.size)

    def quantile(self, p):
        """Draw quantile: linear interpolation, or an order statistic for discrete draws."""
        method = "inverted_cdf" if self.discrete else "linear"
        return np.quantile(self.draws, p, method=method)


@dataclass(frozen=True, eq=False)
class PlausibilityCurve:
    assertion: AssertionKind
    grid: np.ndarray
    pl: np.ndarray
    n: int

    def pairs(self):
        return list(zip(self.grid.tolist(), self.pl.tolist()))


def _collect(sampler, N, stream):
    chunks = []
    done = 0
    while done < N:
        size = min(_CHUNK, N - done)
        try:
            chunks.append(sampler.draw(stream, size))
        except NumericalFailure as exc:
            exc.diagnostics.setdefault("draw_range", (done, done + size))
            raise
        done += size
    if sampler.paired:
        return tuple(np.concatenate([c[i] for c in chunks]) for i in (0, 1))
    return np.concatenate(chunks)


def build_empirical_G(sampler, N, stream) -> EmpiricalG:
    """Draw ``N`` realizations of ``sampler`` from ``stream`` and sort them."""
    if N < 1:
        raise ParameterDomainError("N must be >= 1")
    if sampler.paired:
        raise ParameterDomainError("paired samplers need build_endpoint_Gs")
    draws = np.sort(np.asarray(_collect(sampler, N, stream), dtype=float))
    return EmpiricalG(draws, stream.seed, stream.stream_id, sampler.discrete)


def build_endpoint_Gs(sampler, N, stream) -> tuple[EmpiricalG, EmpiricalG]:
    """Lower- and upper-endpoint empirical distributions from a paired sampler."""
    if N < 1:
        raise ParameterDomainError("N must be >= 1")
    if not sampler.paired:
        raise ParameterDomainError("sampler does not produce endpoint pairs")
    lower, upper = _collect(sampler, N, stream)
    return tuple(
        EmpiricalG(np.sort(np.asarray(d, dtype=float)), stream.seed, stream.stream_id, sampler.discrete)
        for d in (lower, upper)
    )


def eval_G(G: EmpiricalG, y):
    """Mid-rank ECDF: ``(#{draws < y} + 0.5 #{draws == y}) / N``."""
    y = np.asarray(y, dtype=float)
    below = np.searchsorted(G.draws, y, side="left")
    upto = np.searchsorted(G.draws, y, side="right")
    out = (below + 0.5 * (upto - below)) / G.n
    return out.item() if out.ndim == 0 else out


def default_grid(G: EmpiricalG, points=DEFAULT_GRID_POINTS):
    lo, hi = float(G.draws[0]), float(G.draws[-1])
    pad = 0.05 * (hi - lo)
    return np.linspace(lo - pad, hi + pad, points)


def curve(G: EmpiricalG, assertion, grid=None) -> PlausibilityCurve:
    assertion = AssertionKind.parse(assertion)
    grid = default_grid(G) if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ParameterDomainError("grid must be non-empty")
    pl = np.asarray(plausibility_from_G(np.atleast_1d(eval_G(G, grid)), assertion))
    return PlausibilityCurve(assertion, grid, pl, G.n)


def curve_from_endpoint_pairs(lower: EmpiricalG, upper: EmpiricalG, assertion, grid=None) -> PlausibilityCurve:
    """Plausibility for an interval-valued association ``[L, U]``.

    Right-sided: ``1 - G_U(y)``; left-sided: ``G_L(y)``; singleton:
    ``min(1, 2 G_L(y), 2 (1 - G_U(y)))``, whose ``alpha`` level set is the
    endpoint-percentile region of :func:`region_from_endpoint_pairs`.
    """
    assertion = AssertionKind.parse(assertion)
    if grid is None:
        lo = float(lower.draws[0])
        hi = float(upper.draws[-1])
        pad = 0.05 * (hi - lo)
        grid = np.linspace(lo - pad, hi + pad, DEFAULT_GRID_POINTS)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ParameterDomainError("grid must be non-empty")
    g_lo = np.atleast_1d(eval_G(lower, grid))
    g_hi = np.atleast_1d(eval_G(upper, grid))
    if assertion is AssertionKind.right_sided:
        pl = 1.0 - g_hi
    elif assertion is AssertionKind.left_sided:
        pl = g_lo
    else:
        pl = np.minimum(1.0, np.minimum(2.0 * g_lo, 2.0 * (1.0 - g_hi)))
    return PlausibilityCurve(assertion, grid, pl, lower.n)


def _check_alpha(alpha, n):
    if not 0 < alpha < 1:
        raise ParameterDomainError("alpha must lie in (0, 1)")
    if n * alpha < 1:
        raise ParameterDomainError(f"N={n} draws too few for alpha={alpha} (need N*alpha >= 1)")


def region(G: EmpiricalG, assertion, alpha) -> PredictionRegion:
    """Prediction region at level ``alpha`` read off the draw quantiles."""
    assertion = AssertionKind.parse(assertion)
    _check_alpha(alpha, G.n)
    if assertion is AssertionKind.right_sided:
        return PredictionRegion(alpha, assertion, upper=float(G.quantile(1 - alpha)))
    if assertion is AssertionKind.left_sided:
        return PredictionRegion(alpha, assertion, lower=float(G.quantile(alpha)))
    lo, hi = G.quantile([alpha / 2, 1 - alpha / 2])
    return PredictionRegion(alpha, assertion, float(lo), float(hi))


def region_from_endpoint_pairs(lower: EmpiricalG, upper: EmpiricalG, alpha, assertion="singleton") -> PredictionRegion:
    """Region from the endpoint draws of an interval association.

    Two-sided: ``alpha/2`` quantile of the lower endpoints and ``1 - alpha/2``
    quantile of the upper endpoints.  One-sided variants use ``alpha`` on the
    relevant endpoint set.
    """
    assertion = AssertionKind.parse(assertion)
    if lower.n != upper.n:
        raise ParameterDomainError("endpoint draw sets must have equal size")
    _check_alpha(alpha, lower.n)
    if assertion is AssertionKind.right_sided:
        return PredictionRegion(alpha, assertion, upper=float(upper.quantile(1 - alpha)))
    if assertion is AssertionKind.left_sided:
        return PredictionRegion(alpha, assertion, lower=float(lower.quantile(alpha)))
    return PredictionRegion(
        alpha, assertion, float(lower.quantile(alpha / 2)), float(upper.quantile(1 - alpha / 2))
    )
