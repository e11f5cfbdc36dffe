"""Solving the gamma conditional association for the shape and scale.

With ``T1 = sum(y)`` and ``T2 = mean(log y) - log(mean(y))`` the association is

    T1 = theta2 * Gamma^{-1}_{n theta1}(U1),    T2 = F^{-1}_{theta1}(U2),

where ``F_x`` is the law of ``T2`` for an iid Gamma(x, 1) sample of size n.
``F_x(t2)`` is strictly decreasing in ``x`` and sweeps (0, 1), so the shape
equation has exactly one root, found by geometric bisection.  ``F_x`` has no
closed form; it is evaluated either by Monte Carlo (slow, used as the
reference) or by a two-moment approximation.

Two moment sets are available.  ``"asymptotic"`` uses the large-sample
mean ``psi(x) - log(x)`` and variance ``(psi'(x) - 1/x) / n``.  ``"exact"``
uses the finite-n moments: since ``y_i / sum(y)`` is Dirichlet(x, ..., x),

    E[T2]   = psi(x) - psi(n x) + log(n)
    Var[T2] = psi'(x) / n - psi'(n x).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .dists import trigamma_unchecked
from .errors import NumericalFailure, ParameterDomainError, SolverConvergenceError
from .streams import UniformStream, derive_stream_id

METHODS = ("gamma_matched_approx", "normal_approx", "mc_bisection")

# beyond this the polygamma differences cancel catastrophically; use series
_SERIES_SWITCH = 1e4


@dataclass(frozen=True)
class GammaSolveConfig:
    method: str = "gamma_matched_approx"
    bracket: tuple[float, float] | None = None
    rel_tol: float = 1e-8
    max_iter: int = 200
    max_expansions: int = 100
    mc_draws: int = 1_000_000
    mc_seed: int = 0
    moments: str = "exact"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ParameterDomainError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.moments not in ("exact", "asymptotic"):
            raise ParameterDomainError(f"moments must be 'exact' or 'asymptotic', got {self.moments!r}")
        if self.bracket is not None:
            lo, hi = self.bracket
            if not 0 < lo < hi:
                raise ParameterDomainError(f"bracket must satisfy 0 < lo < hi, got {self.bracket}")
        if not self.rel_tol > 0:
            raise ParameterDomainError("rel_tol must be positive")
        if self.mc_draws < 1:
            raise ParameterDomainError("mc_draws must be >= 1")


@dataclass(frozen=True)
class GammaSolution:
    theta1: float
    theta2: float
    iterations: int
    method_used: str


def t2_moments(x, n, moments="exact"):
    """Mean and variance of ``T2`` for an iid Gamma(x, 1) sample of size ``n``."""
    x = np.asarray(x, dtype=float)
    big = x > _SERIES_SWITCH
    xs = np.where(big, 1.0, x)
    xb = np.where(big, x, _SERIES_SWITCH)
    with np.errstate(over="ignore", invalid="ignore"):
        if moments == "exact":
            mean = special.digamma(xs) - special.digamma(n * xs) + np.log(n)
            var = trigamma_unchecked(xs) / n - trigamma_unchecked(n * xs)
            mean_big = -(1 - 1 / n) / (2 * xb) - (1 - 1 / n**2) / (12 * xb**2)
            var_big = (1 / n - 1 / n**2) / (2 * xb**2) + (1 / n - 1 / n**3) / (6 * xb**3)
        else:
            mean = special.digamma(xs) - np.log(xs)
            var = (trigamma_unchecked(xs) - 1 / xs) / n
            mean_big = -1 / (2 * xb) - 1 / (12 * xb**2)
            var_big = (1 / (2 * xb**2) + 1 / (6 * xb**3)) / n
    return np.where(big, mean_big, mean), np.where(big, var_big, var)


def approx_cdf_T2(x, t2, n, matched=True, moments="exact"):
    """Two-moment approximation to ``P(T2 <= t2)`` under shape ``x``.

    ``matched=False`` uses a normal law; ``matched=True`` puts a two-parameter
    gamma on ``-T2`` (which is positive) with the same mean and variance.
    """
    x = np.asarray(x, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    if np.any(~(x > 0)):
        raise ParameterDomainError("x must be positive")
    if np.any(~(t2 < 0)):
        raise ParameterDomainError("t2 must be negative")
    if n < 2:
        raise ParameterDomainError("n must be >= 2")
    mean, var = t2_moments(x, n, moments)
    if np.any(~(var > 0)) or np.any(~np.isfinite(mean)):
        raise NumericalFailure("moment evaluation underflowed", x=x, t2=t2, n=n)
    if matched:
        neg_mean = -mean
        shape = neg_mean**2 / var
        scale = var / neg_mean
        out = special.gammaincc(shape, -t2 / scale)
    else:
        out = special.ndtr((t2 - mean) / np.sqrt(var))
    return out.item() if out.ndim == 0 else out


def mle_anchor(t2, tol=1e-12, max_iter=100):
    """Root of ``psi(x) - log(x) = t2``: the maximum likelihood shape estimate.

    Newton's method on a strictly increasing map, started from Minka's
    closed-form approximation.
    """
    t2 = np.asarray(t2, dtype=float)
    if np.any(~(t2 < 0)):
        raise ParameterDomainError("t2 must be negative")
    s = -t2
    x = (3.0 - s + np.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
    for _ in range(max_iter):
        mean, var = t2_moments(x, 1, "asymptotic")
        step = (mean - t2) / var
        x_new = x - step
        x_new = np.where(x_new > 0, x_new, x / 2.0)
        done = np.all(np.abs(x_new - x) <= tol * x)
        x = x_new
        if done:
            break
    return x.item() if x.ndim == 0 else x


class _MonteCarloT2:
    """``P(T2 <= t2)`` by simulation, with common random numbers across ``x``."""

    chunk = 50_000

    def __init__(self, n, draws, seed):
        self.n, self.draws, self.seed = n, draws, seed

    def __call__(self, x, t2):
        stream = UniformStream(self.seed, derive_stream_id("t2-monte-carlo", self.n))
        hits = 0
        left = self.draws
        while left > 0:
            rows = min(self.chunk, left)
            y = stream.gamma(float(x), size=(rows, self.n))
            stat = np.log(y).mean(axis=1) - np.log(y.mean(axis=1))
            hits += int(np.count_nonzero(stat <= t2))
            left -= rows
        return hits / self.draws


def _evaluator(t2, n, cfg):
    if cfg.method == "mc_bisection":
        mc = _MonteCarloT2(n, cfg.mc_draws, cfg.mc_seed)
        return lambda x: np.array([mc(xi, ti) for xi, ti in zip(np.ravel(x), np.ravel(np.broadcast_to(t2, np.shape(x))))]).reshape(np.shape(x))
    matched = cfg.method == "gamma_matched_approx"
    return lambda x: approx_cdf_T2(x, t2, n, matched=matched, moments=cfg.moments)


def _expand(F, lo, hi, u_hi, u_lo, cfg, t2, n):
    """Widen ``[lo, hi]`` by factors of 2 until ``F(lo) > u_hi`` and ``F(hi) <= u_lo``."""
    for side, factor, u in ((lo, 0.5, u_hi), (hi, 2.0, u_lo)):
        ok = (lambda f: f > u) if factor < 1 else (lambda f: f <= u)
        good = ok(F(side))
        expansions = 0
        while not np.all(good):
            if expansions >= cfg.max_expansions:
                bad = ~good
                raise SolverConvergenceError(
                    "bracket expansion cap reached",
                    t2=np.broadcast_to(t2, good.shape)[bad], u2=np.broadcast_to(u, good.shape)[bad],
                    n=n, method=cfg.method, bracket_end=side[bad],
                )
            side[~good] *= factor
            good = ok(F(side))
            expansions += 1
    return lo, hi


def _bisect(F, lo, hi, u2, cfg, t2, n):
    iterations = 0
    while np.any(hi / lo - 1.0 > cfg.rel_tol):
        if iterations >= cfg.max_iter:
            bad = hi / lo - 1.0 > cfg.rel_tol
            raise SolverConvergenceError(
                "bisection did not reach rel_tol",
                t2=np.broadcast_to(t2, bad.shape)[bad], u2=u2[bad], n=n, method=cfg.method,
            )
        mid = np.sqrt(lo * hi)
        above = F(mid) > u2
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
        iterations += 1
    return np.sqrt(lo * hi), iterations


# many roots sharing one t2: tabulate F once to give each root a narrow starting bracket
_TABLE_MIN_SIZE = 64
_TABLE_NODES = 256


def solve_theta1(t2, u2, n, cfg: GammaSolveConfig | None = None, return_iterations=False):
    """Shape solving ``F_x(t2) = u2``; vectorized over ``t2`` and ``u2``.

    The bracket starts at the MLE anchor (or ``cfg.bracket``) and is widened
    by factors of 2 until the residual changes sign, then bisected in
    log-space to relative width ``cfg.rel_tol``.  When many ``u2`` share a
    scalar ``t2`` the widened bracket is first cut at log-spaced nodes so
    each root starts from the cell that contains it.
    """
    cfg = cfg or GammaSolveConfig()
    scalar_t2 = np.ndim(t2) == 0
    t2 = np.asarray(t2, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    if np.any(~(t2 < 0)):
        raise ParameterDomainError("t2 must be negative")
    if np.any(~((u2 > 0) & (u2 < 1))):
        raise ParameterDomainError("u2 must lie in (0, 1)")
    if n < 2:
        raise ParameterDomainError("n must be >= 2")

    if scalar_t2 and u2.size >= _TABLE_MIN_SIZE and cfg.method != "mc_bisection":
        F = _evaluator(t2, n, cfg)
        start = cfg.bracket or (mle_anchor(t2),) * 2
        lo, hi = _expand(F, np.array([start[0]]), np.array([start[1]]), u2.max(), u2.min(), cfg, t2, n)
        nodes = np.geomspace(lo[0], hi[0], _TABLE_NODES)
        f_nodes = F(nodes)[::-1]  # ascending
        i = _TABLE_NODES - np.searchsorted(f_nodes, u2, side="right")
        i = np.clip(i, 1, _TABLE_NODES - 1)
        root, iterations = _bisect(F, nodes[i - 1], nodes[i], u2, cfg, t2, n)
    else:
        t2, u2 = np.broadcast_arrays(t2, u2)
        F = _evaluator(t2, n, cfg)
        if cfg.bracket is None:
            lo = np.array(mle_anchor(t2), dtype=float, ndmin=1).reshape(t2.shape)
            hi = lo.copy()
        else:
            lo = np.full(t2.shape, float(cfg.bracket[0]))
            hi = np.full(t2.shape, float(cfg.bracket[1]))
        lo, hi = _expand(F, lo, hi, u2, u2, cfg, t2, n)
        root, iterations = _bisect(F, lo, hi, u2, cfg, t2, n)
    root = root.item() if root.ndim == 0 else root
    return (root, iterations) if return_iterations else root


def solve_theta2(t1, theta1, u1, n):
    """Scale from ``T1 = theta2 * Gamma^{-1}_{n theta1}(u1)``."""
    t1 = np.asarray(t1, dtype=float)
    theta1 = np.asarray(theta1, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    if np.any(~(t1 > 0)) or np.any(~(theta1 > 0)):
        raise ParameterDomainError("t1 and theta1 must be positive")
    if np.any(~((u1 > 0) & (u1 < 1))):
        raise ParameterDomainError("u1 must lie in (0, 1)")
    q = special.gammaincinv(n * theta1, u1)
    if np.any(~(q > 0)) or np.any(~np.isfinite(q)):
        bad = ~((q > 0) & np.isfinite(q))
        raise NumericalFailure(
            "gamma quantile underflow", theta1=np.broadcast_to(theta1, q.shape)[bad],
            u1=np.broadcast_to(u1, q.shape)[bad], n=n,
        )
    out = t1 / q
    return out.item() if out.ndim == 0 else out


def solve(t1, t2, u1, u2, n, cfg: GammaSolveConfig | None = None) -> GammaSolution:
    """Full ``(theta1, theta2)`` solution for one auxiliary pair."""
    cfg = cfg or GammaSolveConfig()
    theta1, iterations = solve_theta1(t2, u2, n, cfg, return_iterations=True)
    theta2 = solve_theta2(t1, theta1, u1, n)
    return GammaSolution(float(theta1), float(theta2), iterations, cfg.method)
