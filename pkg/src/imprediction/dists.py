"""Distribution primitives: CDFs, quantiles and the special functions behind them.

The regularized incomplete gamma and beta functions, their inverses, and the
polygamma functions come from :mod:`scipy.special`.  Everything here accepts
numpy arrays and broadcasts over parameters, which the samplers rely on when
each Monte Carlo draw carries its own shape parameter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .errors import ParameterDomainError

FAMILIES = ("std_normal", "student_t", "chi", "gamma", "beta", "binomial", "lognormal")

_PARAMS = {
    "std_normal": (),
    "student_t": ("df",),
    "chi": ("df",),
    "gamma": ("shape", "scale"),
    "beta": ("a", "b"),
    "binomial": ("n", "theta"),
    "lognormal": ("mu", "sigma"),
}


@dataclass(frozen=True)
class DistSpec:
    """A distribution family plus its parameters.

    Parameters may be scalars or arrays (broadcast elementwise).
    """

    family: str
    params: dict

    def __post_init__(self):
        if self.family not in _PARAMS:
            raise ParameterDomainError(f"unknown family {self.family!r}")
        missing = set(_PARAMS[self.family]) - set(self.params)
        if missing:
            raise ParameterDomainError(f"{self.family} requires {sorted(missing)}")
        p = self.params
        positive = {"df", "shape", "scale", "a", "b", "sigma"}
        for name in _PARAMS[self.family]:
            value = np.asarray(p[name], dtype=float)
            if np.any(np.isnan(value)):
                raise ParameterDomainError(f"{name} is NaN")
            if name in positive and np.any(value <= 0):
                raise ParameterDomainError(f"{name} must be > 0, got {p[name]}")
        if self.family == "binomial":
            n = np.asarray(p["n"])
            theta = np.asarray(p["theta"], dtype=float)
            if np.any(n < 1) or np.any(np.floor(n) != n):
                raise ParameterDomainError(f"n must be an integer >= 1, got {p['n']}")
            if np.any((theta < 0) | (theta > 1)):
                raise ParameterDomainError(f"theta must lie in [0, 1], got {p['theta']}")

    def __getitem__(self, name):
        return self.params[name]


def std_normal():
    return DistSpec("std_normal", {})


def student_t(df):
    return DistSpec("student_t", {"df": df})


def chi(df):
    return DistSpec("chi", {"df": df})


def gamma(shape, scale=1.0):
    return DistSpec("gamma", {"shape": shape, "scale": scale})


def beta(a, b):
    return DistSpec("beta", {"a": a, "b": b})


def binomial(n, theta):
    return DistSpec("binomial", {"n": n, "theta": theta})


def lognormal(mu, sigma):
    return DistSpec("lognormal", {"mu": mu, "sigma": sigma})


def _scalar_or_array(x):
    x = np.asarray(x, dtype=float)
    return x.item() if x.ndim == 0 else x


def cdf(spec: DistSpec, x):
    """Distribution function of ``spec`` evaluated at ``x``.

    Points outside the support map to 0 or 1; binomial arguments are floored.
    """
    x = np.asarray(x, dtype=float)
    f = spec.family
    with np.errstate(divide="ignore", invalid="ignore"):
        if f == "std_normal":
            out = special.ndtr(x)
        elif f == "student_t":
            out = special.stdtr(spec["df"], x)
        elif f == "chi":
            out = np.where(x > 0, special.gammainc(np.divide(spec["df"], 2.0), 0.5 * np.square(np.maximum(x, 0))), 0.0)
        elif f == "gamma":
            out = np.where(x > 0, special.gammainc(spec["shape"], np.maximum(x, 0) / spec["scale"]), 0.0)
        elif f == "beta":
            out = special.betainc(spec["a"], spec["b"], np.clip(x, 0.0, 1.0))
        elif f == "lognormal":
            z = (np.log(np.where(x > 0, x, 1.0)) - spec["mu"]) / spec["sigma"]
            out = np.where(x > 0, special.ndtr(z), 0.0)
        elif f == "binomial":
            n = np.asarray(spec["n"]).astype(np.int64)
            k = np.floor(x)
            inside = special.bdtr(np.clip(k, 0, n), n, spec["theta"])
            out = np.where(k < 0, 0.0, np.where(k >= n, 1.0, inside))
    return _scalar_or_array(out)


def quantile(spec: DistSpec, p):
    """Inverse distribution function.

    Continuous families use the exact inverse; the binomial returns the
    generalized inverse ``min{y : F(y) >= p}``.
    """
    p = np.asarray(p, dtype=float)
    if np.any(~((p > 0) & (p < 1))):
        raise ParameterDomainError("quantile requires 0 < p < 1")
    f = spec.family
    if f == "std_normal":
        out = special.ndtri(p)
    elif f == "student_t":
        out = special.stdtrit(spec["df"], p)
    elif f == "chi":
        out = np.sqrt(2.0 * special.gammaincinv(np.divide(spec["df"], 2.0), p))
    elif f == "gamma":
        out = special.gammaincinv(spec["shape"], p) * spec["scale"]
    elif f == "beta":
        out = special.betaincinv(spec["a"], spec["b"], p)
    elif f == "lognormal":
        out = np.exp(spec["mu"] + spec["sigma"] * special.ndtri(p))
    elif f == "binomial":
        out = binomial_quantile(spec["n"], spec["theta"], p)
    return _scalar_or_array(out)


def binomial_quantile(n, theta, p):
    """Smallest integer ``y`` with ``Bin(n, theta)`` CDF at ``y`` >= ``p``.

    ``theta`` may be 0 or 1 (point masses at 0 and n).  Vectorized.
    """
    n, theta, p = np.broadcast_arrays(np.asarray(n), np.asarray(theta, dtype=float), np.asarray(p, dtype=float))
    n = n.astype(np.int64)
    interior = (theta > 0) & (theta < 1)
    with np.errstate(invalid="ignore"):
        y = np.asarray(stats.binom.ppf(p, n, np.where(interior, theta, 0.5)), dtype=float)
    y = np.where(theta <= 0, 0.0, np.where(theta >= 1, n, y))
    return np.clip(y, 0, n)


def digamma(x):
    """Logarithmic derivative of the gamma function, for ``x > 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ParameterDomainError("digamma requires x > 0")
    return _scalar_or_array(special.digamma(x))


def trigamma(x):
    """Derivative of the digamma function, for ``x > 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ParameterDomainError("trigamma requires x > 0")
    return _scalar_or_array(trigamma_unchecked(x))


# Bernoulli-number coefficients of the trigamma asymptotic series in 1/z^2
_TRIGAMMA_SERIES = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6)


def trigamma_unchecked(x):
    """Trigamma without domain checks (hot path of the gamma solver).

    Shifts the argument above 10 with ``psi'(z) = psi'(z + 1) + 1/z^2`` and
    sums the asymptotic series there; relative error below 1e-15.
    """
    z = np.array(x, dtype=float, copy=True)
    acc = np.zeros_like(z)
    for _ in range(10):
        small = z < 10.0
        if not small.any():
            break
        acc += np.where(small, 1.0 / (z * z), 0.0)
        z += small
    r = 1.0 / z
    r2 = r * r
    tail = 0.0
    for c in reversed(_TRIGAMMA_SERIES[1:]):
        tail = r2 * (c + tail)
    return acc + r + r2 * (0.5 + r * (_TRIGAMMA_SERIES[0] + tail))


def _binomial_cdf_by_summation(n: int, theta: float, y: int) -> float:
    if theta == 0.0:
        return 1.0
    if theta == 1.0:
        return 1.0 if y >= n else 0.0
    log_t, log_1t = math.log(theta), math.log1p(-theta)
    terms = [
        math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1) + k * log_t + (n - k) * log_1t
        for k in range(0, y + 1)
    ]
    top = max(terms)
    return min(1.0, math.exp(top) * math.fsum(math.exp(t - top) for t in terms))


def binomial_beta_identity_check(n: int, theta: float, y: int) -> tuple[float, float]:
    """Return ``(F_{n,theta}(y), 1 - G_{y+1,n-y}(theta))``.

    The binomial side is summed term by term; the beta side uses the
    regularized incomplete beta.  For ``y == n`` the beta side is 1 by
    convention (a Beta(n+1, 0) law is a point mass at 1).
    """
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise ParameterDomainError(f"n must be an integer >= 1, got {n}")
    if not 0 <= y <= n:
        raise ParameterDomainError(f"need 0 <= y <= n, got y={y}, n={n}")
    if not 0.0 <= theta <= 1.0:
        raise ParameterDomainError(f"theta must lie in [0, 1], got {theta}")
    direct = _binomial_cdf_by_summation(int(n), float(theta), int(y))
    via_beta = 1.0 if y == n else 1.0 - float(special.betainc(y + 1, n - y, theta))
    return direct, via_beta
