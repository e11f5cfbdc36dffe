"""Predictive random sets for the pivotal uniform and the plausibility maps they induce."""
from __future__ import annotations

from enum import Enum

import numpy as np

from .errors import ParameterDomainError


class AssertionKind(str, Enum):
    """Which hypothesis about the future value is being assessed.

    ``right_sided`` is ``{Y > y}`` and yields an upper bound, ``left_sided``
    is ``{Y <= y}`` and yields a lower bound, ``singleton`` is ``{Y = y}``
    and yields a two-sided interval.
    """

    right_sided = "right_sided"
    left_sided = "left_sided"
    singleton = "singleton"

    @classmethod
    def parse(cls, value) -> "AssertionKind":
        if isinstance(value, cls):
            return value
        aliases = {
            "right": cls.right_sided,
            "upper": cls.right_sided,
            "left": cls.left_sided,
            "lower": cls.left_sided,
            "singleton": cls.singleton,
            "two-sided": cls.singleton,
            "two_sided": cls.singleton,
        }
        key = str(value).strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ParameterDomainError(f"unknown assertion kind {value!r}") from None


class PredictiveRandomSet(str, Enum):
    """Random subsets of [0, 1] with nested support, indexed by ``W ~ Unif(0, 1)``.

    ``lower_interval`` is ``[0, W]``, ``upper_interval`` is ``[W, 1]`` and
    ``default_symmetric`` is ``{w : |w - 0.5| <= |W - 0.5|}``.
    """

    lower_interval = "lower_interval"
    upper_interval = "upper_interval"
    default_symmetric = "default_symmetric"

    def realize(self, w_draw):
        """The set ``S(W)`` as closed interval endpoints ``(lo, hi)``."""
        w_draw = np.asarray(w_draw, dtype=float)
        if self is PredictiveRandomSet.lower_interval:
            return np.zeros_like(w_draw), w_draw
        if self is PredictiveRandomSet.upper_interval:
            return w_draw, np.ones_like(w_draw)
        half = np.abs(w_draw - 0.5)
        return 0.5 - half, 0.5 + half


# set matched to each assertion by the C-step
MATCHING_SET = {
    AssertionKind.right_sided: PredictiveRandomSet.lower_interval,
    AssertionKind.left_sided: PredictiveRandomSet.upper_interval,
    AssertionKind.singleton: PredictiveRandomSet.default_symmetric,
}


def _check_unit(w):
    w = np.asarray(w, dtype=float)
    if np.any(~((w >= 0) & (w <= 1))):
        raise ParameterDomainError("argument must lie in [0, 1]")
    return w


def _out(x):
    return x.item() if x.ndim == 0 else x


def contour(prs, w):
    """Probability that the random set contains ``w``."""
    prs = PredictiveRandomSet(prs)
    w = _check_unit(w)
    if prs is PredictiveRandomSet.lower_interval:
        out = 1.0 - w
    elif prs is PredictiveRandomSet.upper_interval:
        out = w.copy()
    else:
        out = 1.0 - np.abs(2.0 * w - 1.0)
    return _out(out)


def plausibility_from_G(g, assertion):
    """Plausibility of an assertion at a point whose predictive CDF value is ``g``."""
    assertion = AssertionKind.parse(assertion)
    g = _check_unit(g)
    if assertion is AssertionKind.right_sided:
        out = 1.0 - g
    elif assertion is AssertionKind.left_sided:
        out = g.copy()
    else:
        out = 1.0 - np.abs(2.0 * g - 1.0)
    return _out(out)
