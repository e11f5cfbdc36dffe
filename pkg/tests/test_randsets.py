import numpy as np
import pytest
from hypothesis import given, strategies as st

from imprediction.errors import ParameterDomainError
from imprediction.randsets import (
    MATCHING_SET,
    AssertionKind,
    PredictiveRandomSet,
    contour,
    plausibility_from_G,
)

unit = st.floats(0, 1)


def test_contours():
    assert contour(PredictiveRandomSet.lower_interval, 0.3) == pytest.approx(0.7)
    assert contour(PredictiveRandomSet.upper_interval, 0.3) == pytest.approx(0.3)
    assert contour(PredictiveRandomSet.default_symmetric, 0.5) == 1.0
    assert contour(PredictiveRandomSet.default_symmetric, 0.1) == pytest.approx(0.2)


def test_plausibility_forms():
    assert plausibility_from_G(0.8, "right") == pytest.approx(0.2)
    assert plausibility_from_G(0.8, "left") == pytest.approx(0.8)
    assert plausibility_from_G(0.8, "singleton") == pytest.approx(0.4)
    assert plausibility_from_G(0.5, AssertionKind.singleton) == 1.0


@given(unit)
def test_plausibility_equals_contour_of_matching_set(g):
    for kind in AssertionKind:
        assert plausibility_from_G(g, kind) == pytest.approx(contour(MATCHING_SET[kind], g))


@given(unit, unit)
def test_monotone_in_G(a, b):
    lo, hi = sorted((a, b))
    assert plausibility_from_G(lo, "right") >= plausibility_from_G(hi, "right")
    assert plausibility_from_G(lo, "left") <= plausibility_from_G(hi, "left")


@given(unit)
def test_contour_is_coverage_of_random_set(w):
    # contour(w) = P(w in S) for S = realize(W), W uniform; check by quadrature on a fine grid
    W = (np.arange(20_000) + 0.5) / 20_000
    for prs in PredictiveRandomSet:
        lo, hi = prs.realize(W)
        cov = np.mean((lo <= w) & (w <= hi))
        assert cov == pytest.approx(contour(prs, w), abs=2e-4)


def test_vectorised():
    g = np.array([0.0, 0.25, 1.0])
    assert np.allclose(plausibility_from_G(g, "singleton"), [0.0, 0.5, 0.0])


@pytest.mark.parametrize("bad", [-0.01, 1.01, np.nan])
def test_domain(bad):
    with pytest.raises(ParameterDomainError):
        plausibility_from_G(bad, "left")
    with pytest.raises(ParameterDomainError):
        contour(PredictiveRandomSet.lower_interval, bad)


def test_assertion_aliases():
    assert AssertionKind.parse("upper") is AssertionKind.right_sided
    assert AssertionKind.parse("lower") is AssertionKind.left_sided
    assert AssertionKind.parse("two-sided") is AssertionKind.singleton
    with pytest.raises(ParameterDomainError):
        AssertionKind.parse("sideways")
