"""Prior-free prediction of future observables with plausibility functions."""

__version__ = "0.1.0"

from .errors import NumericalFailure, ParameterDomainError, SolverConvergenceError
from .streams import UniformStream, derive_stream_id
from .randsets import AssertionKind, PredictiveRandomSet, contour, plausibility_from_G
from .engine import (
    EmpiricalG,
    PlausibilityCurve,
    PredictionRegion,
    build_empirical_G,
    build_endpoint_Gs,
    curve,
    curve_from_endpoint_pairs,
    eval_G,
    region,
    region_from_endpoint_pairs,
)
from .gamma_solver import GammaSolution, GammaSolveConfig
from .models import PredictionTarget, SampleData, make_sampler
