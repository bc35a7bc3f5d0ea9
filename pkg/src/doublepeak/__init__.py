"""Exact-arithmetic toolkit for single-facility location with double-peaked agents."""

from .core import (
    CostParams,
    Instance,
    Lottery,
    Objective,
    agent_cost,
    as_rational,
    expected_cost,
    expected_objective,
    max_cost,
    normalize,
    social_cost,
)
from .errors import (
    DoublePeakError,
    EmptyInstance,
    IndexOutOfRange,
    InvalidParams,
    InvalidRange,
    NonSymmetricParams,
    ParseError,
    SearchBudgetExceeded,
)
from .mechanisms import Mechanism, get_mechanism
from .optimal import OptResult, grid_scan, optimal_max, optimal_social

__version__ = "0.1.0"
