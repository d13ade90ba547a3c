"""Cohort Intelligence with pluggable constraint-handling strategies."""

from .engine import CohortConfig, RunResult, SamplingIntervals, run, run_many
from .estimator import CohortIntelligence
from .exceptions import (
    CIOptError,
    ConfigurationError,
    EvaluationError,
    SelectionError,
    UsageError,
)
from .harness import ExperimentPlan, RunStatistics, oracle_search, run_batch, summarize
from .problems import PROBLEM_NAMES, ProblemSpec, get_problem
from .strategies import StrategyParams

__version__ = "0.1.0"

__all__ = [
    "CIOptError",
    "CohortConfig",
    "CohortIntelligence",
    "ConfigurationError",
    "EvaluationError",
    "ExperimentPlan",
    "PROBLEM_NAMES",
    "ProblemSpec",
    "RunResult",
    "RunStatistics",
    "SamplingIntervals",
    "SelectionError",
    "StrategyParams",
    "UsageError",
    "get_problem",
    "oracle_search",
    "run",
    "run_batch",
    "run_many",
    "summarize",
]
