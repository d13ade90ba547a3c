"""Problem catalog: manufacturing models and constrained test functions."""

from ..exceptions import UsageError
from .base import (
    AS_WRITTEN,
    BOUNDS_MODES,
    MAXIMIZE,
    MINIMIZE,
    PAPER_CALIBRATED,
    ProblemSpec,
    evaluate,
    total_violation,
)
from .gsuite import make_g1, make_g4, make_g6
from .manufacturing import make_ajmb, make_ajmd, make_grinding, make_usm, make_wjm

_FACTORIES = {
    "ajmb": make_ajmb,
    "ajmd": make_ajmd,
    "wjm": make_wjm,
    "usm": make_usm,
    "grinding": make_grinding,
    "g1": make_g1,
    "g4": make_g4,
    "g6": make_g6,
}

PROBLEM_NAMES = tuple(_FACTORIES)
MANUFACTURING_PROBLEMS = ("ajmb", "ajmd", "wjm", "usm", "grinding")
GSUITE_PROBLEMS = ("g1", "g4", "g6")


def normalize_bounds_mode(mode):
    mode = (mode or AS_WRITTEN).replace("-", "_")
    if mode not in BOUNDS_MODES:
        raise UsageError(f"unknown bounds mode {mode!r}; choose from {', '.join(BOUNDS_MODES)}")
    return mode


def get_problem(name, bounds_mode=AS_WRITTEN):
    """Build the named problem. ``bounds_mode`` only changes the AJMD velocity bound."""
    try:
        factory = _FACTORIES[name.lower()]
    except (KeyError, AttributeError):
        raise UsageError(
            f"unknown problem {name!r}; valid names: {', '.join(PROBLEM_NAMES)}"
        ) from None
    return factory(normalize_bounds_mode(bounds_mode))


problem_registry = get_problem

__all__ = [
    "AS_WRITTEN",
    "PAPER_CALIBRATED",
    "MAXIMIZE",
    "MINIMIZE",
    "PROBLEM_NAMES",
    "MANUFACTURING_PROBLEMS",
    "GSUITE_PROBLEMS",
    "ProblemSpec",
    "evaluate",
    "get_problem",
    "problem_registry",
    "total_violation",
]
