from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .._validation import check_bounds, check_in_bounds, check_points
from ..exceptions import ConfigurationError, EvaluationError

MAXIMIZE = "maximize"
MINIMIZE = "minimize"
AS_WRITTEN = "as_written"
PAPER_CALIBRATED = "paper_calibrated"
BOUNDS_MODES = (AS_WRITTEN, PAPER_CALIBRATED)


@dataclass(frozen=True)
class ProblemSpec:
    """A box-bounded, inequality-constrained optimization problem.

    ``objective`` and ``constraints`` are vectorized: they receive an
    ``(n, dimension)`` array and return shapes ``(n,)`` and
    ``(n, constraint_count)``. Constraints follow the ``g <= 0`` convention
    and objectives are reported in the problem's native sense.
    """

    name: str
    lower: np.ndarray
    upper: np.ndarray
    sense: str
    objective: Callable[[np.ndarray], np.ndarray]
    constraints: Callable[[np.ndarray], np.ndarray]
    constraint_count: int
    variables: tuple = ()
    units: tuple = ()
    constants: Any = None
    bounds_mode: str = AS_WRITTEN
    default_k1: float = None
    default_k2: float = None
    description: str = ""
    constraint_names: tuple = ()
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        lower, upper = check_bounds(self.lower, self.upper)
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if self.sense not in (MAXIMIZE, MINIMIZE):
            raise ConfigurationError(f"sense must be maximize or minimize, got {self.sense!r}")
        if self.bounds_mode not in BOUNDS_MODES:
            raise ConfigurationError(f"unknown bounds mode {self.bounds_mode!r}")
        if not self.variables:
            object.__setattr__(self, "variables", tuple(f"x{i + 1}" for i in range(lower.size)))

    @property
    def dimension(self):
        return self.lower.size

    @property
    def maximize(self):
        return self.sense == MAXIMIZE

    def evaluate_batch(self, X):
        """Evaluate every row of ``X``; failed rows come back as NaN."""
        return self._evaluate_rows(check_points(X, self.dimension))

    def _evaluate_rows(self, X):
        # hot path for the engine: X is already a validated float matrix
        with np.errstate(all="ignore"):
            f = np.asarray(self.objective(X), dtype=float).reshape(X.shape[0])
            g = np.asarray(self.constraints(X), dtype=float).reshape(X.shape[0], self.constraint_count)
        return f, g

    def to_minimization(self, f):
        """Map native objective values onto the minimization scale used internally."""
        return -f if self.maximize else f

    def from_minimization(self, f):
        return -f if self.maximize else f


def evaluate(problem, x):
    """Evaluate a single decision vector.

    Returns ``(objective, constraints)`` with the objective in the problem's
    native sense. Raises EvaluationError on any non-finite result.
    """
    x = check_in_bounds(np.asarray(x, dtype=float).ravel(), problem.lower, problem.upper)
    f, g = problem.evaluate_batch(x)
    if not (np.isfinite(f[0]) and np.all(np.isfinite(g[0]))):
        raise EvaluationError(f"{problem.name}: non-finite evaluation at x={x.tolist()}", x=x)
    return float(f[0]), g[0].copy()


def total_violation(g):
    """Sum of positive constraint parts along the last axis."""
    return np.sum(np.maximum(np.asarray(g, dtype=float), 0.0), axis=-1)
