"""Estimator-style front end to the engine.

An optimizer consumes no training data, so ``fit`` ignores ``X``/``y`` and
exists to follow the familiar ``get_params``/``set_params``/``fit`` cycle;
results are exposed as trailing-underscore attributes.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .engine import NORMALIZED, CohortConfig, run_many
from .harness import summarize
from .problems import AS_WRITTEN, ProblemSpec, get_problem
from .strategies import StrategyParams


class CohortIntelligence(BaseEstimator):
    """Cohort Intelligence optimizer.

    Parameters mirror ``CohortConfig`` and ``StrategyParams``; ``k1``/``k2``
    and the selection settings left as None take the problem's defaults.
    ``n_runs`` seeded runs start at ``random_state``; the best by the
    feasibility-first order is kept.
    """

    def __init__(self, problem="ajmb", strategy="triangular", bounds_mode=AS_WRITTEN,
                 k1=None, k2=None, delta=1e-6, phi=1e3, a_mod=1.0, outside_prob=1e-4,
                 candidates=5, reduction=0.99, max_attempts=5000, width_threshold=1e-15,
                 stagnation_window=100, stagnation_tol=1e-12, weighting=NORMALIZED,
                 pressure=None, constraint_weight=None, infeasible_weight=None,
                 n_runs=1, random_state=0):
        self.problem = problem
        self.strategy = strategy
        self.bounds_mode = bounds_mode
        self.k1 = k1
        self.k2 = k2
        self.delta = delta
        self.phi = phi
        self.a_mod = a_mod
        self.outside_prob = outside_prob
        self.candidates = candidates
        self.reduction = reduction
        self.max_attempts = max_attempts
        self.width_threshold = width_threshold
        self.stagnation_window = stagnation_window
        self.stagnation_tol = stagnation_tol
        self.weighting = weighting
        self.pressure = pressure
        self.constraint_weight = constraint_weight
        self.infeasible_weight = infeasible_weight
        self.n_runs = n_runs
        self.random_state = random_state

    def _problem(self):
        if isinstance(self.problem, ProblemSpec):
            return self.problem
        return get_problem(self.problem, self.bounds_mode)

    def _strategy(self, problem):
        k1 = problem.default_k1 if self.k1 is None else self.k1
        k2 = problem.default_k2 if self.k2 is None else self.k2
        extra = {k: v for k, v in (("k1", k1), ("k2", k2)) if v is not None}
        return StrategyParams(self.strategy, delta=self.delta, phi=self.phi, a_mod=self.a_mod,
                              outside_prob=self.outside_prob, **extra)

    def _config(self, problem):
        overrides = {
            "candidates": self.candidates,
            "reduction": self.reduction,
            "max_attempts": self.max_attempts,
            "width_threshold": self.width_threshold,
            "stagnation_window": self.stagnation_window,
            "stagnation_tol": self.stagnation_tol,
            "weighting": self.weighting,
        }
        for name in ("pressure", "constraint_weight", "infeasible_weight"):
            if getattr(self, name) is not None:
                overrides[name] = getattr(self, name)
        return CohortConfig.for_problem(problem, **overrides)

    def fit(self, X=None, y=None):
        problem = self._problem()
        seeds = [int(self.random_state) + i for i in range(int(self.n_runs))]
        self.results_ = run_many(problem, self._strategy(problem), self._config(problem), seeds)
        stats = summarize(self.results_, problem.sense)
        self.problem_ = problem
        self.statistics_ = stats
        self.best_x_ = stats.best_x
        self.best_objective_ = stats.best
        self.best_constraints_ = stats.best_constraints
        self.feasible_ = stats.best_feasible
        self.n_attempts_ = int(max(r.attempts for r in self.results_))
        return self

    def predict(self, X):
        """Objective values of the rows of ``X`` under the fitted problem."""
        check_is_fitted(self, "best_x_")
        f, _ = self.problem_.evaluate_batch(np.asarray(X, dtype=float))
        return f

    def score(self, X=None, y=None):
        """Best objective in the problem's maximization-positive sense."""
        check_is_fitted(self, "best_x_")
        return self.best_objective_ if self.problem_.maximize else -self.best_objective_
