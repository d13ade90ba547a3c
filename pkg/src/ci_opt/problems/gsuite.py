"""Constrained test functions G1, G4 and G6 (minimization).

Definitions follow the standard constrained benchmark suite; each returns
objective and ``g <= 0`` constraint arrays for a batch of points.
"""

import numpy as np

from ..exceptions import ConfigurationError
from .base import MINIMIZE, ProblemSpec

G1_OPTIMUM = np.array([1.0] * 9 + [3.0, 3.0, 3.0, 1.0])
G4_OPTIMUM = np.array([78.0, 33.0, 29.995256025682, 45.0, 36.775812905788])
G6_OPTIMUM = np.array([14.09500000000000064, 0.8429607892154795668])

KNOWN_OPTIMA = {"g1": -15.0, "g4": -30665.539, "g6": -6961.81388}


def _as_rows(x, dim, name):
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != dim:
        raise ConfigurationError(f"{name} expects {dim} variables, got {X.shape[1]}")
    return X, single


def _finish(f, g, single):
    if single:
        return float(f[0]), g[0]
    return f, g


def g1(x):
    """13 variables, 9 linear inequalities; optimum -15 at G1_OPTIMUM."""
    X, single = _as_rows(x, 13, "g1")
    f = 5.0 * X[:, :4].sum(axis=1) - 5.0 * (X[:, :4] ** 2).sum(axis=1) - X[:, 4:13].sum(axis=1)
    x1, x2, x3, x4, x5, x6, x7, x8, x9, x10, x11, x12 = X[:, :12].T
    g = np.column_stack(
        [
            2 * x1 + 2 * x2 + x10 + x11 - 10,
            2 * x1 + 2 * x3 + x10 + x12 - 10,
            2 * x2 + 2 * x3 + x11 + x12 - 10,
            -8 * x1 + x10,
            -8 * x2 + x11,
            -8 * x3 + x12,
            -2 * x4 - x5 + x10,
            -2 * x6 - x7 + x11,
            -2 * x8 - x9 + x12,
        ]
    )
    return _finish(f, g, single)


def g4(x):
    """5 variables; three two-sided quadratic expressions give six constraints."""
    X, single = _as_rows(x, 5, "g4")
    x1, x2, x3, x4, x5 = X.T
    f = 5.3578547 * x3**2 + 0.8356891 * x1 * x5 + 37.293239 * x1 - 40792.141
    u = 85.334407 + 0.0056858 * x2 * x5 + 0.0006262 * x1 * x4 - 0.0022053 * x3 * x5
    v = 80.51249 + 0.0071317 * x2 * x5 + 0.0029955 * x1 * x2 + 0.0021813 * x3**2
    w = 9.300961 + 0.0047026 * x3 * x5 + 0.0012547 * x1 * x3 + 0.0019085 * x3 * x4
    g = np.column_stack([u - 92.0, -u, v - 110.0, 90.0 - v, w - 25.0, 20.0 - w])
    return _finish(f, g, single)


def g6(x):
    """2 variables, two nonlinear inequalities; feasible region is a thin crescent."""
    X, single = _as_rows(x, 2, "g6")
    x1, x2 = X.T
    f = (x1 - 10.0) ** 3 + (x2 - 20.0) ** 3
    g = np.column_stack(
        [
            -((x1 - 5.0) ** 2) - (x2 - 5.0) ** 2 + 100.0,
            (x1 - 6.0) ** 2 + (x2 - 5.0) ** 2 - 82.81,
        ]
    )
    return _finish(f, g, single)


def _g1_f(X):
    return g1(X)[0]


def _g1_g(X):
    return g1(X)[1]


def _g4_f(X):
    return g4(X)[0]


def _g4_g(X):
    return g4(X)[1]


def _g6_f(X):
    return g6(X)[0]


def _g6_g(X):
    return g6(X)[1]


# Neither k1/k2 nor selection settings are tabulated for the test suite;
# these are calibrated. A very negative k1 keeps the slack of two-sided
# constraints from being penalized like a violation.
GSUITE_K1 = -1000.0
GSUITE_K2 = 100.0
GSUITE_SELECTION = {"pressure": 5.0, "constraint_weight": 10.0, "infeasible_weight": 30.0}

def make_g1(bounds_mode="as_written"):
    return ProblemSpec(
        name="g1",
        lower=[0.0] * 13,
        upper=[1.0] * 9 + [100.0] * 3 + [1.0],
        sense=MINIMIZE,
        objective=_g1_f,
        constraints=_g1_g,
        constraint_count=9,
        bounds_mode=bounds_mode,
        default_k1=GSUITE_K1,
        default_k2=GSUITE_K2,
        description="G1: quadratic objective, 9 linear inequalities",
        metadata={"known_optimum": KNOWN_OPTIMA["g1"], "selection": GSUITE_SELECTION},
    )


def make_g4(bounds_mode="as_written"):
    return ProblemSpec(
        name="g4",
        lower=[78.0, 33.0, 27.0, 27.0, 27.0],
        upper=[102.0, 45.0, 45.0, 45.0, 45.0],
        sense=MINIMIZE,
        objective=_g4_f,
        constraints=_g4_g,
        constraint_count=6,
        bounds_mode=bounds_mode,
        default_k1=GSUITE_K1,
        default_k2=GSUITE_K2,
        description="G4: quadratic objective, 6 nonlinear inequalities",
        metadata={"known_optimum": KNOWN_OPTIMA["g4"], "selection": GSUITE_SELECTION},
    )


def make_g6(bounds_mode="as_written"):
    return ProblemSpec(
        name="g6",
        lower=[13.0, 0.0],
        upper=[100.0, 100.0],
        sense=MINIMIZE,
        objective=_g6_f,
        constraints=_g6_g,
        constraint_count=2,
        bounds_mode=bounds_mode,
        default_k1=GSUITE_K1,
        default_k2=GSUITE_K2,
        description="G6: cubic objective, 2 nonlinear inequalities",
        metadata={"known_optimum": KNOWN_OPTIMA["g6"], "selection": GSUITE_SELECTION},
    )
