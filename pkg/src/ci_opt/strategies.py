"""Constraint-handling strategies: map constraint values to selection weights.

Three mappings are provided:

* ``triangular`` - a probability peaked at ``g = 0`` that falls linearly to
  zero at ``k1`` and ``k2`` and takes a small constant outside them.
  Higher is better.
* ``modulus`` - a penalty ``|a g| + delta`` inside ``[k1, k2]`` and a static
  penalty ``phi |a g|`` outside. Lower is better.
* ``tanh`` - ``tanh(a |g|) + delta`` with ``a`` chosen so the score reaches
  0.999 at the bound on each side. Lower is better.

All score functions broadcast over numpy arrays.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_real
from .exceptions import ConfigurationError

TRIANGULAR = "triangular"
MODULUS = "modulus"
TANH = "tanh"
STRATEGY_KINDS = (TRIANGULAR, MODULUS, TANH)

TANH_SATURATION = 0.999
TRIANGULAR_PRODUCT_FLOOR = 1e-12


@dataclass(frozen=True)
class StrategyParams:
    kind: str
    k1: float = -10.0
    k2: float = 1.0
    delta: float = 1e-6
    phi: float = 1e3
    a_mod: float = 1.0
    outside_prob: float = 1e-4

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ConfigurationError(
                f"unknown strategy {self.kind!r}; choose from {', '.join(STRATEGY_KINDS)}"
            )
        check_real(self.k1, "k1", high=0.0, include_high=False)
        check_real(self.k2, "k2", low=0.0, include_low=False)
        check_real(self.delta, "delta", low=0.0, include_low=False)
        check_real(self.phi, "phi", low=1.0, include_low=False)
        check_real(self.a_mod, "a_mod", low=0.0, include_low=False)
        check_real(self.outside_prob, "outside_prob", low=0.0, high=1.0,
                   include_low=False, include_high=False)
        # per-side tanh slopes, cached because scoring runs every attempt
        object.__setattr__(self, "a_neg", tanh_coefficient(abs(self.k1)))
        object.__setattr__(self, "a_pos", tanh_coefficient(self.k2))

    @property
    def higher_is_better(self):
        return self.kind == TRIANGULAR


def _out(value, like):
    return float(value) if np.ndim(like) == 0 else value


def triangular_score(g, params):
    """Linear survival probability: 1 at ``g = 0``, 0 at ``k1``/``k2``.

    Values outside ``[k1, k2]`` get ``outside_prob``, which exceeds the
    score right at the bounds.
    """
    g = np.asarray(g, dtype=float)
    score = np.where(g >= 0.0, 1.0 - g / params.k2, 1.0 - g / params.k1)
    inside = (g >= params.k1) & (g <= params.k2)
    return _out(np.where(inside, score, params.outside_prob), g)


def modulus_penalty(g, params):
    g = np.asarray(g, dtype=float)
    mag = np.abs(params.a_mod * g)
    inside = (g >= params.k1) & (g <= params.k2)
    return _out(np.where(inside, mag + params.delta, params.phi * mag), g)


def tanh_coefficient(k):
    """Slope that makes ``tanh(slope * k)`` equal 0.999."""
    if not np.isfinite(k) or k <= 0:
        raise ConfigurationError(f"tanh bound must be positive, got {k}")
    return float(np.arctanh(TANH_SATURATION) / k)


def tanh_score(g, params):
    g = np.asarray(g, dtype=float)
    slope = np.where(g >= 0.0, params.a_pos, params.a_neg)
    return _out(np.tanh(slope * np.abs(g)) + params.delta, g)


def constraint_scores(g, params):
    if params.kind == TRIANGULAR:
        return triangular_score(g, params)
    if params.kind == MODULUS:
        return modulus_penalty(g, params)
    return tanh_score(g, params)


def aggregate_constraints(gs, params):
    """Combine one candidate's constraint scores (last axis) into one number.

    Triangular probabilities multiply, floored so a zero score stays usable;
    modulus and tanh scores add.
    """
    gs = np.asarray(gs, dtype=float)
    if gs.shape[-1] == 0:
        raise ConfigurationError("aggregate_constraints needs at least one constraint value")
    scores = constraint_scores(gs, params)
    if params.kind == TRIANGULAR:
        agg = np.maximum(np.prod(scores, axis=-1), TRIANGULAR_PRODUCT_FLOOR)
    else:
        agg = np.sum(scores, axis=-1)
    return _out(agg, gs[..., 0])


def selection_weights(objectives, aggregates, params, axis=-1):
    """Roulette-wheel weights for a cohort, computed along ``axis``.

    ``objectives`` are in minimization sense. They are shifted so the best
    equals 1, then combined with the constraint aggregate:

    * triangular: survival ``aggregate / shifted`` normalized to sum 1
    * modulus: pseudo-objective ``shifted + aggregate``, weights proportional
      to its inverse
    * tanh: as modulus, but the aggregate is scaled by the cohort objective
      spread plus one so a saturated violation outranks any objective gain
    """
    f = np.asarray(objectives, dtype=float)
    agg = np.asarray(aggregates, dtype=float)
    if f.size == 0 or f.shape != agg.shape:
        raise ConfigurationError("objectives and aggregates must be equal-length and non-empty")
    shifted = f - f.min(axis=axis, keepdims=True) + 1.0
    if params.kind == TRIANGULAR:
        score = agg / shifted
    else:
        if params.kind == MODULUS:
            scale = 1.0
        else:
            scale = np.ptp(shifted, axis=axis, keepdims=True) + 1.0
        score = 1.0 / (shifted + scale * agg)
    total = score.sum(axis=axis, keepdims=True)
    if not np.all((total > 0.0) & np.isfinite(total)):
        raise ArithmeticError(f"degenerate selection scores: {score.tolist()}")
    return score / total


def constraint_badness(aggregates, params):
    """Lower-is-better view of an aggregate.

    Triangular aggregates are survival probabilities, so their complement
    is used; penalties are already lower-is-better.
    """
    agg = np.asarray(aggregates, dtype=float)
    if params.kind == TRIANGULAR:
        return 1.0 - agg
    return agg


def unit_range(values, axis=-1):
    """Affine map of ``values`` onto ``[0, 1]`` along ``axis``; constant rows map to 0."""
    values = np.asarray(values, dtype=float)
    low = values.min(axis=axis, keepdims=True)
    span = values.max(axis=axis, keepdims=True) - low
    return np.divide(values - low, span, out=np.zeros_like(values), where=span > 0)


def normalized_weights(objectives, badness, pressure=3.0, constraint_weight=1.0, axis=-1):
    """Scale-free roulette weights.

    Objectives and constraint badness are each mapped onto ``[0, 1]`` over
    the cohort and combined as ``exp(-pressure * (o + constraint_weight * c))``,
    so the pull toward better candidates does not fade as the cohort
    contracts or depend on the units of the objective.
    """
    o = unit_range(objectives, axis)
    c = unit_range(badness, axis)
    if o.shape != c.shape:
        raise ConfigurationError("objectives and badness must have the same shape")
    score = np.exp(-pressure * (o + constraint_weight * c))
    return score / score.sum(axis=axis, keepdims=True)
