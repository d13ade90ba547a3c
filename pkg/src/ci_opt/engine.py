"""Cohort Intelligence learning loop with sampling-interval reduction.

Each candidate owns a box of per-variable sampling intervals. Every learning
attempt the cohort samples one point per candidate, scores the points with a
constraint-handling strategy, and every candidate roulette-selects a behavior
to follow. The follower's box is then shrunk by the reduction factor and
re-centered on the followed point, clipped to the original bounds.

``run_many`` advances several independently seeded runs in lock-step so the
per-attempt numpy overhead is shared; every run still consumes only its own
random streams, so its result does not depend on the batch it ran in.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_bounds, check_positive_int, check_real
from .exceptions import ConfigurationError, EvaluationError, SelectionError
from .problems.base import total_violation
from .strategies import (
    StrategyParams,
    aggregate_constraints,
    constraint_badness,
    normalized_weights,
    selection_weights,
)

FAILED_WEIGHT = 1e-12
FEASIBILITY_TOL = 1e-9
NORMALIZED = "normalized"
SHIFTED = "shifted"
WEIGHTINGS = (NORMALIZED, SHIFTED)


def make_rng(seed, stream=0):
    """PCG64 generator for ``(seed, stream)``.

    Streams are derived through ``SeedSequence`` spawn keys, so the draws
    for stream ``i`` do not depend on how many other streams exist.
    """
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(int(stream),))))


@dataclass(frozen=True)
class CohortConfig:
    """Learning-loop settings.

    ``weighting`` picks how objectives and constraint scores become roulette
    weights: ``normalized`` (default) rescales both over the cohort and uses
    ``pressure`` and ``constraint_weight``, switching to total violation with
    ``infeasible_weight`` while no cohort member is feasible; ``shifted``
    applies ``strategies.selection_weights`` to the raw values.
    """

    candidates: int = 5
    reduction: float = 0.99
    max_attempts: int = 5000
    width_threshold: float = 1e-15
    stagnation_window: int = 100
    stagnation_tol: float = 1e-12
    feasibility_tol: float = FEASIBILITY_TOL
    weighting: str = NORMALIZED
    pressure: float = 3.0
    constraint_weight: float = 1.0
    infeasible_weight: float = 3.0

    @classmethod
    def for_problem(cls, problem, **overrides):
        """Defaults plus the problem's calibrated selection settings, then ``overrides``."""
        settings = dict(problem.metadata.get("selection", {}))
        settings.update(overrides)
        return cls(**settings)

    def __post_init__(self):
        check_positive_int(self.candidates, "candidates")
        check_real(self.reduction, "reduction", low=0.0, high=1.0, include_low=False)
        check_positive_int(self.max_attempts, "max_attempts")
        check_real(self.width_threshold, "width_threshold", low=0.0, include_low=False)
        check_positive_int(self.stagnation_window, "stagnation_window")
        check_real(self.stagnation_tol, "stagnation_tol", low=0.0)
        check_real(self.feasibility_tol, "feasibility_tol", low=0.0)
        if self.weighting not in WEIGHTINGS:
            raise ConfigurationError(
                f"unknown weighting {self.weighting!r}; choose from {', '.join(WEIGHTINGS)}"
            )
        check_real(self.pressure, "pressure", low=0.0, include_low=False)
        check_real(self.constraint_weight, "constraint_weight", low=0.0)
        check_real(self.infeasible_weight, "infeasible_weight", low=0.0)


@dataclass
class SamplingIntervals:
    """Current sampling boxes plus the original problem bounds.

    ``lower``/``upper`` have shape ``(..., d)``; a cohort stores one row per
    candidate. The originals always have shape ``(d,)``. ``width`` carries
    the interval width explicitly so it follows the reduction law exactly;
    ``upper - lower`` can stop shrinking a few ulps wide through rounding.
    """

    lower: np.ndarray
    upper: np.ndarray
    original_lower: np.ndarray
    original_upper: np.ndarray
    width: np.ndarray = None

    def __post_init__(self):
        if self.width is None:
            self.width = self.upper - self.lower

    def relative_widths(self):
        return self.width / (self.original_upper - self.original_lower)

    def max_relative_width(self):
        return float(np.max(self.relative_widths()))

    def is_valid(self):
        return bool(
            np.all(self.lower <= self.upper)
            and np.all(self.lower >= self.original_lower)
            and np.all(self.upper <= self.original_upper)
        )


@dataclass
class ConvergenceTrace:
    """Per-attempt record of the best-so-far candidate and interval widths.

    ``cohort_objective`` holds the best objective within each attempt's own
    cohort; it drives the stagnation test and is not written to trace files.
    """

    attempt: list = field(default_factory=list)
    best_objective: list = field(default_factory=list)
    max_rel_width: list = field(default_factory=list)
    agg_violation: list = field(default_factory=list)
    cohort_objective: list = field(default_factory=list)

    def append(self, attempt, best_objective, max_rel_width, agg_violation, cohort_objective=np.nan):
        self.attempt.append(attempt)
        self.best_objective.append(best_objective)
        self.max_rel_width.append(max_rel_width)
        self.agg_violation.append(agg_violation)
        self.cohort_objective.append(cohort_objective)

    def __len__(self):
        return len(self.attempt)

    def as_arrays(self):
        return {
            "attempt": np.asarray(self.attempt, dtype=int),
            "best_objective": np.asarray(self.best_objective, dtype=float),
            "max_rel_width": np.asarray(self.max_rel_width, dtype=float),
            "agg_violation": np.asarray(self.agg_violation, dtype=float),
        }


@dataclass
class RunResult:
    problem: str
    strategy: str
    bounds_mode: str
    seed: int
    best_x: np.ndarray
    best_objective: float
    best_constraints: np.ndarray
    attempts: int
    evaluations: int
    elapsed: float
    trace: ConvergenceTrace
    feasible: bool
    error: str = None

    @property
    def violation(self):
        return float(total_violation(self.best_constraints))


def initialize_intervals(problem):
    lower, upper = check_bounds(problem.lower, problem.upper)
    return SamplingIntervals(lower.copy(), upper.copy(), lower.copy(), upper.copy())


def sample_candidate(intervals, rng):
    """Draw one point uniformly from ``[lower, upper)`` per variable."""
    u = rng.random(np.shape(intervals.lower))
    return intervals.lower + u * (intervals.upper - intervals.lower)


def follow_selection(weights, rng=None, u=None):
    """Roulette wheel: index ``i`` with probability ``weights[i] / sum(weights)``.

    Inverts the cumulative sum at one uniform draw; pass ``u`` to supply the
    draw directly (it may be an array to select several times at once).
    """
    w = np.asarray(weights, dtype=float).ravel()
    if w.size == 0 or np.any(w < 0) or not np.all(np.isfinite(w)):
        raise SelectionError(f"invalid roulette weights {w.tolist()}")
    cum = np.cumsum(w)
    if cum[-1] <= 0:
        raise SelectionError("roulette weights sum to zero")
    if u is None:
        u = rng.random()
    idx = np.searchsorted(cum, np.asarray(u) * cum[-1], side="right")
    idx = np.minimum(idx, w.size - 1)
    return int(idx) if np.ndim(idx) == 0 else idx


def shrink_intervals(intervals, center, reduction):
    """Scale every interval width by ``reduction`` around ``center``, clipped to the original bounds."""
    width = reduction * intervals.width
    lo_raw = center - 0.5 * width
    hi_raw = center + 0.5 * width
    lower = np.maximum(lo_raw, intervals.original_lower)
    upper = np.minimum(hi_raw, intervals.original_upper)
    clipped = (lo_raw < intervals.original_lower) | (hi_raw > intervals.original_upper)
    width = np.where(clipped, upper - lower, width)
    return SamplingIntervals(lower, upper, intervals.original_lower, intervals.original_upper, width)


def has_converged(trace, intervals, config):
    n = len(trace)
    if n == 0:
        return False
    if n >= config.max_attempts:
        return True
    if intervals.max_relative_width() <= config.width_threshold:
        return True
    window = config.stagnation_window
    if n > window:
        # saturation: the cohort's own best no longer moves over the window
        recent = trace.cohort_objective[-1 - window:]
        if max(recent) - min(recent) < config.stagnation_tol:
            return True
    return False


def rank_key(objective_min, constraints, tol=FEASIBILITY_TOL):
    """Best-ever ordering: feasible first, then objective; infeasible by violation then objective."""
    viol = float(total_violation(constraints))
    if np.all(np.asarray(constraints) <= tol):
        return (0, objective_min, 0.0)
    return (1, viol, objective_min)


def cohort_weights(f_min, G, valid, params, config=None):
    """Selection weights for one or more cohorts (last axis = candidates).

    ``f_min`` is ``(..., C)``, ``G`` is ``(..., C, m)`` and ``valid`` marks
    finite evaluations. Failed candidates get ``FAILED_WEIGHT``; a cohort
    with no valid member is weighted uniformly.
    """
    if config is None:
        config = CohortConfig()
    f_min = np.asarray(f_min, dtype=float)
    G = np.asarray(G, dtype=float)
    valid = np.asarray(valid, dtype=bool)
    all_valid = bool(valid.all())
    if not all_valid:
        # park failed entries on the cohort's worst valid values
        worst_f = np.where(valid, f_min, -np.inf).max(axis=-1, keepdims=True)
        f_min = np.where(valid, f_min, np.where(np.isfinite(worst_f), worst_f, 0.0))
        G = np.where(valid[..., None] & np.isfinite(G), G, 0.0)

    if G.shape[-1] == 0:
        agg = np.zeros_like(f_min)
        viol = agg
    else:
        agg = aggregate_constraints(G, params)
        viol = total_violation(G)
    if config.weighting == SHIFTED:
        if G.shape[-1] == 0:
            agg = np.ones_like(f_min) if params.kind == "triangular" else agg
        w = selection_weights(f_min, agg, params)
    else:
        bad = constraint_badness(agg, params)
        if not all_valid:
            worst_b = np.where(valid, bad, -np.inf).max(axis=-1, keepdims=True)
            bad = np.where(valid, bad, np.where(np.isfinite(worst_b), worst_b, 0.0))
            viol = np.where(valid, viol, viol.max(axis=-1, keepdims=True))
        # a flat score carries no direction, and with nobody feasible the
        # scores trade violation against objective: steer by violation then
        spread = np.ptp(bad, axis=-1, keepdims=True)
        flat = ~(spread > 1e-12 * np.maximum(1.0, np.abs(bad).max(axis=-1, keepdims=True)))
        feasible = valid & (G <= config.feasibility_tol).all(axis=-1)
        none_feasible = ~feasible.any(axis=-1, keepdims=True)
        bad = np.where(flat | none_feasible, viol, bad)
        weight = np.where(none_feasible, config.infeasible_weight, config.constraint_weight)
        w = normalized_weights(f_min, bad, config.pressure, weight)
    if not all_valid:
        w = np.where(valid, w, FAILED_WEIGHT)
        w = np.where(valid.any(axis=-1, keepdims=True), w, 1.0)
        w = w / w.sum(axis=-1, keepdims=True)
    return w


class _CandidateDraws:
    """Buffered per-candidate uniform draws for a batch of runs.

    Candidate ``c`` of run ``r`` consumes its own stream
    ``make_rng(seeds[r], c)`` in blocks; row ``t`` of a block holds the
    ``d`` sampling draws and the roulette draw for one attempt.
    """

    def __init__(self, seeds, candidates, dimension, block=256):
        self._rngs = [[make_rng(s, c) for c in range(candidates)] for s in seeds]
        self._shape = (block, dimension + 1)
        self._pos = block
        self._buf = None

    def next(self):
        if self._pos == self._shape[0]:
            self._buf = np.stack(
                [np.stack([rng.random(self._shape) for rng in row], axis=1) for row in self._rngs],
                axis=1,
            )
            self._pos = 0
        row = self._buf[self._pos]
        self._pos += 1
        return row


def _better(feas_new, key1_new, key2_new, feas_old, key1_old, key2_old):
    """Vectorized D6 comparison of (feasible, primary, secondary) keys."""
    lexi = (key1_new < key1_old) | ((key1_new == key1_old) & (key2_new < key2_old))
    return (feas_new & ~feas_old) | ((feas_new == feas_old) & lexi)


def run_many(problem, strategy, config=None, seeds=(0,)):
    """Execute one CI run per seed and return a list of RunResult.

    The runs advance together but are independent: the result for a seed
    is bit-identical to ``run(problem, strategy, config, seed)``. Each
    result's ``elapsed`` is the batch wall time shared out in proportion
    to attempts.
    """
    if config is None:
        config = CohortConfig.for_problem(problem)
    if not isinstance(strategy, StrategyParams):
        raise ConfigurationError("strategy must be a StrategyParams instance")
    seeds = [int(s) for s in seeds]
    if not seeds:
        return []
    R, C, d = len(seeds), config.candidates, problem.dimension
    m = problem.constraint_count
    draws = _CandidateDraws(seeds, C, d)

    base = initialize_intervals(problem)
    o_lo, o_hi = base.original_lower, base.original_upper
    o_width = o_hi - o_lo
    lower = np.broadcast_to(o_lo, (R, C, d)).copy()
    upper = np.broadcast_to(o_hi, (R, C, d)).copy()
    # widths are carried explicitly: recomputing upper - lower can stall a
    # few ulps wide once rounding of center +- half stops shrinking the box
    width = np.broadcast_to(o_width, (R, C, d)).copy()
    tol = config.feasibility_tol
    window = config.stagnation_window
    rows = np.arange(R)
    sign = -1.0 if problem.maximize else 1.0

    cap = config.max_attempts
    t_best = np.full((cap, R), np.nan)
    t_width = np.full((cap, R), np.nan)
    t_viol = np.full((cap, R), np.nan)
    t_cohort = np.full((cap, R), np.nan)
    ring = np.full((window + 1, R), np.nan)

    best_feas = np.zeros(R, dtype=bool)
    best_k1 = np.full(R, np.inf)
    best_k2 = np.full(R, np.inf)
    best_x = np.full((R, d), np.nan)
    best_g = np.full((R, m), np.nan)
    best_f = np.full(R, np.nan)
    best_viol = np.full(R, np.nan)
    found = np.zeros(R, dtype=bool)
    active = np.ones(R, dtype=bool)
    attempts = np.zeros(R, dtype=int)
    start = time.perf_counter()

    attempt = 0
    with np.errstate(all="ignore"):
        while True:
            attempt += 1
            u = draws.next()
            X = lower + u[..., :d] * (upper - lower)
            f, G = problem._evaluate_rows(X.reshape(R * C, d))
            f = f.reshape(R, C)
            G = G.reshape(R, C, m)
            f_min = sign * f
            valid = np.isfinite(f_min) & np.isfinite(G).all(axis=-1)

            try:
                w = cohort_weights(f_min, G, valid, strategy, config)
            except ArithmeticError as exc:
                raise type(exc)(f"attempt {attempt}: {exc}") from exc
            cum = np.cumsum(w, axis=-1)
            chosen = (u[..., d:] * cum[:, -1:, None] >= cum[:, None, :]).sum(axis=-1)
            np.minimum(chosen, C - 1, out=chosen)

            # cohort best by the D6 order: feasible on objective, else violation then objective
            viol = np.maximum(G, 0.0).sum(axis=-1)
            feas = valid & (G <= tol).all(axis=-1)
            k1 = np.where(feas, f_min, viol)
            k2 = np.where(feas, 0.0, f_min)
            any_feas = feas.any(axis=-1, keepdims=True)
            pool = np.where(any_feas, feas, valid)
            k1p = np.where(pool, k1, np.inf)
            cand = pool & (k1p == k1p.min(axis=-1, keepdims=True))
            i = np.where(cand, k2, np.inf).argmin(axis=-1)
            ok = valid[rows, i]
            c_feas, c_k1, c_k2 = feas[rows, i], k1[rows, i], k2[rows, i]
            improve = active & ok & (~found | _better(c_feas, c_k1, c_k2, best_feas, best_k1, best_k2))
            if improve.any():
                best_feas = np.where(improve, c_feas, best_feas)
                best_k1 = np.where(improve, c_k1, best_k1)
                best_k2 = np.where(improve, c_k2, best_k2)
                best_f = np.where(improve, f[rows, i], best_f)
                best_viol = np.where(improve, viol[rows, i], best_viol)
                best_x[improve] = X[rows, i][improve]
                best_g[improve] = G[rows, i][improve]
                found |= improve
            cohort_f = np.where(ok, f[rows, i], np.nan)

            # each candidate shrinks its own box around the behavior it follows
            centers = X[rows[:, None], chosen]
            width *= config.reduction
            lo_raw = centers - 0.5 * width
            hi_raw = centers + 0.5 * width
            lower = np.maximum(lo_raw, o_lo)
            upper = np.minimum(hi_raw, o_hi)
            clipped = (lo_raw < o_lo) | (hi_raw > o_hi)
            if clipped.any():
                width = np.where(clipped, upper - lower, width)
            rel_width = (width / o_width).max(axis=(1, 2))

            n = attempt - 1
            t_best[n] = best_f
            t_viol[n] = best_viol
            t_cohort[n] = cohort_f
            t_width[n] = rel_width
            ring[n % (window + 1)] = cohort_f
            attempts[active] = attempt

            stop = rel_width <= config.width_threshold
            if attempt >= cap:
                stop[:] = True
            elif attempt > window:
                spread = np.nanmax(ring, axis=0) - np.nanmin(ring, axis=0)
                stop |= spread < config.stagnation_tol
            active &= ~stop
            if not active.any():
                break

    elapsed = time.perf_counter() - start
    results = []
    total = attempts.sum()
    for r, seed in enumerate(seeds):
        n = attempts[r]
        if not found[r]:
            raise EvaluationError(f"{problem.name}: every evaluation failed over {n} attempts")
        trace = ConvergenceTrace(
            attempt=list(range(1, n + 1)),
            best_objective=t_best[:n, r].tolist(),
            max_rel_width=t_width[:n, r].tolist(),
            agg_violation=t_viol[:n, r].tolist(),
            cohort_objective=t_cohort[:n, r].tolist(),
        )
        results.append(
            RunResult(
                problem=problem.name,
                strategy=strategy.kind,
                bounds_mode=problem.bounds_mode,
                seed=seed,
                best_x=best_x[r].copy(),
                best_objective=float(best_f[r]),
                best_constraints=best_g[r].copy(),
                attempts=int(n),
                evaluations=int(n) * C,
                elapsed=elapsed * n / total,
                trace=trace,
                feasible=bool(best_feas[r]),
            )
        )
    return results


def run(problem, strategy, config=None, seed=0):
    """Execute one seeded CI run and return the best-ever candidate.

    Deterministic for a fixed ``(problem, strategy, config, seed)``.
    """
    return run_many(problem, strategy, config, [seed])[0]
