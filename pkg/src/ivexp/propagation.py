"""Extremal propagation of interval vectors through products of linear factors.

On each gap ``d`` of the grid the lower endpoint moves to the componentwise
minimum of ``(I + d Q) x`` over the set and the upper endpoint to the
maximum, one row LP per component.  When every ``I + d Q`` is entrywise
nonnegative these greedy steps give the exact envelope of all products
``prod (I + d_i Q_i) x0``; the attached radius then bounds the distance to
the true reachable set of ``x' = Q(t) x``.
"""

import itertools
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bounds import BoundParams, choose_steps, linear_product_bound
from .errors import DimensionError, MonotonicityViolation, PartitionError, UnsoundWarning
from .intervals import IntervalVector, _batch_minimize, lower_image, set_norm, upper_image
from .linalg import NORM_NAME, as_vector
from .partition import Partition, stats

log = logging.getLogger(__name__)

LINEAR = "linear"
EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class PropagationScheme:
    grid: Partition
    kind: str = LINEAR

    def __post_init__(self):
        if self.kind not in (LINEAR, EXPONENTIAL):
            raise ValueError(f"unknown scheme kind {self.kind!r}")


@dataclass(eq=False)
class BoundReport:
    """Endpoints plus the a-priori radius that makes them an enclosure.

    ``lower``/``upper`` are vectors for a single propagation and matrices
    (one column per basis vector) for transition bounds.
    """

    lower: np.ndarray
    upper: np.ndarray
    radius: float
    params: BoundParams
    sound: bool
    horizon: float
    norm: str = NORM_NAME
    witnesses: list | None = field(default=None, repr=False)

    @property
    def result(self):
        if self.lower.ndim != 1:
            raise ValueError("matrix-valued report has no single interval vector")
        return IntervalVector(self.lower, self.upper)

    def encloses(self, x, slack=0.0):
        """Whether ``x`` lies within the endpoints widened by the radius."""
        x = np.asarray(x, dtype=float)
        r = self.radius + slack
        return bool(np.all(x >= self.lower - r) and np.all(x <= self.upper + r))


def step_condition(q, h):
    """True iff ``I + h Q`` is entrywise nonnegative for every member ``Q``.

    Uses exact per-entry minima over each row polytope.
    """
    if h <= 0:
        raise ValueError("step must be positive")
    emin = q.entry_min
    n = q.n
    off = emin[~np.eye(n, dtype=bool)]
    if off.size and np.any(off < 0.0):
        return False
    return bool(np.all(1.0 + h * np.diag(emin) >= 0.0))


def _is_uniform(gaps):
    return bool(np.allclose(gaps, gaps[0], rtol=1e-9, atol=0.0))


def _check_grid(grid, horizon):
    if horizon <= 0:
        raise PartitionError("horizon must be positive")
    tol = 1e-12 * max(1.0, horizon)
    if abs(grid.start) > tol or abs(grid.end - horizon) > tol:
        raise PartitionError(f"grid spans [{grid.start}, {grid.end}], expected [0, {horizon}]")


def _sweep(q, lows, highs, gaps, record):
    """Advance stacked lower/upper vectors (shape ``(K, n)``) over ``gaps``.

    Returns the final stacks and, if ``record``, per step a list of
    ``(lower witness, upper witness)`` pairs, one per stacked vector.
    """
    kdim = lows.shape[0]
    chosen = [] if record else None
    structure = q._shared_structure
    if structure is not None:
        for d in gaps:
            vals, mats = _batch_minimize(structure, np.vstack([lows, -highs]))
            lows = lows + d * vals[:kdim]
            highs = highs - d * vals[kdim:]
            if record:
                chosen.append([(mats[k], mats[kdim + k]) for k in range(kdim)])
        return lows, highs, chosen
    lows, highs = lows.copy(), highs.copy()
    for d in gaps:
        step = []
        for k in range(kdim):
            lo_img, q_lo = lower_image(q, lows[k])
            hi_img, q_hi = upper_image(q, highs[k])
            lows[k] = lows[k] + d * lo_img
            highs[k] = highs[k] + d * hi_img
            step.append((q_lo, q_hi))
        if record:
            chosen.append(step)
    return lows, highs, chosen


def _point_power(q0, gaps, n_steps, x):
    """``x`` (shape ``(K, n)``) pushed through the linear factors of a single matrix.

    ``gaps`` of ``None`` means ``n_steps`` equal gaps, with the horizon
    already folded into ``q0``.
    """
    if gaps is None:
        step = np.eye(q0.shape[0]) + q0 / n_steps
        return x @ np.linalg.matrix_power(step, n_steps).T
    for d in gaps:
        x = x + d * (x @ q0.T)
    return x


def _run(q, x0s, horizon, d_min, d_max, n_steps, gaps, witnesses):
    """Shared body of the grid and uniform entry points; ``gaps=None`` means uniform."""
    x0s = [x if isinstance(x, IntervalVector) else IntervalVector.point(x) for x in x0s]
    for x0 in x0s:
        if x0.n != q.n:
            raise DimensionError(f"initial vector has length {x0.n}, matrix set is {q.n}x{q.n}")
    degenerate = all(x.degenerate for x in x0s)
    # a single matrix acting on a single vector needs no monotonicity
    sound = (q.is_point and degenerate) or step_condition(q, d_max)
    if not sound:
        if not degenerate:
            raise MonotonicityViolation(
                f"step {d_max:g} leaves I + hQ with negative entries; interval input not allowed")
        warnings.warn("step condition fails; result is heuristic, not a certified enclosure",
                      UnsoundWarning, stacklevel=4)

    M = horizon * set_norm(q)
    D = d_max / horizon
    params = BoundParams(N=n_steps, D=D, d=d_min / horizon, M=M)
    factor = linear_product_bound(n_steps, D, M)
    radii = [factor * x.norm() for x in x0s]

    lows = np.array([x.lower for x in x0s])
    highs = np.array([x.upper for x in x0s])
    per_vector = None
    if q.is_point and not witnesses:
        q0 = q.lo if gaps is not None else horizon * q.lo
        lows = _point_power(q0, gaps, n_steps, lows)
        highs = lows.copy() if degenerate else _point_power(q0, gaps, n_steps, highs)
    else:
        steps = itertools.repeat(d_max, n_steps) if gaps is None else gaps
        lows, highs, chosen = _sweep(q, lows, highs, steps, witnesses)
        if witnesses:
            per_vector = [[step[k] for step in chosen] for k in range(len(x0s))]
    # crossing is only possible for heuristic (unsound) runs
    highs = np.maximum(highs, lows)
    return lows, highs, radii, params, sound, per_vector


def propagate_many(q, x0s, horizon, grid, witnesses=False):
    """Propagate several initial intervals over the same grid in one sweep.

    Returns ``(lowers, uppers, radii, params, sound, witnesses)`` with one
    row of ``lowers``/``uppers`` per input; ``witnesses[k]`` lists the
    ``(lower, upper)`` witness pairs of input ``k`` step by step.

    Raises:
        MonotonicityViolation: for a non-degenerate input when some
            ``I + d Q`` has a negative entry.
    """
    _check_grid(grid, horizon)
    d_min, d_max, n_steps = stats(grid)
    gaps = grid.gaps
    if _is_uniform(gaps):
        gaps = None
        d_min = d_max = horizon / n_steps
    return _run(q, x0s, horizon, d_min, d_max, n_steps, gaps, witnesses)


def propagate_uniform(q, x0s, horizon, n_steps, witnesses=False):
    """:func:`propagate_many` on ``n_steps`` equal gaps, without building the grid."""
    if horizon <= 0:
        raise PartitionError("horizon must be positive")
    if n_steps < 1:
        raise PartitionError("uniform partition needs n >= 1")
    h = horizon / n_steps
    return _run(q, x0s, horizon, h, h, int(n_steps), None, witnesses)


def propagate(q, x0, horizon, grid, witnesses=False):
    """Propagate ``x0`` over ``grid`` (which must span ``[0, horizon]``).

    The radius is the linear-product bound evaluated on the problem
    rescaled to the unit interval (set norm times horizon, max gap over
    horizon), times the norm of the initial interval.

    Raises:
        MonotonicityViolation: for a non-degenerate ``x0`` when some
            ``I + d Q`` has a negative entry.
    """
    lows, highs, radii, params, sound, wit = propagate_many(q, [x0], horizon, grid, witnesses)
    return BoundReport(lower=lows[0], upper=highs[0], radius=radii[0], params=params, sound=sound,
                       horizon=float(horizon), witnesses=wit[0] if wit else None)


def refine_until(q, x0, horizon, tol, witnesses=False):
    """Propagate on the coarsest uniform grid whose reported radius is at most ``tol``."""
    if not isinstance(x0, IntervalVector):
        x0 = IntervalVector.point(as_vector(x0))
    M = horizon * set_norm(q)
    scale = max(x0.norm(), 1.0)
    n = choose_steps(M, tol / scale)
    log.info("refine_until: M=%.6g tol=%.3g -> %d steps", M, tol, n)
    lows, highs, radii, params, sound, wit = propagate_uniform(q, [x0], horizon, n, witnesses)
    return BoundReport(lower=lows[0], upper=highs[0], radius=radii[0], params=params, sound=sound,
                       horizon=float(horizon), witnesses=wit[0] if wit else None)
