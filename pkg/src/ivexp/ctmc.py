"""Imprecise continuous-time Markov chains.

A generator interval is a box ``[lo, hi]`` of rate matrices whose members
have zero row sums.  Propagating the basis vector ``e_j`` through the
backward equation ``x' = Q x`` bounds column ``j`` of the transition matrix
``P(t)``, so the lower and upper transition matrices are assembled column
by column.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .bounds import BoundParams, choose_steps
from .errors import EmptyRowError, InfeasibleError, UnsoundWarning
from .intervals import CONSTRAINT_TOL, IntervalMatrix, IntervalVector, RowPolytope, set_norm
from .linalg import as_matrix
from .propagation import BoundReport, propagate_uniform, step_condition


@dataclass(frozen=True, eq=False)
class GeneratorInterval:
    base: IntervalMatrix
    metzler: bool

    @property
    def n(self):
        return self.base.n


def validate_generator(lo, hi, extra=None):
    """Build the zero-row-sum interval matrix for ``[lo, hi]``.

    Raises:
        EmptyRowError: naming the first row whose bounds cannot sum to zero.
    """
    lo = as_matrix(lo)
    hi = as_matrix(hi, lo.shape[0])
    if np.any(lo > hi):
        i, j = np.argwhere(lo > hi)[0]
        raise ValueError(f"lower bound exceeds upper bound at ({i}, {j})")
    n = lo.shape[0]
    extra = extra or {}
    rows = []
    for i in range(n):
        tol = CONSTRAINT_TOL * (1.0 + np.abs(lo[i]).sum() + np.abs(hi[i]).sum())
        if lo[i].sum() > tol or hi[i].sum() < -tol:
            raise EmptyRowError(i)
        eq = [(np.ones(n), 0.0)] + [(a, b) for kind, a, b in extra.get(i, ()) if kind == "eq"]
        ub = [(a, b) for kind, a, b in extra.get(i, ()) if kind == "le"]
        try:
            rows.append(RowPolytope(lo[i], hi[i], eq, ub))
        except InfeasibleError as exc:
            raise EmptyRowError(i, f"row {i}: {exc}") from exc
    base = IntervalMatrix(rows)
    off = ~np.eye(n, dtype=bool)
    return GeneratorInterval(base=base, metzler=bool(np.all(lo[off] >= 0)))


def steps_for_tolerance(g, t, tol):
    """Uniform step count whose radius on a basis vector is at most ``tol``."""
    return choose_steps(t * set_norm(g.base), tol)


def transition_bounds(g, t, n_steps, witnesses=False):
    """Lower and upper transition matrices at time ``t`` on a uniform grid."""
    n = g.n
    if t < 0:
        raise ValueError("time must be nonnegative")
    if t == 0:
        eye = np.eye(n)
        return BoundReport(lower=eye, upper=eye.copy(), radius=0.0,
                           params=BoundParams(N=n_steps, D=1.0 / n_steps, M=0.0),
                           sound=True, horizon=0.0, witnesses=[] if witnesses else None)
    if not g.metzler:
        warnings.warn("generator interval is not Metzler; bounds are not certified",
                      UnsoundWarning, stacklevel=2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnsoundWarning)
        lows, highs, radii, params, sound, wit = propagate_uniform(
            g.base, list(np.eye(n)), t, n_steps, witnesses=witnesses)
    if not sound and g.metzler:
        warnings.warn("step condition fails on this grid; bounds are not certified",
                      UnsoundWarning, stacklevel=2)
    # row k of the stacks came from e_k, i.e. column k of P(t)
    return BoundReport(lower=lows.T.copy(), upper=highs.T.copy(), radius=radii[0], params=params,
                       sound=sound, horizon=float(t), witnesses=wit)


def transition_operators(g, t, n_steps, x):
    """Apply the lower and upper transition operators to an interval vector."""
    if not isinstance(x, IntervalVector):
        x = IntervalVector.point(x)
    if t == 0:
        return BoundReport(lower=x.lower.copy(), upper=x.upper.copy(), radius=0.0,
                           params=BoundParams(N=n_steps, D=1.0 / n_steps, M=0.0),
                           sound=True, horizon=0.0)
    lows, highs, radii, params, sound, _ = propagate_uniform(g.base, [x], t, n_steps)
    return BoundReport(lower=lows[0], upper=highs[0], radius=radii[0], params=params,
                       sound=sound, horizon=float(t))


def row_sum_diagnostics(report):
    """Row sums of the two transition matrices; every realized P(t) is stochastic."""
    return {
        "lower_row_sums": report.lower.sum(axis=1).tolist(),
        "upper_row_sums": report.upper.sum(axis=1).tolist(),
    }


def is_sound_step(g, t, n_steps):
    return step_condition(g.base, t / n_steps)
