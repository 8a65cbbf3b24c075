"""Interval vectors and interval matrices with separately specified rows.

Each row of an :class:`IntervalMatrix` lives in its own :class:`RowPolytope`
(box bounds plus linear constraints), so a componentwise minimum or maximum
of ``Q @ x`` over the whole set splits into one small LP per row.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError, InfeasibleError, MonotonicityViolation
from .linalg import as_matrix, as_vector
from .simplex import solve_lp

CONSTRAINT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class IntervalVector:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = as_vector(self.lower)
        hi = as_vector(self.upper, lo.size)
        if np.any(lo > hi):
            raise ValueError("interval vector needs lower <= upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def point(cls, x):
        x = as_vector(x)
        return cls(x, x.copy())

    @property
    def n(self):
        return self.lower.size

    @property
    def degenerate(self):
        return bool(np.array_equal(self.lower, self.upper))

    @property
    def width(self):
        return self.upper - self.lower

    def norm(self):
        """Largest max-norm over the two endpoints (bounds the norm of every member)."""
        return float(max(np.max(np.abs(self.lower)), np.max(np.abs(self.upper))))

    def contains(self, x, slack=0.0):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - slack) and np.all(x <= self.upper + slack))

    def __repr__(self):
        return f"IntervalVector(lower={self.lower.tolist()}, upper={self.upper.tolist()})"


class RowPolytope:
    """One row set: ``lo <= q <= hi`` plus ``a @ q == b`` and ``a @ q <= b`` constraints.

    Non-emptiness is checked on construction, so every later optimization
    over the row is total.
    """

    def __init__(self, lo, hi, eq_constraints=(), ineq_constraints=()):
        self.lo = as_vector(lo)
        self.hi = as_vector(hi, self.lo.size)
        if np.any(self.lo > self.hi):
            raise ValueError("row bounds need lo <= hi")
        n = self.lo.size
        self.eq_constraints = tuple((as_vector(a, n), float(b)) for a, b in eq_constraints)
        self.ineq_constraints = tuple((as_vector(a, n), float(b)) for a, b in ineq_constraints)
        self.a_eq = np.array([a for a, _ in self.eq_constraints]).reshape(-1, n)
        self.b_eq = np.array([b for _, b in self.eq_constraints], dtype=float)
        self.a_ub = np.array([a for a, _ in self.ineq_constraints]).reshape(-1, n)
        self.b_ub = np.array([b for _, b in self.ineq_constraints], dtype=float)
        self._feasible_point = self._minimize(np.zeros(n))[1]

    @property
    def n(self):
        return self.lo.size

    @property
    def n_constraints(self):
        return len(self.eq_constraints) + len(self.ineq_constraints)

    @property
    def is_point(self):
        return bool(np.array_equal(self.lo, self.hi))

    def contains(self, q, tol=CONSTRAINT_TOL):
        q = np.asarray(q, dtype=float)
        if np.any(q < self.lo - tol) or np.any(q > self.hi + tol):
            return False
        if self.a_eq.size and np.any(np.abs(self.a_eq @ q - self.b_eq) > tol):
            return False
        if self.a_ub.size and np.any(self.a_ub @ q - self.b_ub > tol):
            return False
        return True

    def _minimize(self, c):
        if self.n_constraints == 0:
            q = np.where(c < 0, self.hi, self.lo)
            return float(c @ q), q
        if self.n_constraints == 1:
            return _knapsack(c, self)
        res = solve_lp(c, self.lo, self.hi, self.a_eq, self.b_eq, self.a_ub, self.b_ub)
        return res.value, res.x

    @cached_property
    def entry_bounds(self):
        """Exact per-entry (min, max) over the polytope."""
        n = self.n
        mins = np.empty(n)
        maxs = np.empty(n)
        for j in range(n):
            e = np.zeros(n)
            e[j] = 1.0
            mins[j] = self._minimize(e)[0]
            maxs[j] = -self._minimize(-e)[0]
        return mins, maxs

    def __repr__(self):
        return (f"RowPolytope(lo={self.lo.tolist()}, hi={self.hi.tolist()}, "
                f"eq={len(self.eq_constraints)}, ineq={len(self.ineq_constraints)})")


def _knapsack(c, row):
    """Exact minimizer for a box with a single linear constraint.

    Walks the Lagrangian breakpoints ``c_j / a_j`` in ascending order
    (stable, so ties resolve to the lowest index) and flips coordinates
    from their low-``a`` end to their high-``a`` end until the constraint
    level is met; at most one coordinate ends fractional, so the result
    is a vertex.
    """
    if row.eq_constraints:
        (a, b), is_eq = row.eq_constraints[0], True
    else:
        (a, b), is_eq = row.ineq_constraints[0], False
    lo, hi = row.lo, row.hi
    q = np.where(c < 0, hi, lo)
    level = float(a @ q)
    if not is_eq and level <= b + CONSTRAINT_TOL * (1.0 + abs(b)):
        return float(c @ q), q
    # start from the point minimizing a @ q among coordinates that take part
    active = a != 0
    q = np.where(active, np.where(a > 0, lo, hi), q)
    level = float(a @ q)
    if level > b + CONSTRAINT_TOL * (1.0 + abs(b)):
        raise InfeasibleError("single-constraint row is infeasible")
    idx = np.nonzero(active)[0]
    order = idx[np.argsort(c[idx] / a[idx], kind="stable")]
    for j in order:
        gain = abs(a[j]) * (hi[j] - lo[j])
        if level + gain >= b:
            step = (b - level) / abs(a[j])
            q[j] = lo[j] + step if a[j] > 0 else hi[j] - step
            level = b
            break
        q[j] = hi[j] if a[j] > 0 else lo[j]
        level += gain
    if level < b - CONSTRAINT_TOL * (1.0 + abs(b)):
        raise InfeasibleError("single-constraint row is infeasible")
    q = np.clip(q, lo, hi)
    return float(c @ q), q


def row_extremal(row, x, sense="min"):
    """Optimize ``q @ x`` over one row polytope.

    Returns ``(value, argrow)`` where ``argrow`` is a feasible vertex.
    """
    x = as_vector(x, row.n)
    if sense == "min":
        value, q = row._minimize(x)
        return value, q
    if sense == "max":
        value, q = row._minimize(-x)
        return -value, q
    raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")


class IntervalMatrix:
    """A compact convex set of square matrices given row by row."""

    def __init__(self, rows):
        rows = list(rows)
        if not rows:
            raise DimensionError("interval matrix needs at least one row")
        n = len(rows)
        for i, r in enumerate(rows):
            if r.n != n:
                raise DimensionError(f"row {i} has dimension {r.n}, expected {n}")
        self.rows = tuple(rows)

    @classmethod
    def from_bounds(cls, lo, hi, zero_row_sums=False, extra=None):
        """Build from entrywise bounds.

        ``extra`` maps a row index to a list of ``(kind, coefficients, rhs)``
        with ``kind`` either ``"eq"`` or ``"le"``.
        """
        lo = as_matrix(lo)
        hi = as_matrix(hi, lo.shape[0])
        n = lo.shape[0]
        extra = extra or {}
        rows = []
        for i in range(n):
            eq = [(np.ones(n), 0.0)] if zero_row_sums else []
            ub = []
            for kind, a, b in extra.get(i, ()):
                if kind == "eq":
                    eq.append((a, b))
                elif kind == "le":
                    ub.append((a, b))
                else:
                    raise ValueError(f"unknown constraint kind {kind!r}")
            try:
                rows.append(RowPolytope(lo[i], hi[i], eq, ub))
            except InfeasibleError as exc:
                raise InfeasibleError(f"row {i}: {exc}") from exc
        return cls(rows)

    @classmethod
    def point(cls, q):
        q = as_matrix(q)
        return cls(RowPolytope(r, r) for r in q)

    @property
    def n(self):
        return len(self.rows)

    @property
    def lo(self):
        return np.array([r.lo for r in self.rows])

    @property
    def hi(self):
        return np.array([r.hi for r in self.rows])

    @property
    def is_point(self):
        return all(r.is_point for r in self.rows)

    def contains(self, q, tol=CONSTRAINT_TOL):
        q = as_matrix(q, self.n)
        return all(r.contains(q[i], tol) for i, r in enumerate(self.rows))

    @cached_property
    def entry_min(self):
        return np.array([r.entry_bounds[0] for r in self.rows])

    @cached_property
    def entry_max(self):
        return np.array([r.entry_bounds[1] for r in self.rows])

    def feasible_member(self):
        return np.array([r._feasible_point for r in self.rows])

    def scaled(self, factor):
        """The set ``factor * Q`` for a nonnegative scalar."""
        if factor < 0:
            raise ValueError("scale factor must be nonnegative")
        return IntervalMatrix(
            RowPolytope(factor * r.lo, factor * r.hi,
                        [(a, factor * b) for a, b in r.eq_constraints],
                        [(a, factor * b) for a, b in r.ineq_constraints])
            for r in self.rows)

    @cached_property
    def _shared_structure(self):
        """``(lo, hi, a, b)`` when every row is a box, or a box cut by one
        equality sharing its coefficients ``a`` across rows; else ``None``.

        Such sets are optimized for all rows at once in :func:`_batch_minimize`.
        """
        rows = self.rows
        if all(r.n_constraints == 0 for r in rows):
            return self.lo, self.hi, None, None
        if all(len(r.eq_constraints) == 1 and not r.ineq_constraints for r in rows):
            a = rows[0].eq_constraints[0][0]
            if all(np.array_equal(r.eq_constraints[0][0], a) for r in rows):
                b = np.array([r.eq_constraints[0][1] for r in rows])
                return self.lo, self.hi, a, b
        return None

    def __repr__(self):
        return f"IntervalMatrix(n={self.n}, rows={list(self.rows)!r})"


def _batch_minimize(structure, c):
    """Row-wise minimizers of ``c[k] @ q`` for a set with shared structure.

    ``c`` has shape ``(K, n)``; returns values ``(K, n)`` and minimizing
    matrices ``(K, n, n)``.  Each cost vector is handled by the same
    breakpoint walk as :func:`_knapsack`, with one sort per cost vector
    shared by all rows.
    """
    lo, hi, a, b = structure
    c = np.atleast_2d(c)
    kdim, n = c.shape
    if a is None:
        q = np.where(c[:, None, :] < 0, hi, lo)
        return np.einsum("krn,kn->kr", q, c), q
    active = a != 0
    ratio = np.where(active, c / np.where(active, a, 1.0), np.inf)
    order = np.argsort(ratio, axis=1, kind="stable")
    # everything below is in breakpoint order, shape (K, rows, n)
    a_o = a[order][:, None, :]
    c_o = np.take_along_axis(c, order, axis=1)[:, None, :]
    lo_o = lo[:, order].transpose(1, 0, 2)
    hi_o = hi[:, order].transpose(1, 0, 2)
    start = np.where(a_o > 0, lo_o, np.where(a_o < 0, hi_o, np.where(c_o < 0, hi_o, lo_o)))
    end = np.where(a_o > 0, hi_o, np.where(a_o < 0, lo_o, start))
    gains = np.abs(a_o) * (hi_o - lo_o)
    level = np.einsum("krn,kn->kr", start, a[order])
    cum = np.cumsum(np.concatenate([level[..., None], gains], axis=2), axis=2)
    reach = (cum[..., 1:] >= b[None, :, None]) & (a_o != 0)
    hit = reach.any(axis=2)
    k = np.where(hit, reach.argmax(axis=2), n)
    vals = np.where(np.arange(n) < k[..., None], end, start)
    ki, ri = np.nonzero(hit)
    if ki.size:
        kk = k[ki, ri]
        aj = a_o[ki, 0, kk]
        step = (b[ri] - cum[ki, ri, kk]) / np.abs(aj)
        vals[ki, ri, kk] = np.where(aj > 0, lo_o[ki, ri, kk] + step, hi_o[ki, ri, kk] - step)
    q = np.empty_like(vals)
    q[np.arange(kdim)[:, None, None], np.arange(lo.shape[0])[None, :, None], order[:, None, :]] = vals
    q = np.clip(q, lo, hi)
    return np.einsum("krn,kn->kr", q, c), q


def _image(q, x, sense):
    x = as_vector(x, q.n)
    structure = q._shared_structure
    if structure is not None:
        sign = 1.0 if sense == "min" else -1.0
        values, arg = _batch_minimize(structure, sign * x[None, :])
        return sign * values[0], arg[0]
    values = np.empty(q.n)
    arg = np.empty((q.n, q.n))
    for i, row in enumerate(q.rows):
        values[i], arg[i] = row_extremal(row, x, sense)
    return values, arg


def lower_image(q, x):
    """Componentwise minimum of ``Q @ x`` over the set and a matrix attaining it."""
    return _image(q, x, "min")


def upper_image(q, x):
    return _image(q, x, "max")


def is_nonnegative(q):
    """True when every member of ``q`` is entrywise nonnegative."""
    return bool(np.all(q.entry_min >= 0.0))


def interval_image(q, xiv):
    """Image of an interval vector: ``[lower_image(x_lo), upper_image(x_hi)]``.

    Exact only when every member preserves the componentwise order, so a
    non-degenerate input requires an entrywise nonnegative set.
    """
    if xiv.n != q.n:
        raise DimensionError(f"interval vector has length {xiv.n}, matrix set is {q.n}x{q.n}")
    if not xiv.degenerate and not is_nonnegative(q):
        raise MonotonicityViolation("interval image needs entrywise nonnegative matrices")
    lo, _ = lower_image(q, xiv.lower)
    hi, _ = upper_image(q, xiv.upper)
    return IntervalVector(lo, np.maximum(hi, lo))


def set_norm(q):
    """Upper bound on the largest infinity norm in the set, from the box bounds alone."""
    return float(np.max(np.sum(np.maximum(np.abs(q.lo), np.abs(q.hi)), axis=1)))
