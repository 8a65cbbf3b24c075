"""Small dense two-phase simplex for box-bounded linear programs.

Solves::

    minimize    c @ q
    subject to  lo <= q <= hi,  a_eq @ q == b_eq,  a_ub @ q <= b_ub

The box is shifted to ``0 <= y <= hi - lo`` and each upper bound becomes an
explicit row with its own slack, which keeps the tableau code short; rows
here have at most a few dozen variables so the extra rows cost nothing.
Pivoting follows Bland's rule (lowest index enters, lowest basic index
leaves on ties), so degenerate problems terminate and the returned vertex
is deterministic.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError, UnboundedError

PIVOT_TOL = 1e-11
FEAS_TOL = 1e-9


@dataclass(frozen=True)
class LPResult:
    value: float
    x: np.ndarray
    pivots: int


def _pivot(tab, cost, basis, row, col):
    tab[row] /= tab[row, col]
    for i in range(tab.shape[0]):
        if i != row and tab[i, col] != 0.0:
            tab[i] -= tab[i, col] * tab[row]
    if cost[col] != 0.0:
        cost -= cost[col] * tab[row]
    basis[row] = col


def _run(tab, cost, basis, ncols, max_iter):
    """Iterate Bland's rule on columns ``< ncols``; returns pivot count."""
    it = 0
    while True:
        entering = -1
        for j in range(ncols):
            if cost[j] < -PIVOT_TOL:
                entering = j
                break
        if entering < 0:
            return it
        col = tab[:, entering]
        leave = -1
        best = np.inf
        for i in range(tab.shape[0]):
            if col[i] > PIVOT_TOL:
                ratio = tab[i, -1] / col[i]
                if ratio < best - 1e-14 or (abs(ratio - best) <= 1e-14 and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            raise UnboundedError("linear program is unbounded")
        _pivot(tab, cost, basis, leave, entering)
        it += 1
        if it > max_iter:
            raise RuntimeError("simplex iteration limit reached")


def solve_lp(c, lo, hi, a_eq=None, b_eq=None, a_ub=None, b_ub=None):
    """Minimize ``c @ q`` over the box and linear constraints.

    Returns an :class:`LPResult` whose ``x`` is a vertex of the feasible set.

    Raises:
        InfeasibleError: if no point satisfies the constraints.
    """
    c = np.asarray(c, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    n = c.size
    a_eq = np.zeros((0, n)) if a_eq is None else np.atleast_2d(np.asarray(a_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.atleast_1d(np.asarray(b_eq, dtype=float))
    a_ub = np.zeros((0, n)) if a_ub is None else np.atleast_2d(np.asarray(a_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.atleast_1d(np.asarray(b_ub, dtype=float))
    if np.any(hi < lo):
        raise InfeasibleError("box has hi < lo")
    width = hi - lo
    m_eq, m_ub = a_eq.shape[0], a_ub.shape[0]

    # columns: y (n) | ub slacks (m_ub) | box slacks (n) | artificials (k)
    rhs_eq = b_eq - a_eq @ lo
    rhs_ub = b_ub - a_ub @ lo
    need_art = list(range(m_eq)) + [m_eq + i for i in range(m_ub) if rhs_ub[i] < 0]
    m = m_eq + m_ub + n
    nreal = n + m_ub + n
    ncols = nreal + len(need_art)
    tab = np.zeros((m, ncols + 1))
    basis = np.full(m, -1, dtype=int)

    for i in range(m_eq):
        sign = -1.0 if rhs_eq[i] < 0 else 1.0
        tab[i, :n] = sign * a_eq[i]
        tab[i, -1] = sign * rhs_eq[i]
    for i in range(m_ub):
        r = m_eq + i
        sign = -1.0 if rhs_ub[i] < 0 else 1.0
        tab[r, :n] = sign * a_ub[i]
        tab[r, n + i] = sign
        tab[r, -1] = sign * rhs_ub[i]
        if sign > 0:
            basis[r] = n + i
    for j in range(n):
        r = m_eq + m_ub + j
        tab[r, j] = 1.0
        tab[r, n + m_ub + j] = 1.0
        tab[r, -1] = width[j]
        basis[r] = n + m_ub + j
    for k, r in enumerate(need_art):
        tab[r, nreal + k] = 1.0
        basis[r] = nreal + k

    max_iter = 50 * (m + ncols) + 100
    pivots = 0
    if need_art:
        cost = np.zeros(ncols + 1)
        cost[nreal:ncols] = 1.0
        for r in need_art:
            cost -= tab[r]
        pivots += _run(tab, cost, basis, ncols, max_iter)
        scale = 1.0 + float(np.max(np.abs(tab[:, -1])))
        if -cost[-1] > FEAS_TOL * scale:
            raise InfeasibleError(f"infeasible constraints (phase-1 residual {-cost[-1]:.3g})")
        keep = np.ones(m, dtype=bool)
        for r in range(m):
            if basis[r] >= nreal:
                cand = np.nonzero(np.abs(tab[r, :nreal]) > PIVOT_TOL)[0]
                if cand.size:
                    _pivot(tab, np.zeros(ncols + 1), basis, r, int(cand[0]))
                else:
                    keep[r] = False
        tab = tab[keep]
        basis = basis[keep]
        tab = np.hstack([tab[:, :nreal], tab[:, -1:]])

    cost = np.zeros(nreal + 1)
    cost[:n] = c
    for r in range(tab.shape[0]):
        cb = cost[basis[r]]
        if cb != 0.0:
            cost -= cb * tab[r]
    pivots += _run(tab, cost, basis, nreal, max_iter)

    y = np.zeros(nreal)
    y[basis] = tab[:, -1]
    q = np.clip(lo + y[:n], lo, hi)
    return LPResult(value=float(c @ q), x=q, pivots=pivots)


def is_feasible(lo, hi, a_eq=None, b_eq=None, a_ub=None, b_ub=None):
    try:
        solve_lp(np.zeros(len(lo)), lo, hi, a_eq, b_eq, a_ub, b_ub)
    except InfeasibleError:
        return False
    return True
