"""Independent ground truth for the propagation engine.

Nothing here calls the row LP solver: row polytopes are handled by explicit
vertex enumeration, trajectories are integrated with exact per-piece
matrix exponentials, and the error bounds are checked against directly
computed matrix norms.

Seed splitting: sample ``k`` of a batch started from ``seed`` uses
``np.random.SeedSequence(seed).spawn(count)[k].generate_state(1, np.uint64)[0]``
as its own seed, so serial and parallel runs draw identical sample sets.
"""

import itertools
import math
import weakref
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from . import bounds
from .errors import CapExceededError, DimensionError
from .intervals import IntervalMatrix, IntervalVector, RowPolytope
from .linalg import inf_norm, matrix_exp
from .partition import Partition

VERTEX_TOL = 1e-9
MAX_VERTEX_COMBINATIONS = 200_000

_vertex_cache = weakref.WeakKeyDictionary()


def row_vertices(row):
    """All vertices of a row polytope by enumerating active constraint sets."""
    cached = _vertex_cache.get(row)
    if cached is not None:
        return cached
    n = row.n
    g = np.vstack([-np.eye(n), np.eye(n), row.a_ub])
    h = np.concatenate([-row.lo, row.hi, row.b_ub])
    a_eq, b_eq = row.a_eq, row.b_eq
    rank_eq = np.linalg.matrix_rank(a_eq) if a_eq.size else 0
    k = n - rank_eq
    if math.comb(g.shape[0], k) > MAX_VERTEX_COMBINATIONS:
        raise CapExceededError(f"vertex enumeration of a {n}-dim row is too large")
    found = {}
    for active in itertools.combinations(range(g.shape[0]), k):
        a = np.vstack([a_eq, g[list(active)]]) if a_eq.size else g[list(active)]
        b = np.concatenate([b_eq, h[list(active)]])
        if np.linalg.matrix_rank(a) < n:
            continue
        q, *_ = np.linalg.lstsq(a, b, rcond=None)
        if np.max(np.abs(a @ q - b)) > VERTEX_TOL or not row.contains(q, VERTEX_TOL):
            continue
        key = tuple(np.round(q, 10))
        found.setdefault(key, q)
    verts = np.array([found[k] for k in sorted(found)])
    _vertex_cache[row] = verts
    return verts


def vertex_extremal(row, x, sense="min"):
    """Brute-force row optimum over the enumerated vertices."""
    vals = row_vertices(row) @ np.asarray(x, dtype=float)
    return float(vals.min() if sense == "min" else vals.max())


@dataclass(eq=False)
class TrajectorySample:
    switch_times: Partition
    matrices: list
    endpoint: np.ndarray
    seed: int
    product: np.ndarray = field(repr=False, default=None)


def _random_member_row(row, rng, vertex_fraction):
    verts = row_vertices(row)
    if rng.random() < vertex_fraction or len(verts) == 1:
        return verts[rng.integers(len(verts))].copy()
    w = rng.dirichlet(np.ones(len(verts)))
    return np.clip(w @ verts, row.lo, row.hi)


def random_member(q, rng, vertex_fraction=0.5):
    """A random member of the set: each row a vertex or a random convex mix of vertices."""
    return np.array([_random_member_row(r, rng, vertex_fraction) for r in q.rows])


def sample_trajectory(q, x0, horizon, pieces, seed, vertex_fraction=0.5):
    """One admissible piecewise-constant trajectory, reproducible from ``seed``.

    The endpoint is ``e^{d_N Q_N} ... e^{d_1 Q_1} x0`` with ``d_k`` the
    piece lengths in time order.
    """
    if pieces < 1:
        raise ValueError("pieces must be >= 1")
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (q.n,):
        raise DimensionError(f"x0 must have length {q.n}")
    rng = np.random.default_rng(seed)
    while True:
        inner = np.sort(rng.uniform(0.0, horizon, pieces - 1))
        pts = np.concatenate([[0.0], inner, [horizon]])
        if np.all(np.diff(pts) > 1e-12 * max(horizon, 1.0)):
            break
    grid = Partition(pts)
    mats = [random_member(q, rng, vertex_fraction) for _ in range(pieces)]
    prod = np.eye(q.n)
    for d, m in zip(grid.gaps, mats):
        prod = matrix_exp(d * m) @ prod
    return TrajectorySample(switch_times=grid, matrices=mats, endpoint=prod @ x0,
                            seed=int(seed), product=prod)


def spawn_seeds(seed, count):
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, np.uint64)[0]) for c in children]


def sample_many(q, x0, horizon, count, seed, max_pieces=4, vertex_fraction=0.5):
    """``count`` samples; sample ``k`` draws its piece count and matrices from its own seed."""
    out = []
    for s in spawn_seeds(seed, count):
        pieces = int(np.random.default_rng([s, 1]).integers(1, max_pieces + 1))
        out.append(sample_trajectory(q, x0, horizon, pieces, s, vertex_fraction))
    return out


def vertex_matrices(q):
    per_row = [row_vertices(r) for r in q.rows]
    return np.array([np.array(rows) for rows in itertools.product(*per_row)])


def brute_force_envelope(q, x0, grid, factors="linear", max_vectors=2_000_000):
    """Componentwise min/max of ``x0`` pushed through every vertex-matrix choice per gap.

    With ``factors="linear"`` each gap applies ``I + d Q``, matching
    :func:`ivexp.propagation.propagate`; ``"exponential"`` applies ``e^{d Q}``.
    Caps: dimension 3, four gaps, six vertices per row.
    """
    if q.n > 3 or grid.size > 4:
        raise CapExceededError("brute force is limited to n <= 3 and at most 4 gaps")
    per_row = [len(row_vertices(r)) for r in q.rows]
    if max(per_row) > 6:
        raise CapExceededError(f"rows have {per_row} vertices; cap is 6")
    mats = vertex_matrices(q)
    n = q.n
    vecs = np.asarray(x0, dtype=float).reshape(1, n)
    eye = np.eye(n)
    for d in grid.gaps:
        if factors == "linear":
            steps = eye + d * mats
        elif factors == "exponential":
            steps = np.array([matrix_exp(d * m) for m in mats])
        else:
            raise ValueError(f"unknown factor kind {factors!r}")
        if len(steps) * len(vecs) > max_vectors:
            raise CapExceededError("brute-force enumeration exceeds its vector cap")
        vecs = np.einsum("mij,kj->mki", steps, vecs).reshape(-1, n)
        vecs = np.unique(vecs, axis=0)
    return IntervalVector(vecs.min(axis=0), vecs.max(axis=0))


# -- domination checks -------------------------------------------------------

@dataclass
class DominationResult:
    samples: int
    violations: int
    max_excess: float
    max_tightness: float
    face_gaps: dict

    @property
    def ok(self):
        return self.violations == 0


def check_domination(report, samples, slack=1e-9, x0=None):
    """Count samples escaping the report's endpoints widened by radius + slack.

    Matrix reports are compared against each sample's full product, vector
    reports against its endpoint.  ``face_gaps`` gives, for the lower and
    upper faces, the smallest distance of any sample to that face as a
    fraction of the interval width (zero-width entries give 0).
    """
    lo, hi = report.lower, report.upper
    if lo.ndim == 2:
        pts = np.array([s.product for s in samples])
    else:
        pts = np.array([s.endpoint if x0 is None else s.product @ x0 for s in samples])
    r = report.radius + slack
    below = pts < lo - r
    above = pts > hi + r
    bad = np.any((below | above).reshape(len(pts), -1), axis=1)
    excess = np.maximum(lo - r - pts, pts - hi - r).max() if len(pts) else 0.0
    width = hi - lo
    span = pts.max(axis=0) - pts.min(axis=0)
    tiny = width <= 1e-12
    tight = np.where(tiny, np.where(span <= 1e-9, 1.0, np.inf), span / np.where(tiny, 1.0, width))
    safe_w = np.where(tiny, 1.0, width)
    lower_gap = np.where(tiny, 0.0, (pts.min(axis=0) - lo) / safe_w)
    upper_gap = np.where(tiny, 0.0, (hi - pts.max(axis=0)) / safe_w)
    return DominationResult(
        samples=len(pts),
        violations=int(bad.sum()),
        max_excess=float(excess),
        max_tightness=float(tight.max()),
        face_gaps={"lower": lower_gap, "upper": upper_gap},
    )


# -- randomized checks of the closed-form inequalities --------------------------

@dataclass
class FuzzReport:
    kind: str
    trials: int
    violations: int
    max_ratio: float

    @property
    def ok(self):
        return self.violations == 0


def random_matrix(rng, dim, max_norm=4.0, norm=None):
    """Entries uniform in [-2, 2], rescaled to a target infinity norm."""
    a = rng.uniform(-2.0, 2.0, (dim, dim))
    target = rng.uniform(0.0, max_norm) if norm is None else norm
    cur = inf_norm(a)
    return a * (target / cur) if cur > 0 else a


def _prod(mats, dim):
    return reduce(np.matmul, mats, np.eye(dim))


def _trial(kind, rng):
    """Return ``(lhs, rhs)`` for one random instance of the named inequality."""
    dim = int(rng.integers(2, 5))
    P = bounds.BoundParams
    if kind == "scalar_exp":
        x = rng.uniform(0.0, 4.0)
        return math.exp(x) - 1.0 - x, bounds.appendix_bound(kind, P(M=x))
    if kind in ("exp_norm", "linear_one"):
        qm = random_matrix(rng, dim)
        m = inf_norm(qm)
        e = matrix_exp(qm)
        lhs = inf_norm(e) if kind == "exp_norm" else inf_norm(e - np.eye(dim) - qm)
        return lhs, bounds.appendix_bound(kind, P(M=m))
    if kind in ("linear_two", "pairwise_exp"):
        q1, q2 = random_matrix(rng, dim), random_matrix(rng, dim)
        m = max(inf_norm(q1), inf_norm(q2))
        e12 = matrix_exp(q1) @ matrix_exp(q2)
        if kind == "linear_two":
            lhs = inf_norm(e12 - np.eye(dim) - q1 - q2)
        else:
            lhs = inf_norm(e12 - matrix_exp(q1 + q2))
        return lhs, bounds.appendix_bound(kind, P(M=m))
    if kind == "composition":
        n = int(rng.integers(1, 6))
        f = [random_matrix(rng, dim, max_norm=2.0) for _ in range(n)]
        fp = [a + random_matrix(rng, dim, max_norm=0.5) for a in f]
        m = max(inf_norm(a) for a in f + fp)
        d = max(inf_norm(a - b) for a, b in zip(f, fp))
        lhs = inf_norm(_prod(f, dim) - _prod(fp, dim))
        return lhs, bounds.appendix_bound(kind, P(n=n, d=d, M=m))
    if kind == "matrix_power":
        n = int(rng.integers(1, 7))
        a1 = random_matrix(rng, dim, max_norm=2.0)
        a2 = a1 + random_matrix(rng, dim, max_norm=0.5) if rng.random() < 0.5 else random_matrix(rng, dim, 2.0)
        m = max(inf_norm(a1), inf_norm(a2))
        lhs = inf_norm(np.linalg.matrix_power(a1, n) - np.linalg.matrix_power(a2, n))
        return lhs, bounds.appendix_bound(kind, P(n=n, d=inf_norm(a1 - a2), M=m))
    if kind == "linear_chain":
        n = int(rng.integers(1, 7))
        qs = [random_matrix(rng, dim, max_norm=4.0 / n) for _ in range(n)]
        norms = [inf_norm(a) for a in qs]
        lhs = inf_norm(_prod([matrix_exp(a) for a in qs], dim)
                       - _prod([np.eye(dim) + a for a in qs], dim))
        return lhs, bounds.appendix_bound(kind, P(n=n, M=max(norms), sum_norms=sum(norms)))
    if kind == "refining":
        n = int(rng.integers(1, 6))
        m = rng.uniform(0.0, 4.0)
        qp = [random_matrix(rng, dim, norm=rng.uniform(0.0, m)) for _ in range(n)]
        qpp = [random_matrix(rng, dim, norm=rng.uniform(0.0, m)) for _ in range(n)]
        t = rng.dirichlet(np.ones(2 * n))
        tp, tpp = t[:n], t[n:]
        split = _prod([matrix_exp(a * qa) @ matrix_exp(b * qb)
                       for a, qa, b, qb in zip(tp, qp, tpp, qpp)], dim)
        ti = tp + tpp
        merged = _prod([matrix_exp(ti[i] * ((tp[i] * qp[i] + tpp[i] * qpp[i]) / ti[i]))
                        for i in range(n)], dim)
        q_max = float(t.max())
        return inf_norm(split - merged), bounds.appendix_bound(kind, P(n=n, q=q_max, M=m))
    raise ValueError(f"unknown inequality kind {kind!r}")


def inequality_fuzz(kind, trials, seed):
    """Evaluate both sides of one inequality on ``trials`` random instances."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    violations = 0
    max_ratio = 0.0
    for _ in range(trials):
        lhs, rhs = _trial(kind, rng)
        if lhs > rhs * (1.0 + 1e-9) + 1e-12:
            violations += 1
        if rhs > 0:
            max_ratio = max(max_ratio, lhs / rhs)
    return FuzzReport(kind=kind, trials=trials, violations=violations, max_ratio=max_ratio)


# -- random instances ----------------------------------------------------------

def random_interval_matrix(rng, n, zero_row_sums=False, metzler=True, extra_ineq=False,
                           max_width=1.5):
    """A random interval matrix with box rows, optionally zero-sum and with one extra cut.

    Off-diagonal lower bounds are nonnegative when ``metzler`` is set.
    """
    lo = rng.uniform(0.0 if metzler else -1.0, 2.0, (n, n))
    hi = lo + rng.uniform(0.0, max_width, (n, n))
    off = ~np.eye(n, dtype=bool)
    for i in range(n):
        if zero_row_sums:
            lo[i, i] = -hi[i][off[i]].sum() - rng.uniform(0.0, 0.5)
            hi[i, i] = -lo[i][off[i]].sum() + rng.uniform(0.0, 0.5)
        else:
            lo[i, i] = rng.uniform(-3.0, 0.5)
            hi[i, i] = lo[i, i] + rng.uniform(0.0, max_width)
    rows = []
    for i in range(n):
        eq = [(np.ones(n), 0.0)] if zero_row_sums else []
        ub = []
        if extra_ineq:
            probe = RowPolytope(lo[i], hi[i], eq)
            p = probe._feasible_point
            a = rng.normal(size=n)
            ub = [(a, float(a @ p) + rng.uniform(0.0, 0.5))]
        rows.append(RowPolytope(lo[i], hi[i], eq, ub))
    return IntervalMatrix(rows)
