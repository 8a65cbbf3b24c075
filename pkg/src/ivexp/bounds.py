"""Closed-form a-priori error bounds.

Every function here is a plain real formula in the grid statistics
(``N`` gaps, max gap ``D``, min gap ``d``) and the set norm ``M``.  They
serve as report radii, as the step-count selector and as right-hand sides
for the randomized inequality checks in :mod:`ivexp.oracle`.
"""

import math
from dataclasses import dataclass, replace

from .errors import BoundParamError, ToleranceUnreachable

MAX_STEPS = 2 ** 30


@dataclass(frozen=True)
class BoundParams:
    N: int | None = None
    D: float | None = None
    d: float | None = None
    M: float | None = None
    n: int | None = None
    q: float | None = None
    sum_norms: float | None = None

    def __post_init__(self):
        for name in ("N", "D", "d", "M", "n", "q", "sum_norms"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise BoundParamError(f"{name} must be nonnegative, got {v}")
        if self.d is not None and self.D is not None and self.d > self.D:
            raise BoundParamError("min gap d cannot exceed max gap D")

    def with_(self, **kw):
        return replace(self, **kw)

    def as_dict(self):
        return {k: v for k, v in self.__dict__.items() if v is not None}


def A_bound(N, D, M):
    """Drift of the exponential-product set under one elementary refinement."""
    dm = D * M
    return N * dm * dm * math.exp((1.0 + D) * M) * (1.5 + 3.0 * math.exp(dm))


def exp_set_distance_bound(N, D, M):
    """Hausdorff distance from the grid-restricted product set to the full exponential."""
    return 2.0 * A_bound(N, D, M)


def exp_set_distance_bound_gaps(D, d, M):
    """Same distance expressed with the min gap, using ``N <= 1/d`` on the unit interval."""
    return 2.0 * D * D / d * M * M * math.exp((1.0 + D) * M) * (1.5 + 3.0 * math.exp(D * M))


def linear_product_bound(N, D, M):
    """Distance from any member of the exponential to a product of linear factors on the grid."""
    dm = D * M
    return N * dm * dm * (2.0 * math.exp((1.0 + D) * M) * (1.5 + 3.0 * math.exp(dm))
                          + 0.5 * math.exp(M))


def uniform_linear_bound(N, M):
    return linear_product_bound(N, 1.0 / N, M)


def choose_steps(M, tol, cap=MAX_STEPS):
    """Smallest ``N`` whose uniform-grid linear-product bound is at most ``tol``.

    Doubling to bracket, then bisection; the bound is decreasing in ``N``.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if uniform_linear_bound(1, M) <= tol:
        return 1
    hi = 1
    while uniform_linear_bound(hi, M) > tol:
        if hi >= cap:
            raise ToleranceUnreachable(f"tolerance {tol:g} needs more than {cap} steps at M={M:g}")
        hi = min(2 * hi, cap)
    lo = hi // 2  # bound(lo) > tol
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if uniform_linear_bound(mid, M) <= tol:
            hi = mid
        else:
            lo = mid
    return hi


def _need(params, kind, *names):
    vals = []
    for name in names:
        v = getattr(params, name)
        if v is None:
            raise BoundParamError(f"bound kind {kind!r} needs parameter {name!r}")
        vals.append(v)
    return vals


def _composition(p):
    n, d, M = _need(p, "composition", "n", "d", "M")
    return n * d * M ** (n - 1)


def _matrix_power(p):
    n, d, M = _need(p, "matrix_power", "n", "d", "M")
    return n * M ** (n - 1) * d


def _half_square_exp(p, kind):
    (M,) = _need(p, kind, "M")
    return 0.5 * M * M * math.exp(M)


def _exp_norm(p):
    (M,) = _need(p, "exp_norm", "M")
    return math.exp(M)


def _linear_two(p):
    (M,) = _need(p, "linear_two", "M")
    em = math.exp(M)
    return M * M * em * (1.5 + em)


def _pairwise_exp(p):
    (M,) = _need(p, "pairwise_exp", "M")
    em = math.exp(M)
    return M * M * em * (1.5 + 3.0 * em)


def _linear_chain(p):
    n, M, s = _need(p, "linear_chain", "n", "M", "sum_norms")
    return 0.5 * n * M * M * math.exp(s)


def _refining(p):
    n, q, M = _need(p, "refining", "n", "q", "M")
    qm = q * M
    return n * qm * qm * math.exp((q + 1.0) * M) * (1.5 + 3.0 * math.exp(qm))


_KINDS = {
    "composition": _composition,
    "matrix_power": _matrix_power,
    "scalar_exp": lambda p: _half_square_exp(p, "scalar_exp"),
    "exp_norm": _exp_norm,
    "linear_one": lambda p: _half_square_exp(p, "linear_one"),
    "linear_two": _linear_two,
    "pairwise_exp": _pairwise_exp,
    "linear_chain": _linear_chain,
    "refining": _refining,
}

KINDS = tuple(_KINDS)


def appendix_bound(kind, params):
    try:
        fn = _KINDS[kind]
    except KeyError:
        raise BoundParamError(f"unknown bound kind {kind!r}; expected one of {KINDS}") from None
    return float(fn(params))
