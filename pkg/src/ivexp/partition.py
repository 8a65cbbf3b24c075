"""Time grids: strictly increasing partitions of an interval ``[t_0, t_N]``."""

from dataclasses import dataclass

import numpy as np

from .errors import PartitionError

GAP_TOL = 1e-15


@dataclass(frozen=True, eq=False)
class Partition:
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).ravel()
        if pts.size < 2:
            raise PartitionError("a partition needs at least two points")
        if not np.all(np.isfinite(pts)):
            raise PartitionError("partition points must be finite")
        if np.any(np.diff(pts) <= GAP_TOL):
            raise PartitionError("partition points must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, end, n, start=0.0):
        if n < 1:
            raise PartitionError("uniform partition needs n >= 1")
        return cls(np.linspace(start, end, n + 1))

    @property
    def gaps(self):
        return np.diff(self.points)

    @property
    def start(self):
        return float(self.points[0])

    @property
    def end(self):
        return float(self.points[-1])

    @property
    def size(self):
        return self.points.size - 1

    def __len__(self):
        return self.size

    def __eq__(self, other):
        return isinstance(other, Partition) and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.points.tobytes())

    def issubset(self, other):
        return bool(np.all(np.isin(self.points, other.points)))

    def union(self, other):
        if self.start != other.start or self.end != other.end:
            raise PartitionError("partitions must share endpoints")
        return Partition(np.union1d(self.points, other.points))

    def scaled(self, factor):
        return Partition(self.points * factor)

    def shifted(self, offset):
        return Partition(self.points + offset)

    def __repr__(self):
        return f"Partition({self.points.tolist()})"


def stats(t):
    """Return ``(min gap, max gap, number of gaps)``."""
    g = t.gaps
    return float(g.min()), float(g.max()), t.size


def dyadic_refine(t, n=1):
    """Insert every gap midpoint, ``n`` times over."""
    if n < 0:
        raise ValueError("refinement depth must be nonnegative")
    pts = t.points
    for _ in range(n):
        mids = 0.5 * (pts[:-1] + pts[1:])
        out = np.empty(2 * pts.size - 1)
        out[0::2] = pts
        out[1::2] = mids
        pts = out
    return Partition(pts)


def is_elementary_refinement(t, t_fine):
    """True iff ``t_fine`` contains ``t`` and adds at most one point per gap of ``t``."""
    if t.start != t_fine.start or t.end != t_fine.end:
        raise PartitionError("partitions must share endpoints")
    if not t.issubset(t_fine):
        return False
    # number of fine points strictly inside each coarse gap
    pos = np.searchsorted(t.points, t_fine.points, side="left")
    interior = ~np.isin(t_fine.points, t.points)
    counts = np.bincount(pos[interior], minlength=t.points.size + 1)
    return bool(np.all(counts <= 1))
