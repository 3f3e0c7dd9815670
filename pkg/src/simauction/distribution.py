"""Discretization of the value distribution and opponent-bid measures.

The atomless per-object value distribution F is approximated by m quantile
midpoints with equal weight; the two-object type grid is the product of two
such marginals. A strategy on the type grid pushes the grid weights forward
to a probability mass function over bid pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .model import BidGrid, BidPair, TypePoint

MASS_TOL = 1e-12

#: Row/column meaning in the 3x3 region table of cumulative_masses.
BELOW, EQUAL, ABOVE = 0, 1, 2


@dataclass(frozen=True)
class MarginalDist:
    """Per-object value distribution on [0,1]: uniform, or a continuous
    piecewise-linear CDF given by knots. Atoms (vertical CDF jumps) are
    rejected."""

    kind: str
    knots: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        if self.kind == "uniform":
            if self.knots:
                raise ValueError("uniform distribution takes no knots")
            return
        if self.kind != "piecewise":
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        ks = tuple((float(x), float(f)) for x, f in self.knots)
        object.__setattr__(self, "knots", ks)
        if len(ks) < 2:
            raise ValueError("piecewise CDF needs at least two knots")
        if ks[0] != (0.0, 0.0) or ks[-1] != (1.0, 1.0):
            raise ValueError("piecewise CDF must start at (0,0) and end at (1,1)")
        for (x0, f0), (x1, f1) in zip(ks, ks[1:]):
            if x1 < x0 or f1 < f0:
                raise ValueError(f"CDF knots must be nondecreasing, got ({x0},{f0}) -> ({x1},{f1})")
            if x1 == x0 and f1 > f0:
                raise ValueError(f"CDF jumps at x={x0}: the distribution must be atomless")

    @classmethod
    def uniform(cls) -> "MarginalDist":
        return cls("uniform")

    @classmethod
    def piecewise_linear(cls, knots: Iterable[Sequence[float]]) -> "MarginalDist":
        return cls("piecewise", tuple((x, f) for x, f in knots))

    def cdf(self, x: float) -> float:
        if self.kind == "uniform":
            return min(1.0, max(0.0, x))
        xs = [k[0] for k in self.knots]
        fs = [k[1] for k in self.knots]
        if x <= xs[0]:
            return 0.0
        if x >= xs[-1]:
            return 1.0
        k = 1
        while xs[k] < x:
            k += 1
        if xs[k] == xs[k - 1]:
            return fs[k]
        t = (x - xs[k - 1]) / (xs[k] - xs[k - 1])
        return fs[k - 1] + t * (fs[k] - fs[k - 1])

    def quantile(self, p: float) -> float:
        """Generalized (left-continuous) inverse CDF: inf{x : F(x) >= p}."""
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"quantile level must be in [0,1], got {p}")
        if self.kind == "uniform":
            return p
        xs = [k[0] for k in self.knots]
        fs = [k[1] for k in self.knots]
        # first knot reaching p; the segment into it rises strictly, so the
        # interpolation below is the left-continuous generalized inverse
        for k in range(len(xs)):
            if fs[k] >= p:
                if k == 0:
                    return xs[k]
                t = (p - fs[k - 1]) / (fs[k] - fs[k - 1])
                return xs[k - 1] + t * (xs[k] - xs[k - 1])
        return xs[-1]


def discretize(dist: MarginalDist, m: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """m quantile midpoints F^{-1}((k-0.5)/m), each with weight 1/m."""
    if m < 1:
        raise ValueError(f"marginal resolution must be >= 1, got {m}")
    points = tuple(dist.quantile((k - 0.5) / m) for k in range(1, m + 1))
    weights = (1.0 / m,) * m
    return points, weights


@dataclass(frozen=True)
class TypeGrid:
    """m x m lattice of type points with product weights.

    Point (i, j) has x1 = marginal_points[i], x2 = marginal_points[j] and
    sits at flat index i*m + j (lexicographic order).
    """

    marginal_points: tuple[float, ...]
    marginal_weights: tuple[float, ...]

    def __post_init__(self) -> None:
        pts = tuple(float(p) for p in self.marginal_points)
        wts = tuple(float(w) for w in self.marginal_weights)
        object.__setattr__(self, "marginal_points", pts)
        object.__setattr__(self, "marginal_weights", wts)
        if len(pts) != len(wts) or not pts:
            raise ValueError("marginal points and weights must be non-empty and equally long")
        if any(not 0.0 <= p <= 1.0 for p in pts):
            raise ValueError("type values must lie in [0,1]")
        if any(b < a for a, b in zip(pts, pts[1:])):
            raise ValueError("marginal points must be nondecreasing")
        if any(w < 0 for w in wts):
            raise ValueError("weights must be nonnegative")
        if abs(math.fsum(wts) - 1.0) > MASS_TOL:
            raise ValueError(f"marginal weights must sum to 1, got {math.fsum(wts)!r}")

    @property
    def m(self) -> int:
        return len(self.marginal_points)

    @cached_property
    def points(self) -> tuple[TypePoint, ...]:
        return tuple(TypePoint(a, b) for a in self.marginal_points for b in self.marginal_points)

    @cached_property
    def weights(self) -> tuple[float, ...]:
        return tuple(wa * wb for wa in self.marginal_weights for wb in self.marginal_weights)

    @cached_property
    def weights_array(self) -> np.ndarray:
        arr = np.array(self.weights)
        arr.flags.writeable = False
        return arr

    def index(self, i: int, j: int) -> int:
        return i * self.m + j

    def __len__(self) -> int:
        return self.m * self.m


def product_grid(marginal_points: Sequence[float], marginal_weights: Sequence[float]) -> TypeGrid:
    """Assemble the i.i.d. two-object type grid from one marginal."""
    return TypeGrid(tuple(marginal_points), tuple(marginal_weights))


def type_grid(dist: MarginalDist, m: int) -> TypeGrid:
    """discretize + product_grid in one step."""
    pts, wts = discretize(dist, m)
    return product_grid(pts, wts)


@dataclass(frozen=True)
class BidDistribution:
    """Probability mass function over bid pairs on a BidGrid.

    Atoms are stored sorted by bid pair; zero-mass entries are dropped.
    """

    grid: BidGrid
    atoms: tuple[tuple[BidPair, float], ...]

    def __post_init__(self) -> None:
        cleaned = tuple(sorted((b, float(w)) for b, w in self.atoms if w != 0.0))
        object.__setattr__(self, "atoms", cleaned)
        seen = set()
        for b, w in cleaned:
            self.grid.pair_index(b)  # raises if off-grid
            if w < 0:
                raise ValueError(f"negative mass {w!r} at {b}")
            if b in seen:
                raise ValueError(f"duplicate atom at {b}")
            seen.add(b)
        total = math.fsum(w for _, w in cleaned)
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"bid masses must sum to 1, got {total!r}")

    @classmethod
    def from_mapping(cls, grid: BidGrid, mass: Mapping[BidPair, float]) -> "BidDistribution":
        return cls(grid, tuple(mass.items()))

    @cached_property
    def mass(self) -> dict[BidPair, float]:
        return dict(self.atoms)

    def mass_of(self, b: BidPair) -> float:
        return self.mass.get(b, 0.0)

    @cached_property
    def support_indices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(first-coordinate level indices, second-coordinate level indices,
        weights) as parallel read-only arrays."""
        ai = np.array([self.grid.index(b.b1) for b, _ in self.atoms], dtype=np.int64)
        aj = np.array([self.grid.index(b.b2) for b, _ in self.atoms], dtype=np.int64)
        w = np.array([wt for _, wt in self.atoms])
        for arr in (ai, aj, w):
            arr.flags.writeable = False
        return ai, aj, w

    def transpose(self) -> "BidDistribution":
        """Swap the two bid coordinates (object relabeling)."""
        return BidDistribution(self.grid, tuple((BidPair(b.b2, b.b1), w) for b, w in self.atoms))


def point_mass(grid: BidGrid, b: BidPair) -> BidDistribution:
    return BidDistribution(grid, ((b, 1.0),))


def induced_bid_distribution(strategy, grid: TypeGrid, bids: BidGrid) -> BidDistribution:
    """Pushforward of the type-grid weights through a strategy.

    ``strategy`` is anything indexable by flat grid index returning a
    BidPair (a MonotoneStrategy, or a plain sequence). Masses for each bid
    accumulate with compensated summation.
    """
    groups: dict[BidPair, list[float]] = {}
    for t, w in enumerate(grid.weights):
        groups.setdefault(strategy[t], []).append(w)
    atoms = tuple((b, math.fsum(ws)) for b, ws in sorted(groups.items()))
    return BidDistribution(bids, atoms)


def cumulative_masses(mu: BidDistribution, b: BidPair) -> np.ndarray:
    """3x3 table of opponent-bid mass split by {below, equal, above} the
    query bid in each coordinate. Rows index the first coordinate."""
    i, j = mu.grid.pair_index(b)
    ai, aj, w = mu.support_indices
    out = np.empty((3, 3))
    masks1 = (ai < i, ai == i, ai > i)
    masks2 = (aj < j, aj == j, aj > j)
    for ci in (BELOW, EQUAL, ABOVE):
        for cj in (BELOW, EQUAL, ABOVE):
            out[ci, cj] = float(w[masks1[ci] & masks2[cj]].sum())
    return out
