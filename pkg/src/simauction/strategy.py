"""Monotone pure strategies on the discretized type grid.

A strategy assigns a bid pair to every grid type; it is monotone when a
coordinatewise-higher type never bids lower in either coordinate. Neighbor
checks along the two lattice axes suffice by transitivity.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple

import numpy as np

from .distribution import TypeGrid
from .model import BidGrid, BidPair, UtilitySpec


@dataclass(frozen=True)
class MonotoneStrategy:
    """Bid pair per type-grid point, indexed by flat grid index."""

    bids: tuple[BidPair, ...]

    def __len__(self) -> int:
        return len(self.bids)

    def __getitem__(self, t: int) -> BidPair:
        return self.bids[t]

    def index_array(self, bids: BidGrid) -> np.ndarray:
        """(T, 2) level indices of each assigned bid."""
        return np.array([bids.pair_index(b) for b in self.bids], dtype=np.int64)

    def transpose(self, grid: TypeGrid) -> "MonotoneStrategy":
        """Swap object labels: new(x1, x2) = swap(old(x2, x1))."""
        m = grid.m
        out = [BidPair(Fraction(0), Fraction(0))] * (m * m)
        for i in range(m):
            for j in range(m):
                b = self.bids[grid.index(j, i)]
                out[grid.index(i, j)] = BidPair(b.b2, b.b1)
        return MonotoneStrategy(tuple(out))


class MonotonicityCheck(NamedTuple):
    ok: bool
    witness: tuple[int, int] | None  # (lower grid index, upper grid index) of the first violation


def is_monotone(strategy: MonotoneStrategy, grid: TypeGrid) -> MonotonicityCheck:
    """Scan right and up lattice neighbors; returns the first violating
    comparable pair of grid indices on failure."""
    m = grid.m
    if len(strategy) != m * m:
        raise ValueError(f"strategy covers {len(strategy)} points, grid has {m * m}")
    for i in range(m):
        for j in range(m):
            t = grid.index(i, j)
            here = strategy[t]
            for di, dj in ((0, 1), (1, 0)):
                if i + di >= m or j + dj >= m:
                    continue
                t2 = grid.index(i + di, j + dj)
                if not strategy[t2].dominates(here):
                    return MonotonicityCheck(False, (t, t2))
    return MonotonicityCheck(True, None)


def random_monotone(grid: TypeGrid, bids: BidGrid, seed: int) -> MonotoneStrategy:
    """Uniform draw per cell, then coordinatewise running maximum with the
    left and below neighbors in row-major order. Always monotone; biased
    toward larger bids in upper cells, which is fine for universally
    quantified property sweeps."""
    rng = np.random.default_rng(seed)
    m, size = grid.m, bids.size
    draw = rng.integers(0, size, size=(m, m, 2))
    acc = np.empty_like(draw)
    for i in range(m):
        for j in range(m):
            i1, i2 = draw[i, j]
            if i > 0:
                i1 = max(i1, acc[i - 1, j, 0])
                i2 = max(i2, acc[i - 1, j, 1])
            if j > 0:
                i1 = max(i1, acc[i, j - 1, 0])
                i2 = max(i2, acc[i, j - 1, 1])
            acc[i, j] = (i1, i2)
    levels = bids.levels
    return MonotoneStrategy(
        tuple(BidPair(levels[acc[i, j, 0]], levels[acc[i, j, 1]]) for i in range(m) for j in range(m))
    )


@dataclass(frozen=True)
class EnumerationResult:
    strategies: tuple[MonotoneStrategy, ...]
    truncated: bool


def _iter_monotone(grid: TypeGrid, bids: BidGrid) -> Iterator[tuple[tuple[int, int], ...]]:
    """All monotone assignments as index-pair tuples, lexicographic in
    row-major cell order."""
    m, size = grid.m, bids.size
    cells = [(i, j) for i in range(m) for j in range(m)]
    assignment: list[tuple[int, int]] = [(0, 0)] * (m * m)

    def rec(pos: int) -> Iterator[tuple[tuple[int, int], ...]]:
        if pos == len(cells):
            yield tuple(assignment)
            return
        i, j = cells[pos]
        lo1 = lo2 = 0
        if i > 0:
            p = assignment[grid.index(i - 1, j)]
            lo1, lo2 = max(lo1, p[0]), max(lo2, p[1])
        if j > 0:
            p = assignment[grid.index(i, j - 1)]
            lo1, lo2 = max(lo1, p[0]), max(lo2, p[1])
        for a in range(lo1, size):
            for b in range(lo2, size):
                assignment[grid.index(i, j)] = (a, b)
                yield from rec(pos + 1)

    return rec(0)


def enumerate_monotone(grid: TypeGrid, bids: BidGrid, cap: int) -> EnumerationResult:
    """Every monotone strategy, exactly once, in lexicographic order; stops
    with the truncation flag set once ``cap`` strategies have been yielded.
    Intended for tiny instances."""
    if cap < 0:
        raise ValueError("cap must be nonnegative")
    levels = bids.levels
    out: list[MonotoneStrategy] = []
    truncated = False
    for idxs in _iter_monotone(grid, bids):
        if len(out) >= cap:
            truncated = True
            break
        out.append(MonotoneStrategy(tuple(BidPair(levels[a], levels[b]) for a, b in idxs)))
    return EnumerationResult(tuple(out), truncated)


def zero_strategy(grid: TypeGrid, bids: BidGrid) -> MonotoneStrategy:
    zero = BidPair(bids.levels[0], bids.levels[0])
    return MonotoneStrategy((zero,) * len(grid))


def constant_strategy(grid: TypeGrid, b: BidPair) -> MonotoneStrategy:
    return MonotoneStrategy((b,) * len(grid))


def half_value_strategy(grid: TypeGrid, bids: BidGrid, spec: UtilitySpec) -> MonotoneStrategy:
    """Bid the grid level nearest to half the stand-alone value of each
    object. Monotone because the stand-alone values are nondecreasing and
    rounding ties break consistently downward."""
    out = []
    for x in grid.points:
        out.append(
            BidPair(
                bids.nearest_level(0.5 * spec.solo1(x.x1)),
                bids.nearest_level(0.5 * spec.solo2(x.x2)),
            )
        )
    return MonotoneStrategy(tuple(out))


def to_csv(strategy: MonotoneStrategy, grid: TypeGrid) -> str:
    """Serialize as x1_index,x2_index,b1,b2 rows; bids as exact fractions."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x1_index", "x2_index", "b1", "b2"])
    m = grid.m
    for i in range(m):
        for j in range(m):
            b = strategy[grid.index(i, j)]
            writer.writerow([i, j, str(b.b1), str(b.b2)])
    return buf.getvalue()


def from_csv(text: str, grid: TypeGrid, bids: BidGrid) -> MonotoneStrategy:
    """Inverse of :func:`to_csv`; validates grid membership and coverage."""
    m = grid.m
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["x1_index", "x2_index", "b1", "b2"]:
        raise ValueError("strategy CSV must start with header x1_index,x2_index,b1,b2")
    out: list[BidPair | None] = [None] * (m * m)
    for row in rows[1:]:
        if not row:
            continue
        i, j = int(row[0]), int(row[1])
        if not (0 <= i < m and 0 <= j < m):
            raise ValueError(f"type index ({i},{j}) outside the {m}x{m} grid")
        b = BidPair(Fraction(row[2]), Fraction(row[3]))
        bids.pair_index(b)  # raises if off-grid
        t = grid.index(i, j)
        if out[t] is not None:
            raise ValueError(f"duplicate row for type index ({i},{j})")
        out[t] = b
    if any(b is None for b in out):
        missing = out.index(None)
        raise ValueError(f"strategy CSV misses grid index {missing}")
    return MonotoneStrategy(tuple(out))  # type: ignore[arg-type]
