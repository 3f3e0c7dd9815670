"""Interim winning probabilities and expected utility.

Against a fixed opponent-bid distribution mu, a bid pair wins each object
outright on strict dominance and by fair coin on ties. ``q1``/``q2`` are
the at-least-one-object probabilities, ``q3`` the both-objects probability,
and the exclusive-win probabilities follow by differencing.

Every utility evaluation funnels through the same float expression, so the
vectorized lattice tables used by the solver agree bit-for-bit with the
scalar entry points.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .distribution import ABOVE, BELOW, EQUAL, BidDistribution, cumulative_masses
from .model import BidGrid, BidPair, TypePoint, UtilitySpec

IDENTITY_TOL = 1e-12


class InterimInconsistencyError(RuntimeError):
    """Exclusive-win probabilities disagree between the direct region sums
    and the differenced at-least probabilities: a region-decomposition bug."""


@dataclass(frozen=True)
class WinProbs:
    """Interim winning probabilities of one bid pair against mu."""

    q1: float  # wins object 1 at least
    q2: float  # wins object 2 at least
    p1: float  # wins object 1 only
    p2: float  # wins object 2 only
    p3: float  # wins both

    @property
    def q3(self) -> float:
        return self.p3


def q1(mu: BidDistribution, b1: Fraction) -> float:
    """Mass strictly below b1 in the first coordinate plus half the mass at b1."""
    i = mu.grid.index(b1)
    ai, _, w = mu.support_indices
    return float(w[ai < i].sum()) + 0.5 * float(w[ai == i].sum())


def q2(mu: BidDistribution, b2: Fraction) -> float:
    """Mirror of q1 on the second coordinate."""
    j = mu.grid.index(b2)
    _, aj, w = mu.support_indices
    return float(w[aj < j].sum()) + 0.5 * float(w[aj == j].sum())


def _both_from_cells(cells: np.ndarray) -> float:
    return float(
        cells[BELOW, BELOW]
        + 0.5 * cells[EQUAL, BELOW]
        + 0.5 * cells[BELOW, EQUAL]
        + 0.25 * cells[EQUAL, EQUAL]
    )


def q3(mu: BidDistribution, b: BidPair) -> float:
    """Probability of winning both objects: full mass of the dominated
    region plus tie cells at weight 1/2 (single tie) and 1/4 (double tie)."""
    return _both_from_cells(cumulative_masses(mu, b))


def win_probs(mu: BidDistribution, b: BidPair) -> WinProbs:
    """All five probabilities, with the exclusive-win values computed two
    ways (direct region sums and q-identities) and cross-checked."""
    cells = cumulative_masses(mu, b)
    p3 = _both_from_cells(cells)
    p1_direct = float(
        cells[BELOW, ABOVE]
        + 0.5 * cells[BELOW, EQUAL]
        + 0.5 * cells[EQUAL, ABOVE]
        + 0.25 * cells[EQUAL, EQUAL]
    )
    p2_direct = float(
        cells[ABOVE, BELOW]
        + 0.5 * cells[EQUAL, BELOW]
        + 0.5 * cells[ABOVE, EQUAL]
        + 0.25 * cells[EQUAL, EQUAL]
    )
    q1v = q1(mu, b.b1)
    q2v = q2(mu, b.b2)
    if abs(p1_direct - (q1v - p3)) > IDENTITY_TOL or abs(p2_direct - (q2v - p3)) > IDENTITY_TOL:
        raise InterimInconsistencyError(
            f"region sums disagree with identities at b={b}: "
            f"p1={p1_direct!r} vs {q1v - p3!r}, p2={p2_direct!r} vs {q2v - p3!r}"
        )
    return WinProbs(q1=q1v, q2=q2v, p1=p1_direct, p2=p2_direct, p3=p3)


def interim_utility(b: BidPair, x: TypePoint, mu: BidDistribution, spec: UtilitySpec) -> float:
    """Expected payoff of bidding ``b`` at type ``x``:
    q1*(solo1 - b1) + q2*(solo2 - b2) + q3*synergy."""
    return (
        q1(mu, b.b1) * (spec.solo1(x.x1) - float(b.b1))
        + q2(mu, b.b2) * (spec.solo2(x.x2) - float(b.b2))
        + q3(mu, b) * spec.synergy(x.x1, x.x2)
    )


def interim_utility_exclusive(b: BidPair, x: TypePoint, mu: BidDistribution, spec: UtilitySpec) -> float:
    """Same expectation written over exclusive outcomes:
    p3*(joint value - both bids) + p1*(solo1 - b1) + p2*(solo2 - b2)."""
    wp = win_probs(mu, b)
    b1f, b2f = float(b.b1), float(b.b2)
    return (
        wp.p3 * (spec.value(x.x1, x.x2) - (b1f + b2f))
        + wp.p1 * (spec.solo1(x.x1) - b1f)
        + wp.p2 * (spec.solo2(x.x2) - b2f)
    )


@dataclass(frozen=True, eq=False)
class WinProbTables:
    """q1/q2 per bid level and q3 per bid pair, tabulated over the grid.

    Entries are produced by the scalar functions above, so lattice lookups
    match scalar calls exactly.
    """

    grid: BidGrid
    q1: np.ndarray  # (L,)
    q2: np.ndarray  # (L,)
    q3: np.ndarray  # (L, L), row = first-coordinate level index


def win_prob_tables(mu: BidDistribution) -> WinProbTables:
    grid = mu.grid
    levels = grid.levels
    q1v = np.array([q1(mu, lv) for lv in levels])
    q2v = np.array([q2(mu, lv) for lv in levels])
    q3m = np.array([[q3(mu, BidPair(a, b)) for b in levels] for a in levels])
    for arr in (q1v, q2v, q3m):
        arr.flags.writeable = False
    return WinProbTables(grid, q1v, q2v, q3m)


def utility_lattice(tables: WinProbTables, x: TypePoint, spec: UtilitySpec) -> np.ndarray:
    """Interim utility of every bid pair at type ``x`` as an (L, L) array
    indexed by level indices; entry (i, j) equals the scalar
    interim_utility at (levels[i], levels[j]) bit-for-bit."""
    lf = tables.grid.levels_float
    gain1 = tables.q1 * (spec.solo1(x.x1) - lf)
    gain2 = tables.q2 * (spec.solo2(x.x2) - lf)
    return gain1[:, None] + gain2[None, :] + tables.q3 * spec.synergy(x.x1, x.x2)


# ---------------------------------------------------------------------------
# Exact-rational layer.
#
# Argmax selections and equilibrium regrets must decide ties exactly: float
# rounding can merge distinct utilities into one float or split equal ones,
# which corrupts greatest-element selection. The exact layer evaluates the
# same expression over the same float-valued primitives (weights, solo
# values, synergy) with Fraction arithmetic, so it is the float lattice's
# own ground truth rather than a different game.


@dataclass(frozen=True, eq=False)
class ExactTables:
    """q1/q2/q3 as exact rationals, tabulated over the bid grid."""

    grid: BidGrid
    q1: tuple[Fraction, ...]
    q2: tuple[Fraction, ...]
    q3: tuple[tuple[Fraction, ...], ...]


def exact_tables(mu: BidDistribution) -> ExactTables:
    grid = mu.grid
    size = grid.size
    zero = Fraction(0)
    half = Fraction(1, 2)
    quarter = Fraction(1, 4)

    mass = [[zero] * size for _ in range(size)]
    ai, aj, w = mu.support_indices
    for i, j, weight in zip(ai, aj, w):
        mass[int(i)][int(j)] += Fraction(float(weight))

    row_total = [sum(row, zero) for row in mass]
    col_total = [sum(mass[i][j] for i in range(size)) for j in range(size)]

    # prefix sums: below1[i] = mass with first coordinate < i, etc.
    below1 = [zero] * (size + 1)
    for i in range(size):
        below1[i + 1] = below1[i] + row_total[i]
    below2 = [zero] * (size + 1)
    for j in range(size):
        below2[j + 1] = below2[j] + col_total[j]
    # rect[i][j] = mass with first coordinate < i and second < j
    rect = [[zero] * (size + 1) for _ in range(size + 1)]
    for i in range(size):
        for j in range(size):
            rect[i + 1][j + 1] = rect[i][j + 1] + rect[i + 1][j] - rect[i][j] + mass[i][j]

    q1t = tuple(below1[i] + half * row_total[i] for i in range(size))
    q2t = tuple(below2[j] + half * col_total[j] for j in range(size))
    q3t = []
    for i in range(size):
        row = []
        row_below = [zero] * (size + 1)
        for j in range(size):
            row_below[j + 1] = row_below[j] + mass[i][j]
        for j in range(size):
            col_below_i = rect[i][j + 1] - rect[i][j]  # mass(first < i, second == j)
            row.append(
                rect[i][j]
                + half * row_below[j]  # first == i, second < j
                + half * col_below_i
                + quarter * mass[i][j]
            )
        q3t.append(tuple(row))
    return ExactTables(grid, q1t, q2t, tuple(q3t))


@dataclass(frozen=True, eq=False)
class ExactTypeContext:
    """Per-type rational constants of the utility expression."""

    solo1: Fraction
    solo2: Fraction
    synergy: Fraction


def exact_type_context(x: TypePoint, spec: UtilitySpec) -> ExactTypeContext:
    return ExactTypeContext(
        Fraction(spec.solo1(x.x1)), Fraction(spec.solo2(x.x2)), Fraction(spec.synergy(x.x1, x.x2))
    )


def exact_utility(tables: ExactTables, ctx: ExactTypeContext, i: int, j: int) -> Fraction:
    """Exact value of the interim utility expression at level indices (i, j)."""
    levels = tables.grid.levels
    return (
        tables.q1[i] * (ctx.solo1 - levels[i])
        + tables.q2[j] * (ctx.solo2 - levels[j])
        + tables.q3[i][j] * ctx.synergy
    )
