"""Best responses and monotone equilibrium search.

Best replies select the greatest element of the exact argmax set under the
coordinatewise order. Under the maintained valuation assumptions the argmax
is a sublattice and this selection is monotone; both facts are enforced at
runtime and surfaced as errors when they fail.

Argmax sets and regrets are decided in exact rational arithmetic: a float
lattice scan narrows the search to near-maximal candidates (the float error
is orders of magnitude below the margin), then Fraction evaluation of the
same expression settles ties exactly. Without this, float rounding can
merge or split ties and corrupt greatest-element selection.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .distribution import BidDistribution, TypeGrid, induced_bid_distribution
from .interim import (
    ExactTables,
    ExactTypeContext,
    exact_tables,
    exact_type_context,
    exact_utility,
    utility_lattice,
    win_prob_tables,
)
from .model import BidGrid, BidPair, TypePoint, UtilitySpec
from .strategy import MonotoneStrategy, is_monotone

#: Float values this close to the float maximum enter exact re-evaluation.
#: The float evaluation error is bounded well below 1e-10 on supported grid
#: sizes, so every exact maximizer is always among the candidates.
CANDIDATE_MARGIN = 1e-9


class NoGreatestElementError(RuntimeError):
    """The argmax set has no greatest element: the interim utility is not
    behaving as a quasi-supermodular objective."""


class MonotonicityBrokenError(RuntimeError):
    """Greatest-argmax selections decreased in the type: single crossing of
    the interim utility failed."""


@dataclass(frozen=True)
class TypeRegret:
    type_index: int
    x: TypePoint
    chosen: BidPair
    best_deviation: BidPair
    regret: float


@dataclass(frozen=True)
class RegretReport:
    """Exhaustive-deviation regrets for both bidders at every grid type."""

    max_regret: float
    bidder_regrets: tuple[tuple[TypeRegret, ...], tuple[TypeRegret, ...]]

    def worst(self) -> TypeRegret:
        return max((tr for side in self.bidder_regrets for tr in side), key=lambda tr: tr.regret)


@dataclass(frozen=True)
class SolveResult:
    strategies: tuple[MonotoneStrategy, MonotoneStrategy]
    status: str  # "exact_equilibrium" | "epsilon_equilibrium" | "cycle_detected"
    iterations: int
    max_regret: float
    cycle_period: Optional[int] = None

    @property
    def epsilon(self) -> float:
        return self.max_regret


@dataclass(frozen=True, eq=False)
class _Engine:
    """Float and exact views of one opponent-bid distribution."""

    mu: BidDistribution
    ftables: object
    etables: ExactTables

    @classmethod
    def for_mu(cls, mu: BidDistribution) -> "_Engine":
        return cls(mu, win_prob_tables(mu), exact_tables(mu))

    @classmethod
    def for_strategy(cls, s: MonotoneStrategy, grid: TypeGrid, bids: BidGrid) -> "_Engine":
        return cls.for_mu(induced_bid_distribution(s, grid, bids))


def _exact_argmax(
    engine: _Engine, x: TypePoint, spec: UtilitySpec
) -> tuple[list[tuple[int, int]], Fraction, ExactTypeContext]:
    """Exact argmax index pairs (sorted lexicographically) and maximum value."""
    lattice = utility_lattice(engine.ftables, x, spec)
    top = lattice.max()
    # margin scales with the value magnitude so the float error bound stays
    # orders of magnitude below it even for large valuations
    candidates = np.argwhere(lattice >= top - CANDIDATE_MARGIN * max(1.0, abs(top)))
    ctx = exact_type_context(x, spec)
    best: Fraction | None = None
    arg: list[tuple[int, int]] = []
    for i, j in candidates:
        v = exact_utility(engine.etables, ctx, int(i), int(j))
        if best is None or v > best:
            best, arg = v, [(int(i), int(j))]
        elif v == best:
            arg.append((int(i), int(j)))
    assert best is not None
    return arg, best, ctx


def best_response_set(
    x: TypePoint, mu: BidDistribution, spec: UtilitySpec, bids: BidGrid
) -> tuple[BidPair, ...]:
    """Exact argmax of the interim utility over the full bid lattice, in
    lexicographic order; never empty."""
    arg, _, _ = _exact_argmax(_Engine.for_mu(mu), x, spec)
    levels = bids.levels
    return tuple(BidPair(levels[i], levels[j]) for i, j in arg)


def _greatest(arg: list[tuple[int, int]], x: TypePoint) -> tuple[int, int]:
    gi = max(i for i, _ in arg)
    gj = max(j for _, j in arg)
    if (gi, gj) not in set(arg):
        raise NoGreatestElementError(
            f"argmax set at type {x} has no greatest element; "
            f"componentwise join ({gi},{gj}) is not optimal; argmax={arg}"
        )
    return gi, gj


def monotone_best_reply(
    s_opp: MonotoneStrategy, grid: TypeGrid, spec: UtilitySpec, bids: BidGrid
) -> MonotoneStrategy:
    """Greatest-argmax best reply at every grid type, checked monotone."""
    engine = _Engine.for_strategy(s_opp, grid, bids)
    levels = bids.levels
    out = []
    for x in grid.points:
        arg, _, _ = _exact_argmax(engine, x, spec)
        gi, gj = _greatest(arg, x)
        out.append(BidPair(levels[gi], levels[gj]))
    reply = MonotoneStrategy(tuple(out))
    check = is_monotone(reply, grid)
    if not check.ok:
        lo, hi = check.witness  # type: ignore[misc]
        raise MonotonicityBrokenError(
            f"greatest-argmax reply decreases from type {grid.points[lo]} to {grid.points[hi]}: "
            f"{reply[lo]} vs {reply[hi]}"
        )
    return reply


def check_equilibrium(
    s1: MonotoneStrategy, s2: MonotoneStrategy, grid: TypeGrid, spec: UtilitySpec, bids: BidGrid
) -> RegretReport:
    """Max over bidders and types of the gain from the best lattice
    deviation; exact arithmetic, so zero means zero."""
    levels = bids.levels
    sides = []
    for own, opp in ((s1, s2), (s2, s1)):
        engine = _Engine.for_strategy(opp, grid, bids)
        entries = []
        for t, x in enumerate(grid.points):
            arg, best, ctx = _exact_argmax(engine, x, spec)
            i, j = bids.pair_index(own[t])
            regret = best - exact_utility(engine.etables, ctx, i, j)
            di, dj = max(arg)
            entries.append(
                TypeRegret(
                    type_index=t,
                    x=x,
                    chosen=own[t],
                    best_deviation=BidPair(levels[di], levels[dj]),
                    regret=float(regret),
                )
            )
        sides.append(tuple(entries))
    max_regret = max(tr.regret for side in sides for tr in side)
    return RegretReport(max_regret=max_regret, bidder_regrets=(sides[0], sides[1]))


def _profile_key(s1: MonotoneStrategy, s2: MonotoneStrategy) -> tuple:
    return (s1.bids, s2.bids)


def iterate_best_response(
    s1: MonotoneStrategy,
    s2: MonotoneStrategy,
    grid: TypeGrid,
    spec: UtilitySpec,
    bids: BidGrid,
    max_iter: int = 200,
) -> SolveResult:
    """Alternating greatest-argmax best replies from the given profile.

    Stops at a fixed point (exact equilibrium), on revisiting a profile
    (cycle; the lowest-regret profile seen is returned), or at ``max_iter``.
    ``iterations`` counts rounds that changed the profile.
    """
    report = check_equilibrium(s1, s2, grid, spec, bids)
    best = (s1, s2)
    best_regret = report.max_regret
    if max_iter == 0:
        status = "exact_equilibrium" if best_regret == 0.0 else "epsilon_equilibrium"
        return SolveResult((s1, s2), status, 0, best_regret)

    seen = {_profile_key(s1, s2): 0}
    cycle_period: Optional[int] = None
    iterations = 0
    for it in range(1, max_iter + 1):
        n1 = monotone_best_reply(s2, grid, spec, bids)
        n2 = monotone_best_reply(n1, grid, spec, bids)
        if (n1.bids, n2.bids) == (s1.bids, s2.bids):
            # fixed point: both strategies are exact greatest best replies
            regret = check_equilibrium(s1, s2, grid, spec, bids).max_regret
            status = "exact_equilibrium" if regret == 0.0 else "epsilon_equilibrium"
            return SolveResult((s1, s2), status, iterations, regret)
        s1, s2 = n1, n2
        iterations = it
        regret = check_equilibrium(s1, s2, grid, spec, bids).max_regret
        if regret < best_regret:
            best, best_regret = (s1, s2), regret
        key = _profile_key(s1, s2)
        if key in seen:
            cycle_period = it - seen[key]
            break
        seen[key] = it

    if best_regret == 0.0:
        status = "exact_equilibrium"
    elif cycle_period is not None:
        status = "cycle_detected"
    else:
        status = "epsilon_equilibrium"
    return SolveResult(best, status, iterations, best_regret, cycle_period)


@dataclass(frozen=True)
class EquilibriumEnumeration:
    equilibria: tuple[tuple[MonotoneStrategy, MonotoneStrategy], ...]
    truncated: bool
    strategies_considered: int


def exhaustive_equilibria(
    grid: TypeGrid, spec: UtilitySpec, bids: BidGrid, cap: int
) -> EquilibriumEnumeration:
    """All zero-regret profiles of monotone strategies, by enumerating both
    players' strategy sets. Tiny instances only; the truncation flag is set
    when the enumeration cap was hit."""
    from .strategy import enumerate_monotone

    enum = enumerate_monotone(grid, bids, cap)
    strategies = enum.strategies
    engines = [_Engine.for_strategy(s, grid, bids) for s in strategies]

    # per opponent: exact maximum and per-bid exact values at each type
    tops: list[list[Fraction]] = []
    contexts: list[list] = []
    for engine in engines:
        per_type = []
        ctxs = []
        for x in grid.points:
            _, top, ctx = _exact_argmax(engine, x, spec)
            per_type.append(top)
            ctxs.append(ctx)
        tops.append(per_type)
        contexts.append(ctxs)

    index_arrays = [s.index_array(bids) for s in strategies]

    def zero_regret_against(own: int, opp: int) -> bool:
        idx = index_arrays[own]
        for t in range(len(grid)):
            value = exact_utility(engines[opp].etables, contexts[opp][t], int(idx[t, 0]), int(idx[t, 1]))
            if value != tops[opp][t]:
                return False
        return True

    found = []
    for a, sa in enumerate(strategies):
        for b, sb in enumerate(strategies):
            if zero_regret_against(a, b) and zero_regret_against(b, a):
                found.append((sa, sb))
    return EquilibriumEnumeration(tuple(found), enum.truncated, len(strategies))
