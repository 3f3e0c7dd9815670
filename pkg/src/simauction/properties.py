"""Numerical verification of the interim-utility ordering properties.

Three checks, all expected clean whenever the valuation assumptions hold:

* weak single crossing: a weakly better higher bid pair stays weakly
  better at higher types;
* weak quasi-supermodularity: beating the meet implies the join beats the
  other bid pair;
* supermodularity of the both-win probability in the two own bids
  (the "increasing differences" inequality), which drives the second check.

The last inequality reduces pointwise to a five-way case analysis of the
ex-post both-win probability; ``hd_table`` computes one case, and
``hd_full_enumeration`` sweeps every admissible bid configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .distribution import BidDistribution, TypeGrid
from .interim import win_prob_tables, utility_lattice
from .model import BidGrid, BidPair, TypePoint, UtilitySpec, q_both

PROPERTY_TOL = 1e-12

WSC = "WSC"
WQS = "WQS"
INEQ_W = "IneqW"


@dataclass(frozen=True)
class ViolationReport:
    """A replayable witness of one failed inequality.

    ``premise``/``conclusion`` hold the two sides of the respective
    inequality; a violation means premise[0] >= premise[1] while
    conclusion[0] < conclusion[1] - tol. IneqW has no premise and its
    conclusion is (increasing-differences value, 0).
    """

    property: str
    bids: tuple[BidPair, ...]
    types: tuple[TypePoint, ...]
    premise: Optional[tuple[float, float]]
    conclusion: tuple[float, float]
    strategy_seed: Optional[int] = None

    def with_seed(self, seed: int) -> "ViolationReport":
        return replace(self, strategy_seed=seed)


def _value_cube(spec: UtilitySpec, mu: BidDistribution, grid: TypeGrid) -> np.ndarray:
    tables = win_prob_tables(mu)
    return np.stack([utility_lattice(tables, x, spec).ravel() for x in grid.points])


@lru_cache(maxsize=64)
def _comparable_level_pairs(size: int) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = [], []
    for a in range(size):
        for b in range(a, size):
            lo.append(a)
            hi.append(b)
    return np.array(lo), np.array(hi)


@lru_cache(maxsize=64)
def _comparable_flat_pairs(size: int) -> tuple[np.ndarray, np.ndarray]:
    """Flat lattice indices (low, high) of every coordinatewise-comparable
    ordered pair low <= high on a size x size lattice."""
    l1, h1 = _comparable_level_pairs(size)
    l2, h2 = _comparable_level_pairs(size)
    low = (l1[:, None] * size + l2[None, :]).ravel()
    high = (h1[:, None] * size + h2[None, :]).ravel()
    return low, high


def check_wsc(
    spec: UtilitySpec,
    mu: BidDistribution,
    grid: TypeGrid,
    bids: BidGrid,
    tol: float = PROPERTY_TOL,
) -> list[ViolationReport]:
    """Sweep all comparable bid pairs and comparable type pairs; report
    every case where the higher bid pair is weakly better at the lower type
    but worse (beyond tol) at the higher type."""
    values = _value_cube(spec, mu, grid)  # (T, L*L)
    size = bids.size
    low, high = _comparable_flat_pairs(size)
    diff = values[:, high] - values[:, low]  # (T, P)
    premise_ok = diff >= 0.0
    conclusion_bad = diff < -tol

    t_low, t_high = _comparable_flat_pairs(grid.m)
    viol = premise_ok[t_low] & conclusion_bad[t_high]  # (TP, P)
    out: list[ViolationReport] = []
    levels = bids.levels
    for tp, p in np.argwhere(viol):
        kl, kh = int(low[p]), int(high[p])
        tl, th = int(t_low[tp]), int(t_high[tp])
        b_low = BidPair(levels[kl // size], levels[kl % size])
        b_high = BidPair(levels[kh // size], levels[kh % size])
        out.append(
            ViolationReport(
                property=WSC,
                bids=(b_low, b_high),
                types=(grid.points[tl], grid.points[th]),
                premise=(float(values[tl, kh]), float(values[tl, kl])),
                conclusion=(float(values[th, kh]), float(values[th, kl])),
            )
        )
    return out


@lru_cache(maxsize=64)
def _meet_join_pairs(size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """For every ordered pair (k, k') of flat lattice indices: k, k',
    meet index, join index."""
    flat = np.arange(size * size)
    i, j = np.divmod(flat, size)
    k = np.repeat(flat, size * size)
    kp = np.tile(flat, size * size)
    meet = np.minimum(i[k], i[kp]) * size + np.minimum(j[k], j[kp])
    join = np.maximum(i[k], i[kp]) * size + np.maximum(j[k], j[kp])
    return k, kp, meet, join


def check_wqs(
    spec: UtilitySpec,
    mu: BidDistribution,
    grid: TypeGrid,
    bids: BidGrid,
    tol: float = PROPERTY_TOL,
) -> list[ViolationReport]:
    """Sweep all bid-pair pairs (comparable or not) and all grid types;
    report cases where a pair weakly beats the meet yet the join loses to
    the other pair beyond tol."""
    values = _value_cube(spec, mu, grid)
    size = bids.size
    k, kp, meet, join = _meet_join_pairs(size)
    levels = bids.levels
    out: list[ViolationReport] = []
    for t in range(len(grid)):
        row = values[t]
        bad = (row[k] >= row[meet]) & (row[join] < row[kp] - tol)
        for p in np.flatnonzero(bad):
            ka, kb = int(k[p]), int(kp[p])
            b_a = BidPair(levels[ka // size], levels[ka % size])
            b_b = BidPair(levels[kb // size], levels[kb % size])
            out.append(
                ViolationReport(
                    property=WQS,
                    bids=(b_a, b_b),
                    types=(grid.points[t],),
                    premise=(float(row[ka]), float(row[meet[p]])),
                    conclusion=(float(row[join[p]]), float(row[kb])),
                )
            )
    return out


def check_ineq_w(mu: BidDistribution, bids: BidGrid, tol: float = PROPERTY_TOL) -> list[ViolationReport]:
    """Increasing differences of the both-win probability: for every
    quadruple b1h > b1l, b2h > b2l, the gain from raising the second bid
    must be at least as large at the high first bid as at the low one."""
    q3 = win_prob_tables(mu).q3  # (L, L)
    size = bids.size
    # diff2[i, h2, l2] = q3[i, h2] - q3[i, l2]
    diff2 = q3[:, :, None] - q3[:, None, :]
    # expr[h1, l1, h2, l2] = diff2[h1, h2, l2] - diff2[l1, h2, l2]
    expr = diff2[:, None, :, :] - diff2[None, :, :, :]
    h1, l1, h2, l2 = np.indices(expr.shape)
    admissible = (h1 > l1) & (h2 > l2)
    bad = admissible & (expr < -tol)
    levels = bids.levels
    out: list[ViolationReport] = []
    for a, b, c, d in np.argwhere(bad):
        out.append(
            ViolationReport(
                property=INEQ_W,
                bids=(
                    BidPair(levels[a], levels[c]),  # (b1h, b2h)
                    BidPair(levels[b], levels[d]),  # (b1l, b2l)
                ),
                types=(),
                premise=None,
                conclusion=(float(expr[a, b, c, d]), 0.0),
            )
        )
    return out


def replay(
    violation: ViolationReport,
    mu: BidDistribution,
    spec: Optional[UtilitySpec] = None,
) -> ViolationReport:
    """Recompute a report's values from its stored inputs; the result must
    equal the original bit-for-bit for a genuine witness."""
    from .interim import interim_utility, q3 as interim_q3

    if violation.property == INEQ_W:
        (bh, bl) = violation.bids
        b1h, b2h = bh.b1, bh.b2
        b1l, b2l = bl.b1, bl.b2
        value = (
            interim_q3(mu, BidPair(b1h, b2h)) - interim_q3(mu, BidPair(b1h, b2l))
        ) - (interim_q3(mu, BidPair(b1l, b2h)) - interim_q3(mu, BidPair(b1l, b2l)))
        return replace(violation, conclusion=(value, 0.0))
    if spec is None:
        raise ValueError("replaying WSC/WQS violations requires the utility spec")
    if violation.property == WSC:
        b_low, b_high = violation.bids
        x_low, x_high = violation.types
        premise = (interim_utility(b_high, x_low, mu, spec), interim_utility(b_low, x_low, mu, spec))
        conclusion = (interim_utility(b_high, x_high, mu, spec), interim_utility(b_low, x_high, mu, spec))
        return replace(violation, premise=premise, conclusion=conclusion)
    if violation.property == WQS:
        b_a, b_b = violation.bids
        (x,) = violation.types
        premise = (interim_utility(b_a, x, mu, spec), interim_utility(b_a.meet(b_b), x, mu, spec))
        conclusion = (interim_utility(b_a.join(b_b), x, mu, spec), interim_utility(b_b, x, mu, spec))
        return replace(violation, premise=premise, conclusion=conclusion)
    raise ValueError(f"unknown property {violation.property!r}")


# ---------------------------------------------------------------------------
# Case analysis of the both-win probability differences.

#: Shared H/D value by (main category, sub case): the case value depends
#: only on how the varied first-coordinate bid relates to the opponent's,
#: identically for the high-bid (H) and low-bid (D) variants.
HD_CASE_VALUES: dict[int, tuple[Fraction, Fraction, Fraction]] = {
    1: (Fraction(0), Fraction(1, 2), Fraction(1)),
    2: (Fraction(0), Fraction(1, 4), Fraction(1, 2)),
    3: (Fraction(0), Fraction(0), Fraction(0)),
    4: (Fraction(0), Fraction(1, 4), Fraction(1, 2)),
    5: (Fraction(0), Fraction(0), Fraction(0)),
}


def hd_case_value(main_category: int, sub_case: int) -> Fraction:
    return HD_CASE_VALUES[main_category][sub_case - 1]


@dataclass(frozen=True)
class HDRecord:
    """One admissible (b1h, b1l, b2h, b2l, opponent bid) configuration.

    ``h`` is the both-win probability gain from raising the second bid at
    the high first bid; ``d`` the same gain at the low first bid. The sub
    cases record how the respective first bid compares to the opponent's
    (1: below, 2: equal, 3: above); Table cells with h_sub < d_sub cannot
    occur because the high first bid exceeds the low one.
    """

    main_category: int  # 1..5, ordering of b2h, b2l vs opponent second bid
    h_sub: int  # 1..3, b1h vs opponent first bid
    d_sub: int  # 1..3, b1l vs opponent first bid
    h: Fraction
    d: Fraction


def _main_category(b2h: Fraction, b2l: Fraction, beta2: Fraction) -> int:
    if beta2 < b2l:
        return 3
    if beta2 == b2l:
        return 2
    if beta2 < b2h:
        return 1
    if beta2 == b2h:
        return 4
    return 5


def _sub_case(level: Fraction, beta1: Fraction) -> int:
    if level < beta1:
        return 1
    if level == beta1:
        return 2
    return 3


def hd_table(b1h: Fraction, b1l: Fraction, b2h: Fraction, b2l: Fraction, beta: BidPair) -> HDRecord:
    """Classify one bid configuration and compute its H and D values from
    the ex-post both-win probability."""
    if not b1h > b1l:
        raise ValueError(f"need b1h > b1l, got {b1h} <= {b1l}")
    if not b2h > b2l:
        raise ValueError(f"need b2h > b2l, got {b2h} <= {b2l}")
    h = q_both(BidPair(b1h, b2h), beta) - q_both(BidPair(b1h, b2l), beta)
    d = q_both(BidPair(b1l, b2h), beta) - q_both(BidPair(b1l, b2l), beta)
    return HDRecord(
        main_category=_main_category(b2h, b2l, beta.b2),
        h_sub=_sub_case(b1h, beta.b1),
        d_sub=_sub_case(b1l, beta.b1),
        h=h,
        d=d,
    )


@dataclass(frozen=True)
class HDEnumeration:
    records: tuple[HDRecord, ...]

    @property
    def min_h_minus_d(self) -> Fraction:
        return min(r.h - r.d for r in self.records)

    @property
    def negatives(self) -> tuple[HDRecord, ...]:
        return tuple(r for r in self.records if r.h - r.d < 0)

    def observed_h_values(self) -> dict[tuple[int, int], set[Fraction]]:
        out: dict[tuple[int, int], set[Fraction]] = {}
        for r in self.records:
            out.setdefault((r.main_category, r.h_sub), set()).add(r.h)
        return out

    def observed_d_values(self) -> dict[tuple[int, int], set[Fraction]]:
        out: dict[tuple[int, int], set[Fraction]] = {}
        for r in self.records:
            out.setdefault((r.main_category, r.d_sub), set()).add(r.d)
        return out

    def observed_cells(self) -> set[tuple[int, int, int]]:
        """(main category, d_sub, h_sub) combinations that occurred."""
        return {(r.main_category, r.d_sub, r.h_sub) for r in self.records}

    def table_rows(self) -> list[dict]:
        """Category-by-cell summary in the shape of the case table: for
        each main category, the 3x3 grid of (d_sub row, h_sub column) with
        the realized h - d value, or unreachable marker."""
        counts: dict[tuple[int, int, int], int] = {}
        for r in self.records:
            key = (r.main_category, r.d_sub, r.h_sub)
            counts[key] = counts.get(key, 0) + 1
        rows = []
        for cat in range(1, 6):
            for d_sub in range(1, 4):
                for h_sub in range(1, 4):
                    reachable = h_sub >= d_sub
                    rows.append(
                        {
                            "category": cat,
                            "d_sub": d_sub,
                            "h_sub": h_sub,
                            "reachable": reachable,
                            "h_value": str(hd_case_value(cat, h_sub)) if reachable else "",
                            "d_value": str(hd_case_value(cat, d_sub)) if reachable else "",
                            "h_minus_d": str(hd_case_value(cat, h_sub) - hd_case_value(cat, d_sub))
                            if reachable
                            else "unreachable",
                            "observed": counts.get((cat, d_sub, h_sub), 0),
                        }
                    )
        return rows

    def render_text(self) -> str:
        lines = []
        for cat in range(1, 6):
            lines.append(f"category {cat} (h - d by [d_sub row, h_sub column]):")
            for d_sub in range(1, 4):
                cells = []
                for h_sub in range(1, 4):
                    if h_sub < d_sub:
                        cells.append("   --")
                    else:
                        cells.append(str(hd_case_value(cat, h_sub) - hd_case_value(cat, d_sub)).rjust(5))
                lines.append("  " + "  ".join(cells))
        return "\n".join(lines) + "\n"


def hd_full_enumeration(bids: BidGrid) -> HDEnumeration:
    """Every admissible (b1h, b1l, b2h, b2l, opponent bid) quintuple on the
    grid, classified and valued."""
    levels = bids.levels
    records = []
    for a, b1h in enumerate(levels):
        for b1l in levels[:a]:
            for c, b2h in enumerate(levels):
                for b2l in levels[:c]:
                    for beta1 in levels:
                        for beta2 in levels:
                            records.append(hd_table(b1h, b1l, b2h, b2l, BidPair(beta1, beta2)))
    return HDEnumeration(tuple(records))


@dataclass(frozen=True)
class SweepResult:
    """Aggregate of property checks across sampled opponent strategies."""

    strategies_checked: int
    seeds: tuple[int, ...]
    violations: tuple[ViolationReport, ...]

    def by_property(self, name: str) -> tuple[ViolationReport, ...]:
        return tuple(v for v in self.violations if v.property == name)

    @property
    def clean(self) -> bool:
        return not self.violations


def strategy_sweep(
    spec: UtilitySpec,
    grid: TypeGrid,
    bids: BidGrid,
    count: int,
    seed: int = 0,
    checks: Sequence[str] = (WSC, WQS, INEQ_W),
    extra_strategies: Iterable = (),
    tol: float = PROPERTY_TOL,
) -> SweepResult:
    """Run the selected property checks against ``count`` random monotone
    opponent strategies (seeds seed, seed+1, ...) plus any explicitly
    supplied strategies (tagged with seed -1)."""
    from .distribution import induced_bid_distribution
    from .strategy import random_monotone

    violations: list[ViolationReport] = []
    seeds = tuple(range(seed, seed + count))
    pool = [(-1, s) for s in extra_strategies] + [(s, random_monotone(grid, bids, s)) for s in seeds]
    for tag, strat in pool:
        mu = induced_bid_distribution(strat, grid, bids)
        if WSC in checks:
            violations += [v.with_seed(tag) for v in check_wsc(spec, mu, grid, bids, tol)]
        if WQS in checks:
            violations += [v.with_seed(tag) for v in check_wqs(spec, mu, grid, bids, tol)]
        if INEQ_W in checks:
            violations += [v.with_seed(tag) for v in check_ineq_w(mu, bids, tol)]
    return SweepResult(len(pool), seeds, tuple(violations))
