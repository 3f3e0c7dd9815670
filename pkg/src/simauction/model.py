"""Primitive game objects: bid lattice, types, valuations, allocation.

Bid levels are exact rationals with denominator ``n`` so that grid
comparisons and tie detection never go through floating point. Utility
values and probabilities are ordinary floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np

RationalLike = Union[Fraction, int, str, float]

#: Tolerance used when checking weak inequalities on float-valued utilities.
CHECK_TOL = 1e-12


def to_fraction(value: RationalLike) -> Fraction:
    """Coerce a number to an exact rational.

    Floats are interpreted via their decimal repr, so 0.3 means 3/10 rather
    than the nearest binary double.
    """
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


class BidPair(NamedTuple):
    """A pair of per-object bids on the lattice."""

    b1: Fraction
    b2: Fraction

    def dominates(self, other: "BidPair") -> bool:
        """Coordinatewise >=."""
        return self.b1 >= other.b1 and self.b2 >= other.b2

    def meet(self, other: "BidPair") -> "BidPair":
        return BidPair(min(self.b1, other.b1), min(self.b2, other.b2))

    def join(self, other: "BidPair") -> "BidPair":
        return BidPair(max(self.b1, other.b1), max(self.b2, other.b2))


class TypePoint(NamedTuple):
    """A bidder's private value pair, one coordinate per object."""

    x1: float
    x2: float

    def dominates(self, other: "TypePoint") -> bool:
        return self.x1 >= other.x1 and self.x2 >= other.x2


class Allocation(NamedTuple):
    """Outcome of the two per-object bid comparisons."""

    won1: bool
    won2: bool


@dataclass(frozen=True)
class BidGrid:
    """The feasible one-object bid levels {0, 1/n, 2/n, ..., u_bar}.

    ``u_bar * n`` must be an integer so the top level sits on the lattice.
    """

    n: int
    u_bar: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "u_bar", to_fraction(self.u_bar))
        if self.n < 1:
            raise ValueError(f"bid increments per unit must be >= 1, got {self.n}")
        if self.u_bar <= 0:
            raise ValueError(f"maximum bid must be positive, got {self.u_bar}")
        top = self.u_bar * self.n
        if top.denominator != 1:
            raise ValueError(
                f"infeasible grid: u_bar*n = {top} is not an integer "
                f"(u_bar={self.u_bar}, n={self.n})"
            )

    @cached_property
    def levels(self) -> tuple[Fraction, ...]:
        top = int(self.u_bar * self.n)
        return tuple(Fraction(k, self.n) for k in range(top + 1))

    @cached_property
    def size(self) -> int:
        return len(self.levels)

    @cached_property
    def levels_float(self) -> np.ndarray:
        arr = np.array([float(v) for v in self.levels])
        arr.flags.writeable = False
        return arr

    @cached_property
    def _index(self) -> dict[Fraction, int]:
        return {level: k for k, level in enumerate(self.levels)}

    def index(self, level: Fraction) -> int:
        try:
            return self._index[to_fraction(level)]
        except KeyError:
            raise ValueError(f"bid level {level} is not on the grid (n={self.n}, u_bar={self.u_bar})") from None

    def pair_index(self, b: BidPair) -> tuple[int, int]:
        return self.index(b.b1), self.index(b.b2)

    def pair_at(self, i: int, j: int) -> BidPair:
        return BidPair(self.levels[i], self.levels[j])

    def pairs(self) -> tuple[BidPair, ...]:
        """All bid pairs in lexicographic order."""
        return tuple(BidPair(a, b) for a in self.levels for b in self.levels)

    def nearest_level(self, target: float) -> Fraction:
        """Grid level closest to ``target``; exact midpoints round down."""
        floats = self.levels_float
        k = int(np.searchsorted(floats, target))
        if k == 0:
            return self.levels[0]
        if k >= len(floats):
            return self.levels[-1]
        below, above = floats[k - 1], floats[k]
        return self.levels[k] if target - below > above - target else self.levels[k - 1]


@dataclass(frozen=True, eq=False)
class UtilitySpec:
    """A valuation function with complementary goods.

    ``u(x1, x2)`` is the utility of owning both objects at values
    ``(x1, x2)``; owning a single object is valued at ``u(x1, 0)`` or
    ``u(0, x2)``. ``u_max`` is the exact value of u(1,1) and caps the bid
    grid.
    """

    u: Callable[[float, float], float]
    description: str
    u_max: Fraction

    def value(self, x1: float, x2: float) -> float:
        return self.u(x1, x2)

    def solo1(self, x1: float) -> float:
        """Value of owning only object 1."""
        return self.u(x1, 0.0)

    def solo2(self, x2: float) -> float:
        """Value of owning only object 2."""
        return self.u(0.0, x2)

    def synergy(self, x1: float, x2: float) -> float:
        """Excess of the joint value over the sum of stand-alone values."""
        return self.u(x1, x2) - (self.u(x1, 0.0) + self.u(0.0, x2))

    def __repr__(self) -> str:  # pragma: no cover
        return f"UtilitySpec({self.description!r})"


def additive_synergy(alpha: RationalLike = Fraction(3, 10)) -> UtilitySpec:
    """u(x1,x2) = x1 + x2 + alpha when both values are positive."""
    a = to_fraction(alpha)
    if a < 0:
        raise ValueError(f"synergy bonus must be nonnegative, got {a}")
    af = float(a)

    def u(x1: float, x2: float) -> float:
        return x1 + x2 + (af if x1 > 0.0 and x2 > 0.0 else 0.0)

    return UtilitySpec(u, f"additive synergy (alpha={a})", u_max=2 + a)


def multiplicative() -> UtilitySpec:
    """u(x1,x2) = x1*x2: stand-alone objects are worthless, the pair is not."""
    return UtilitySpec(lambda x1, x2: x1 * x2, "multiplicative", u_max=Fraction(1))


def custom_polynomial(coefficients: Sequence[Sequence[RationalLike]]) -> UtilitySpec:
    """u(x1,x2) = sum_ij c[i][j] * x1**i * x2**j with c[0][0] = 0.

    Assumption compliance is the caller's responsibility; run
    :func:`validate_assumptions` on the result.
    """
    table = tuple(tuple(to_fraction(c) for c in row) for row in coefficients)
    if not table or not table[0]:
        raise ValueError("coefficient table must be non-empty")
    if table[0][0] != 0:
        raise ValueError(f"constant term must be 0 to normalize u(0,0)=0, got {table[0][0]}")
    floats = [[float(c) for c in row] for row in table]

    def u(x1: float, x2: float) -> float:
        total = 0.0
        p1 = 1.0
        for row in floats:
            p2 = 1.0
            for c in row:
                if c != 0.0:
                    total += c * p1 * p2
                p2 *= x2
            p1 *= x1
        return total

    u_max = sum(c for row in table for c in row)
    return UtilitySpec(u, f"polynomial ({len(table)}x{len(table[0])} coefficients)", u_max=u_max)


@dataclass(frozen=True)
class AssumptionViolation:
    """A witnessed failure of one of the valuation assumptions."""

    assumption: str  # "u(0,0)=0" | "A1" | "A2" | "A3"
    points: tuple[TypePoint, ...]
    values: tuple[float, ...]
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[AssumptionViolation, ...]
    resolution: int

    @property
    def ok(self) -> bool:
        return not self.violations

    def tags(self) -> set[str]:
        return {v.assumption for v in self.violations}


def validate_assumptions(spec: UtilitySpec, grid_resolution: int = 101, tol: float = CHECK_TOL) -> ValidationReport:
    """Check normalization, monotone u (A1), nonnegative synergy (A2) and
    monotone synergy (A3) on a uniform validation grid.

    Monotonicity is checked on adjacent grid pairs, which covers every
    comparable pair by transitivity.
    """
    if grid_resolution < 2:
        raise ValueError(f"grid_resolution must be >= 2, got {grid_resolution}")
    r = grid_resolution
    axis = [k / (r - 1) for k in range(r)]
    violations: list[AssumptionViolation] = []

    u00 = spec.value(0.0, 0.0)
    if abs(u00) > tol:
        violations.append(
            AssumptionViolation("u(0,0)=0", (TypePoint(0.0, 0.0),), (u00,), f"u(0,0) = {u00!r}, expected 0")
        )

    uvals = [[spec.value(a, b) for b in axis] for a in axis]
    lvals = [[spec.synergy(a, b) for b in axis] for a in axis]

    for i in range(r):
        for j in range(r):
            here_u, here_l = uvals[i][j], lvals[i][j]
            point = TypePoint(axis[i], axis[j])
            if here_l < -tol:
                violations.append(
                    AssumptionViolation("A2", (point,), (here_l,), f"synergy {here_l!r} < 0 at {point}")
                )
            for di, dj in ((1, 0), (0, 1)):
                if i + di >= r or j + dj >= r:
                    continue
                nxt = TypePoint(axis[i + di], axis[j + dj])
                next_u = uvals[i + di][j + dj]
                if next_u < here_u - tol:
                    violations.append(
                        AssumptionViolation(
                            "A1", (point, nxt), (here_u, next_u), f"u decreases from {here_u!r} to {next_u!r}"
                        )
                    )
                next_l = lvals[i + di][j + dj]
                if next_l < here_l - tol:
                    violations.append(
                        AssumptionViolation(
                            "A3", (point, nxt), (here_l, next_l), f"synergy decreases from {here_l!r} to {next_l!r}"
                        )
                    )
    return ValidationReport(tuple(violations), grid_resolution)


def allocate(b_i: BidPair, b_j: BidPair, tie1: bool, tie2: bool) -> Allocation:
    """Resolve the two per-object auctions for bidder i against bidder j.

    ``tie1``/``tie2`` are the outcomes of independent fair coins, True when
    the coin favors bidder i. The caller supplies the randomness.
    """
    won1 = b_i.b1 > b_j.b1 or (b_i.b1 == b_j.b1 and tie1)
    won2 = b_i.b2 > b_j.b2 or (b_i.b2 == b_j.b2 and tie2)
    return Allocation(won1, won2)


def ex_post_utility(a: Allocation, b_i: BidPair, x_i: TypePoint, spec: UtilitySpec) -> float:
    """Quasi-linear realized payoff: value of the won portfolio minus the
    bids paid on won objects. Losing bids are not paid."""
    if a.won1 and a.won2:
        return spec.value(x_i.x1, x_i.x2) - (float(b_i.b1) + float(b_i.b2))
    if a.won1:
        return spec.solo1(x_i.x1) - float(b_i.b1)
    if a.won2:
        return spec.solo2(x_i.x2) - float(b_i.b2)
    return 0.0


_Q_ONE = Fraction(1)
_Q_HALF = Fraction(1, 2)
_Q_QUARTER = Fraction(1, 4)
_Q_ZERO = Fraction(0)


def q_both(b_i: BidPair, b_j: BidPair) -> Fraction:
    """Ex-post probability that bidder i wins both objects against b_j,
    with tied objects awarded by independent fair coins."""
    gt1, gt2 = b_i.b1 > b_j.b1, b_i.b2 > b_j.b2
    eq1, eq2 = b_i.b1 == b_j.b1, b_i.b2 == b_j.b2
    if gt1 and gt2:
        return _Q_ONE
    if (gt1 and eq2) or (eq1 and gt2):
        return _Q_HALF
    if eq1 and eq2:
        return _Q_QUARTER
    return _Q_ZERO
