"""Scenario configuration, Monte Carlo simulation, and the command line.

A scenario is one TOML document bundling grid sizes, the value
distribution, the utility family, seeds and solver/sweep parameters.
Subcommands: solve, verify, simulate, enumerate, probe. Exit codes:
0 success, 1 configuration or solver error, 2 property violations found
by verify.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

try:
    import tomllib  # type: ignore[import-not-found]
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib  # type: ignore[no-redef]

from . import model, properties, solver, strategy as strategy_mod
from .distribution import MarginalDist, TypeGrid, induced_bid_distribution, type_grid
from .interim import interim_utility, win_probs
from .model import BidGrid, BidPair, TypePoint, UtilitySpec, to_fraction
from .strategy import MonotoneStrategy

WORKERS_ENV = "SIMAUCTION_WORKERS"

INIT_RULES = ("half_value", "zero", "random")
UTILITY_KINDS = ("additive", "multiplicative", "polynomial")


class ScenarioError(ValueError):
    """Configuration problem; carries the offending field name."""

    def __init__(self, fld: str, message: str):
        super().__init__(f"config field '{fld}': {message}")
        self.field = fld


@dataclass(frozen=True)
class UtilityConfig:
    kind: str
    alpha: Fraction = Fraction(0)
    coefficients: tuple[tuple[Fraction, ...], ...] = ()

    def build(self) -> UtilitySpec:
        if self.kind == "additive":
            return model.additive_synergy(self.alpha)
        if self.kind == "multiplicative":
            return model.multiplicative()
        if self.kind == "polynomial":
            return model.custom_polynomial(self.coefficients)
        raise ScenarioError("utility.kind", f"unknown kind {self.kind!r}, expected one of {UTILITY_KINDS}")


@dataclass(frozen=True)
class Scenario:
    n: int
    m: int
    utility: UtilityConfig
    distribution: MarginalDist = field(default_factory=MarginalDist.uniform)
    seed: int = 0
    u_bar: Optional[Fraction] = None
    max_iter: int = 200
    init: str = "half_value"
    strategy_samples: int = 200

    def validate(self) -> None:
        for fld in ("n", "m", "seed", "max_iter", "strategy_samples"):
            value = getattr(self, fld)
            if not isinstance(value, int) or isinstance(value, bool):
                raise ScenarioError(fld, f"must be an integer, got {value!r}")
        if self.n < 1:
            raise ScenarioError("n", f"must be >= 1, got {self.n}")
        if self.m < 1:
            raise ScenarioError("m", f"must be >= 1, got {self.m}")
        if self.max_iter < 0:
            raise ScenarioError("max_iter", f"must be >= 0, got {self.max_iter}")
        if self.seed < 0:
            raise ScenarioError("seed", f"must be >= 0, got {self.seed}")
        if self.strategy_samples < 1:
            raise ScenarioError("strategy_samples", f"must be >= 1, got {self.strategy_samples}")
        if self.init not in INIT_RULES:
            raise ScenarioError("init", f"unknown rule {self.init!r}, expected one of {INIT_RULES}")
        try:
            spec = self.utility.build()
        except ScenarioError:
            raise
        except ValueError as exc:
            raise ScenarioError("utility", str(exc)) from None
        if self.u_bar is not None:
            if self.u_bar <= 0:
                raise ScenarioError("u_bar", f"must be positive, got {self.u_bar}")
            if self.u_bar > spec.u_max:
                raise ScenarioError(
                    "u_bar", f"override {self.u_bar} exceeds the joint value at (1,1) = {spec.u_max}"
                )
        cap = self.u_bar if self.u_bar is not None else spec.u_max
        if (cap * self.n).denominator != 1:
            raise ScenarioError(
                "n", f"maximum bid {cap} is not a multiple of 1/{self.n}; the bid lattice cannot align"
            )

    def build(self) -> "Instance":
        self.validate()
        spec = self.utility.build()
        cap = self.u_bar if self.u_bar is not None else spec.u_max
        bids = BidGrid(self.n, cap)
        grid = type_grid(self.distribution, self.m)
        return Instance(self, spec, bids, grid)


@dataclass(frozen=True)
class Instance:
    scenario: Scenario
    spec: UtilitySpec
    bids: BidGrid
    grid: TypeGrid

    def initial_strategy(self, bidder: int = 0) -> MonotoneStrategy:
        rule = self.scenario.init
        if rule == "half_value":
            return strategy_mod.half_value_strategy(self.grid, self.bids, self.spec)
        if rule == "zero":
            return strategy_mod.zero_strategy(self.grid, self.bids)
        return strategy_mod.random_monotone(self.grid, self.bids, self.scenario.seed + bidder)


# ---------------------------------------------------------------------------
# TOML parsing / emission


def _parse_fraction(raw, fld: str) -> Fraction:
    if isinstance(raw, bool):
        raise ScenarioError(fld, f"expected a number, got boolean {raw!r}")
    try:
        return to_fraction(raw)
    except (ValueError, TypeError, ZeroDivisionError):
        raise ScenarioError(fld, f"cannot interpret {raw!r} as a rational number") from None


def _parse_utility(raw, fld: str = "utility") -> UtilityConfig:
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ScenarioError(fld, "expected a table with a 'kind' key")
    kind = raw["kind"]
    if kind not in UTILITY_KINDS:
        raise ScenarioError(f"{fld}.kind", f"unknown kind {kind!r}, expected one of {UTILITY_KINDS}")
    unknown = set(raw) - {"kind", "alpha", "coefficients"}
    if unknown:
        raise ScenarioError(fld, f"unknown keys {sorted(unknown)}")
    alpha = _parse_fraction(raw.get("alpha", 0), f"{fld}.alpha")
    coefficients: tuple[tuple[Fraction, ...], ...] = ()
    if kind == "polynomial":
        rows = raw.get("coefficients")
        if not isinstance(rows, list) or not rows:
            raise ScenarioError(f"{fld}.coefficients", "polynomial utility needs a coefficient matrix")
        coefficients = tuple(
            tuple(_parse_fraction(c, f"{fld}.coefficients") for c in row) for row in rows
        )
    return UtilityConfig(kind=kind, alpha=alpha, coefficients=coefficients)


def _parse_distribution(raw, fld: str = "distribution") -> MarginalDist:
    if raw is None or raw == "uniform":
        return MarginalDist.uniform()
    if isinstance(raw, dict):
        kind = raw.get("kind")
        if kind == "uniform":
            return MarginalDist.uniform()
        if kind == "piecewise":
            knots = raw.get("knots")
            if not isinstance(knots, list):
                raise ScenarioError(f"{fld}.knots", "piecewise distribution needs a knots array")
            try:
                return MarginalDist.piecewise_linear(knots)
            except (ValueError, TypeError) as exc:
                raise ScenarioError(f"{fld}.knots", str(exc)) from None
        raise ScenarioError(f"{fld}.kind", f"unknown kind {kind!r}")
    raise ScenarioError(fld, f"expected 'uniform' or a table, got {raw!r}")


def parse_scenario(text: str) -> Scenario:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError("<document>", f"not valid TOML: {exc}") from None
    known = {
        "n",
        "m",
        "seed",
        "u_bar",
        "distribution",
        "utility",
        "max_iter",
        "init",
        "strategy_samples",
    }
    unknown = set(raw) - known
    if unknown:
        raise ScenarioError(sorted(unknown)[0], "unknown configuration key")
    for required in ("n", "m", "utility"):
        if required not in raw:
            raise ScenarioError(required, "required key missing")
    scenario = Scenario(
        n=raw["n"],
        m=raw["m"],
        utility=_parse_utility(raw["utility"]),
        distribution=_parse_distribution(raw.get("distribution")),
        seed=raw.get("seed", 0),
        u_bar=_parse_fraction(raw["u_bar"], "u_bar") if "u_bar" in raw else None,
        max_iter=raw.get("max_iter", 200),
        init=raw.get("init", "half_value"),
        strategy_samples=raw.get("strategy_samples", 200),
    )
    scenario.validate()
    return scenario


def load_scenario(path: str | Path) -> Scenario:
    return parse_scenario(Path(path).read_text())


def _toml_value(value) -> str:
    if isinstance(value, Fraction):
        return f'"{value}"'
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int,)):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    raise TypeError(f"cannot emit {value!r}")


def scenario_to_toml(s: Scenario) -> str:
    """Canonical TOML serialization; parse_scenario(scenario_to_toml(s)) == s."""
    lines = [f"n = {s.n}", f"m = {s.m}", f"seed = {s.seed}"]
    if s.u_bar is not None:
        lines.append(f"u_bar = {_toml_value(s.u_bar)}")
    if s.distribution.kind == "uniform":
        lines.append('distribution = "uniform"')
    else:
        knots = ", ".join(f"[{repr(x)}, {repr(f)}]" for x, f in s.distribution.knots)
        lines.append(f'distribution = {{ kind = "piecewise", knots = [{knots}] }}')
    u = s.utility
    if u.kind == "polynomial":
        rows = ", ".join("[" + ", ".join(_toml_value(c) for c in row) + "]" for row in u.coefficients)
        lines.append(f'utility = {{ kind = "polynomial", coefficients = [{rows}] }}')
    elif u.kind == "additive":
        lines.append(f'utility = {{ kind = "additive", alpha = {_toml_value(u.alpha)} }}')
    else:
        lines.append('utility = { kind = "multiplicative" }')
    lines.append(f"max_iter = {s.max_iter}")
    lines.append(f'init = "{s.init}"')
    lines.append(f"strategy_samples = {s.strategy_samples}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Monte Carlo simulation


@dataclass(frozen=True)
class OutcomeFrequencies:
    both: float
    only1: float
    only2: float
    neither: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.both, self.only1, self.only2, self.neither)


@dataclass(frozen=True)
class SimStats:
    draws: int
    frequencies: tuple[OutcomeFrequencies, OutcomeFrequencies]
    mean_revenue: float
    mean_total_utility: float
    efficiency: float


def _shard_sums(
    scenario: Scenario,
    s1_bids: tuple[BidPair, ...],
    s2_bids: tuple[BidPair, ...],
    draws: int,
    shard: int,
) -> tuple[np.ndarray, float, float, float, float]:
    """Outcome counts (2 x 4), revenue sum, utility sum, realized value sum,
    max attainable value sum for one shard of draws."""
    inst = scenario.build()
    grid, bids, spec = inst.grid, inst.bids, inst.spec
    rng = np.random.default_rng([scenario.seed, shard])
    weights = grid.weights_array
    t1 = rng.choice(len(grid), size=draws, p=weights)
    t2 = rng.choice(len(grid), size=draws, p=weights)
    coins = rng.integers(0, 2, size=(draws, 2)).astype(bool)  # True favors bidder 1

    idx1 = MonotoneStrategy(s1_bids).index_array(bids)
    idx2 = MonotoneStrategy(s2_bids).index_array(bids)
    b1 = idx1[t1]  # (draws, 2) level indices of bidder 1
    b2 = idx2[t2]

    lf = bids.levels_float
    won1 = np.empty((draws, 2), dtype=bool)
    for k in range(2):
        won1[:, k] = (b1[:, k] > b2[:, k]) | ((b1[:, k] == b2[:, k]) & coins[:, k])
    won2 = ~won1

    counts = np.zeros((2, 4), dtype=np.int64)
    for side, won in enumerate((won1, won2)):
        counts[side, 0] = int((won[:, 0] & won[:, 1]).sum())
        counts[side, 1] = int((won[:, 0] & ~won[:, 1]).sum())
        counts[side, 2] = int((~won[:, 0] & won[:, 1]).sum())
        counts[side, 3] = int((~won[:, 0] & ~won[:, 1]).sum())

    pay1 = np.where(won1[:, 0], lf[b1[:, 0]], 0.0) + np.where(won1[:, 1], lf[b1[:, 1]], 0.0)
    pay2 = np.where(won2[:, 0], lf[b2[:, 0]], 0.0) + np.where(won2[:, 1], lf[b2[:, 1]], 0.0)
    revenue_sum = float(pay1.sum() + pay2.sum())

    pts = grid.points
    both_val = np.array([spec.value(x.x1, x.x2) for x in pts])
    solo1 = np.array([spec.solo1(x.x1) for x in pts])
    solo2 = np.array([spec.solo2(x.x2) for x in pts])

    def realized(won: np.ndarray, t: np.ndarray) -> np.ndarray:
        return np.select(
            [won[:, 0] & won[:, 1], won[:, 0], won[:, 1]],
            [both_val[t], solo1[t], solo2[t]],
            default=0.0,
        )

    value1, value2 = realized(won1, t1), realized(won2, t2)
    value_sum = float(value1.sum() + value2.sum())
    utility_sum = float((value1 - pay1).sum() + (value2 - pay2).sum())
    best = np.maximum.reduce(
        [both_val[t1], both_val[t2], solo1[t1] + solo2[t2], solo1[t2] + solo2[t1]]
    )
    return counts, revenue_sum, utility_sum, value_sum, float(best.sum())


def _worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        count = int(raw)
    except ValueError:
        raise ScenarioError(WORKERS_ENV, f"worker count must be an integer, got {raw!r}") from None
    return max(1, count)


#: Logical shard size; the shard layout depends only on ``draws``, so the
#: worker count never changes simulation results.
SHARD_DRAWS = 25_000


def run_simulation(
    inst: Instance, s1: MonotoneStrategy, s2: MonotoneStrategy, draws: int
) -> SimStats:
    """Sample type pairs from the discretized distribution, play the two
    strategies, resolve ties with fresh fair coins, and aggregate outcome
    frequencies, revenue, utility, and allocative efficiency.

    Deterministic given the scenario seed. Work splits into fixed logical
    shards with per-shard derived seeds; SIMAUCTION_WORKERS only chooses how
    many processes consume them, and the merge is a shard-order sum, so
    results are identical for any worker count."""
    if draws < 1:
        raise ValueError(f"draws must be >= 1, got {draws}")
    n_shards = -(-draws // SHARD_DRAWS)
    base, extra = divmod(draws, n_shards)
    shard_sizes = [(base + (1 if k < extra else 0)) for k in range(n_shards)]
    shard_args = [
        (inst.scenario, s1.bids, s2.bids, size, shard)
        for shard, size in enumerate(shard_sizes)
        if size > 0
    ]
    workers = min(_worker_count(), len(shard_args))
    if workers == 1:
        results = [_shard_sums(*args) for args in shard_args]
    else:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_shard_sums, *zip(*shard_args)))

    counts = np.zeros((2, 4), dtype=np.int64)
    revenue_sum = utility_sum = value_sum = best_sum = 0.0
    for c, rev, util, val, best in results:
        counts += c
        revenue_sum += rev
        utility_sum += util
        value_sum += val
        best_sum += best
    freqs = tuple(
        OutcomeFrequencies(*(counts[side] / draws)) for side in range(2)
    )
    efficiency = value_sum / best_sum if best_sum > 0 else 1.0
    return SimStats(
        draws=draws,
        frequencies=freqs,  # type: ignore[arg-type]
        mean_revenue=revenue_sum / draws,
        mean_total_utility=utility_sum / draws,
        efficiency=efficiency,
    )


# ---------------------------------------------------------------------------
# CSV writers


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def _solution_rows(result_strategy: MonotoneStrategy, regrets, grid: TypeGrid):
    rows = []
    for tr in regrets:
        x = tr.x
        b = result_strategy[tr.type_index]
        rows.append([_fmt(x.x1), _fmt(x.x2), str(b.b1), str(b.b2), _fmt(tr.regret)])
    return rows


def _write_solve_outputs(out: Path, inst: Instance, result: solver.SolveResult) -> None:
    report = solver.check_equilibrium(
        result.strategies[0], result.strategies[1], inst.grid, inst.spec, inst.bids
    )
    for bidder in (0, 1):
        _write_csv(
            out / f"solution_bidder{bidder + 1}.csv",
            ["x1", "x2", "b1", "b2", "regret"],
            _solution_rows(result.strategies[bidder], report.bidder_regrets[bidder], inst.grid),
        )
        (out / f"strategy_bidder{bidder + 1}.csv").write_text(
            strategy_mod.to_csv(result.strategies[bidder], inst.grid)
        )
    _write_csv(
        out / "summary.csv",
        ["status", "iterations", "max_regret", "cycle_period"],
        [[result.status, result.iterations, _fmt(result.max_regret), result.cycle_period or ""]],
    )


def _violation_rows(violations: Sequence[properties.ViolationReport]):
    rows = []
    for v in violations:
        bid_cells: list[str] = []
        for b in v.bids:
            bid_cells += [str(b.b1), str(b.b2)]
        bid_cells += [""] * (4 - len(bid_cells))
        type_cells: list[str] = []
        for x in v.types:
            type_cells += [_fmt(x.x1), _fmt(x.x2)]
        type_cells += [""] * (4 - len(type_cells))
        premise = ["", ""] if v.premise is None else [_fmt(v.premise[0]), _fmt(v.premise[1])]
        rows.append(
            [v.property, *bid_cells, *type_cells, *premise, _fmt(v.conclusion[0]), _fmt(v.conclusion[1]),
             "" if v.strategy_seed is None else v.strategy_seed]
        )
    rows.sort()
    return rows


VIOLATION_HEADER = [
    "property",
    "bid_a_1", "bid_a_2", "bid_b_1", "bid_b_2",
    "x_a_1", "x_a_2", "x_b_1", "x_b_2",
    "premise_lhs", "premise_rhs", "conclusion_lhs", "conclusion_rhs",
    "strategy_seed",
]


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_solve(inst: Instance, out: Path) -> int:
    result = solver.iterate_best_response(
        inst.initial_strategy(0), inst.initial_strategy(1), inst.grid, inst.spec, inst.bids,
        max_iter=inst.scenario.max_iter,
    )
    _write_solve_outputs(out, inst, result)
    print(
        f"solve: status={result.status} iterations={result.iterations} "
        f"max_regret={_fmt(result.max_regret)}"
        + (f" cycle_period={result.cycle_period}" if result.cycle_period else "")
    )
    return 0


def _cmd_verify(inst: Instance, out: Path) -> int:
    scenario = inst.scenario
    report = model.validate_assumptions(inst.spec)
    if not report.ok:
        print(f"verify: note: utility violates assumptions {sorted(report.tags())} on the validation grid")
    enum = properties.hd_full_enumeration(inst.bids)
    _write_csv(
        out / "table1.csv",
        ["category", "d_sub", "h_sub", "reachable", "h_value", "d_value", "h_minus_d", "observed"],
        [
            [r["category"], r["d_sub"], r["h_sub"], r["reachable"], r["h_value"], r["d_value"],
             r["h_minus_d"], r["observed"]]
            for r in enum.table_rows()
        ],
    )
    (out / "table1.txt").write_text(enum.render_text())
    hd_bad = enum.negatives
    sweep = properties.strategy_sweep(
        inst.spec, inst.grid, inst.bids, count=scenario.strategy_samples, seed=scenario.seed
    )
    _write_csv(out / "witnesses.csv", VIOLATION_HEADER, _violation_rows(sweep.violations))
    for name in (properties.WSC, properties.WQS, properties.INEQ_W):
        found = len(sweep.by_property(name))
        print(f"verify: {name}: {'PASS' if not found else 'FAIL'} ({found} violations)")
    print(
        f"verify: H-D enumeration: {'PASS' if not hd_bad else 'FAIL'} "
        f"({len(enum.records)} configurations, min H-D = {enum.min_h_minus_d})"
    )
    return 2 if (sweep.violations or hd_bad) else 0


def _load_strategy_arg(path: str, inst: Instance) -> MonotoneStrategy:
    return strategy_mod.from_csv(Path(path).read_text(), inst.grid, inst.bids)


def _cmd_simulate(inst: Instance, out: Path, draws: int, s1_path: Optional[str], s2_path: Optional[str]) -> int:
    if (s1_path is None) != (s2_path is None):
        raise ScenarioError("strategies", "supply both --strategy1 and --strategy2, or neither")
    if s1_path is not None and s2_path is not None:
        s1 = _load_strategy_arg(s1_path, inst)
        s2 = _load_strategy_arg(s2_path, inst)
    else:
        result = solver.iterate_best_response(
            inst.initial_strategy(0), inst.initial_strategy(1), inst.grid, inst.spec, inst.bids,
            max_iter=inst.scenario.max_iter,
        )
        s1, s2 = result.strategies
    stats = run_simulation(inst, s1, s2, draws)
    rows = []
    for side in (0, 1):
        f = stats.frequencies[side]
        rows.append([side + 1, _fmt(f.both), _fmt(f.only1), _fmt(f.only2), _fmt(f.neither)])
    _write_csv(out / "simulation_frequencies.csv", ["bidder", "both", "only1", "only2", "neither"], rows)
    _write_csv(
        out / "simulation_stats.csv",
        ["draws", "mean_revenue", "mean_total_utility", "efficiency"],
        [[stats.draws, _fmt(stats.mean_revenue), _fmt(stats.mean_total_utility), _fmt(stats.efficiency)]],
    )
    print(
        f"simulate: draws={stats.draws} mean_revenue={_fmt(stats.mean_revenue)} "
        f"mean_total_utility={_fmt(stats.mean_total_utility)} efficiency={_fmt(stats.efficiency)}"
    )
    return 0


def _cmd_enumerate(inst: Instance, out: Path, cap: int) -> int:
    result = solver.exhaustive_equilibria(inst.grid, inst.spec, inst.bids, cap)
    rows = []
    for k, (s1, s2) in enumerate(result.equilibria):
        for bidder, s in ((1, s1), (2, s2)):
            for t, x in enumerate(inst.grid.points):
                b = s[t]
                rows.append([k, bidder, _fmt(x.x1), _fmt(x.x2), str(b.b1), str(b.b2)])
    _write_csv(out / "equilibria.csv", ["profile", "bidder", "x1", "x2", "b1", "b2"], rows)
    print(
        f"enumerate: {len(result.equilibria)} exact equilibria among "
        f"{result.strategies_considered} monotone strategies"
        + (" (truncated)" if result.truncated else "")
    )
    return 0


def _cmd_probe(inst: Instance, b1: str, b2: str, x1: float, x2: float, opponent: Optional[str]) -> int:
    if opponent is not None:
        opp = _load_strategy_arg(opponent, inst)
    else:
        opp = inst.initial_strategy(1)
    mu = induced_bid_distribution(opp, inst.grid, inst.bids)
    try:
        b = BidPair(to_fraction(b1), to_fraction(b2))
        inst.bids.pair_index(b)
    except ValueError as exc:
        raise ScenarioError("b1/b2", str(exc)) from None
    x = TypePoint(x1, x2)
    wp = win_probs(mu, b)
    v = interim_utility(b, x, mu, inst.spec)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["b1", "b2", "q1", "q2", "q3", "p1", "p2", "p3", "V"])
    writer.writerow([str(b.b1), str(b.b2), _fmt(wp.q1), _fmt(wp.q2), _fmt(wp.q3),
                     _fmt(wp.p1), _fmt(wp.p2), _fmt(wp.p3), _fmt(v)])
    return 0


def cli_main(argv: Sequence[str]) -> int:
    parser = argparse.ArgumentParser(
        prog="simauction",
        description="Simultaneous first-price auctions with complementary goods: "
        "solve, verify, simulate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_: str):
        p = sub.add_parser(name, help=help_)
        p.add_argument("scenario", help="path to a scenario TOML file")
        p.add_argument("--out", default="out", help="output directory (default: ./out)")
        return p

    add("solve", "best-reply iteration from the configured initial strategies")
    add("verify", "property sweeps and the H-D case enumeration")
    p_sim = add("simulate", "Monte Carlo play of solved or supplied strategies")
    p_sim.add_argument("--draws", type=int, default=100_000)
    p_sim.add_argument("--strategy1", help="bidder 1 strategy CSV (default: solve first)")
    p_sim.add_argument("--strategy2", help="bidder 2 strategy CSV")
    p_enum = add("enumerate", "exhaustive equilibrium enumeration on tiny instances")
    p_enum.add_argument(
        "--cap", type=int, default=1000,
        help="max strategies to enumerate per player (profile checks are quadratic in this)",
    )
    p_probe = add("probe", "winning probabilities and utility of one bid/type query")
    p_probe.add_argument("--b1", required=True)
    p_probe.add_argument("--b2", required=True)
    p_probe.add_argument("--x1", type=float, required=True)
    p_probe.add_argument("--x2", type=float, required=True)
    p_probe.add_argument("--opponent", help="opponent strategy CSV (default: scenario init rule)")

    args = parser.parse_args(argv)
    try:
        inst = load_scenario(args.scenario).build()
        out = Path(args.out)
        if args.command == "solve":
            return _cmd_solve(inst, out)
        if args.command == "verify":
            return _cmd_verify(inst, out)
        if args.command == "simulate":
            return _cmd_simulate(inst, out, args.draws, args.strategy1, args.strategy2)
        if args.command == "enumerate":
            return _cmd_enumerate(inst, out, args.cap)
        if args.command == "probe":
            return _cmd_probe(inst, args.b1, args.b2, args.x1, args.x2, args.opponent)
        raise AssertionError(f"unhandled command {args.command}")
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (solver.NoGreatestElementError, solver.MonotonicityBrokenError) as exc:
        print(f"error: best-reply selection failed: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:  # console entry point
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
