"""Two-bidder, two-object simultaneous first-price auctions with
complementary goods: exact interim utilities on discretized instances,
monotone equilibrium search, and numerical verification of the ordering
properties behind monotone-equilibrium existence."""

from .model import (
    Allocation,
    BidGrid,
    BidPair,
    TypePoint,
    UtilitySpec,
    additive_synergy,
    allocate,
    custom_polynomial,
    ex_post_utility,
    multiplicative,
    q_both,
    validate_assumptions,
)
from .distribution import (
    BidDistribution,
    MarginalDist,
    TypeGrid,
    cumulative_masses,
    discretize,
    induced_bid_distribution,
    point_mass,
    product_grid,
    type_grid,
)
from .interim import (
    WinProbs,
    interim_utility,
    interim_utility_exclusive,
    q1,
    q2,
    q3,
    win_prob_tables,
    win_probs,
)
from .strategy import (
    MonotoneStrategy,
    enumerate_monotone,
    half_value_strategy,
    is_monotone,
    random_monotone,
    zero_strategy,
)
from .solver import (
    MonotonicityBrokenError,
    NoGreatestElementError,
    SolveResult,
    best_response_set,
    check_equilibrium,
    exhaustive_equilibria,
    iterate_best_response,
    monotone_best_reply,
)
from .properties import (
    HDRecord,
    ViolationReport,
    check_ineq_w,
    check_wqs,
    check_wsc,
    hd_full_enumeration,
    hd_table,
    strategy_sweep,
)
from .simcli import Scenario, SimStats, cli_main, load_scenario, parse_scenario, run_simulation

__version__ = "0.1.0"
