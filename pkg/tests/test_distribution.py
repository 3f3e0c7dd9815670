import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from simauction.distribution import (
    BELOW,
    EQUAL,
    BidDistribution,
    MarginalDist,
    cumulative_masses,
    discretize,
    induced_bid_distribution,
    point_mass,
    product_grid,
    type_grid,
)
from simauction.model import BidGrid, BidPair
from simauction.strategy import random_monotone

from helpers import bp


class TestMarginalDist:
    def test_uniform_quantiles(self):
        u = MarginalDist.uniform()
        assert discretize(u, 2) == ((0.25, 0.75), (0.5, 0.5))
        pts, wts = discretize(u, 5)
        assert pts == (0.1, 0.3, 0.5, 0.7, 0.9)
        assert wts == (0.2,) * 5

    def test_piecewise_quantiles(self):
        # derived by solving the segment equations: F(x) = 1.6x on [0, 0.5]
        d = MarginalDist.piecewise_linear([(0, 0), (0.5, 0.8), (1, 1)])
        pts, _ = discretize(d, 2)
        assert pts == (0.15625, 0.46875)

    def test_flat_segment_generalized_inverse(self):
        d = MarginalDist.piecewise_linear([(0, 0), (0.3, 0.5), (0.6, 0.5), (1, 1)])
        assert d.quantile(0.5) == pytest.approx(0.3)  # inf over the flat stretch
        assert d.quantile(0.75) == pytest.approx(0.8)

    def test_atom_rejected(self):
        with pytest.raises(ValueError, match="atomless"):
            MarginalDist.piecewise_linear([(0, 0), (0.5, 0.2), (0.5, 0.8), (1, 1)])

    def test_endpoints_enforced(self):
        with pytest.raises(ValueError):
            MarginalDist.piecewise_linear([(0, 0.1), (1, 1)])

    def test_cdf_quantile_consistency(self):
        d = MarginalDist.piecewise_linear([(0, 0), (0.25, 0.6), (1, 1)])
        for p in (0.0, 0.1, 0.3, 0.6, 0.9, 1.0):
            assert d.cdf(d.quantile(p)) == pytest.approx(p)


class TestTypeGrid:
    def test_single_point(self):
        g = product_grid([0.5], [1.0])
        assert g.points == ((0.5, 0.5),)
        assert g.weights == (1.0,)

    def test_uniform_m2(self):
        g = type_grid(MarginalDist.uniform(), 2)
        assert len(g) == 4
        assert all(w == 0.25 for w in g.weights)

    def test_product_weights(self):
        g = product_grid([0.1, 0.2, 0.9], [0.2, 0.3, 0.5])
        # weight of (points[2], points[1]) = 0.5 * 0.3
        assert g.weights[g.index(2, 1)] == pytest.approx(0.15)

    def test_weights_sum_to_one(self):
        g = type_grid(MarginalDist.piecewise_linear([(0, 0), (0.5, 0.8), (1, 1)]), 7)
        assert abs(math.fsum(g.weights) - 1.0) <= 1e-12

    def test_uniform_symmetry_mean(self):
        g = type_grid(MarginalDist.uniform(), 9)
        mean1 = math.fsum(w * x.x1 for w, x in zip(g.weights, g.points))
        mean2 = math.fsum(w * x.x2 for w, x in zip(g.weights, g.points))
        assert abs(mean1 - 0.5) <= 1e-12 and abs(mean2 - 0.5) <= 1e-12

    def test_lexicographic_order(self):
        g = type_grid(MarginalDist.uniform(), 3)
        assert list(g.points) == sorted(g.points)


class TestInducedBidDistribution:
    def test_constant_strategy_point_mass(self, unit_grid_n4, uniform_types_m5):
        from simauction.strategy import constant_strategy

        s = constant_strategy(uniform_types_m5, bp(0, 0))
        mu = induced_bid_distribution(s, uniform_types_m5, unit_grid_n4)
        assert len(mu.atoms) == 1
        b, w = mu.atoms[0]
        assert b == bp(0, 0) and abs(w - 1.0) <= 1e-12

    def test_distinct_bids_equal_mass(self, unit_grid_n4):
        from simauction.strategy import MonotoneStrategy

        grid = type_grid(MarginalDist.uniform(), 2)
        s = MonotoneStrategy((bp(0, 0), bp(0, "1/4"), bp("1/4", 0), bp("1/4", "1/4")))
        mu = induced_bid_distribution(s, grid, unit_grid_n4)
        assert len(mu.atoms) == 4
        assert all(w == pytest.approx(0.25) for _, w in mu.atoms)

    def test_merged_bids_sum_weights(self, unit_grid_n4):
        from simauction.strategy import MonotoneStrategy

        grid = product_grid([0.2, 0.8], [0.25, 0.75])
        s = MonotoneStrategy((bp(0, 0), bp(0, 0), bp(0, 0), bp("1/2", "1/2")))
        mu = induced_bid_distribution(s, grid, unit_grid_n4)
        # brute-force regrouping of the pushforward
        expected = {}
        for t, w in enumerate(grid.weights):
            expected[s[t]] = expected.get(s[t], 0.0) + w
        assert set(mu.mass) == set(expected)
        for b, w in expected.items():
            assert mu.mass_of(b) == pytest.approx(w, abs=1e-15)

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=50, deadline=None)
    def test_pushforward_conserves_mass(self, seed):
        bids = BidGrid(4, Fraction(1))
        grid = type_grid(MarginalDist.uniform(), 4)
        s = random_monotone(grid, bids, seed)
        mu = induced_bid_distribution(s, grid, bids)
        assert abs(math.fsum(w for _, w in mu.atoms) - 1.0) <= 1e-12

    def test_monotone_image_dominates_on_upper_sets(self, unit_grid_n4):
        # conditioning a monotone strategy on a higher principal upper set
        # shifts both marginal bid CDFs down (first-order dominance)
        grid = type_grid(MarginalDist.uniform(), 5)
        m = grid.m
        for seed in range(40):
            s = random_monotone(grid, unit_grid_n4, seed)
            for lo_i, lo_j, hi_i, hi_j in ((0, 0, 2, 1), (1, 1, 3, 3), (0, 2, 2, 2)):
                for coord in (0, 1):
                    cdf_lo = _conditional_bid_cdf(s, grid, unit_grid_n4, lo_i, lo_j, coord)
                    cdf_hi = _conditional_bid_cdf(s, grid, unit_grid_n4, hi_i, hi_j, coord)
                    assert all(h <= l + 1e-12 for l, h in zip(cdf_lo, cdf_hi))


def _conditional_bid_cdf(s, grid, bids, ti, tj, coord):
    """Marginal CDF over bid levels of one bid coordinate, conditional on
    types in the principal upper set at grid cell (ti, tj)."""
    m = grid.m
    total = 0.0
    mass = [0.0] * bids.size
    for i in range(ti, m):
        for j in range(tj, m):
            t = grid.index(i, j)
            w = grid.weights[t]
            mass[bids.index(s[t][coord])] += w
            total += w
    acc, out = 0.0, []
    for v in mass:
        acc += v / total
        out.append(acc)
    return out


class TestCumulativeMasses:
    def test_point_mass_below(self, unit_grid_n4):
        mu = point_mass(unit_grid_n4, bp(0, 0))
        cells = cumulative_masses(mu, bp("1/4", "1/4"))
        assert cells[BELOW, BELOW] == 1.0
        assert cells.sum() == 1.0

    def test_point_mass_at_query(self, unit_grid_n4):
        mu = point_mass(unit_grid_n4, bp("1/2", "3/4"))
        cells = cumulative_masses(mu, bp("1/2", "3/4"))
        assert cells[EQUAL, EQUAL] == 1.0

    def test_four_atoms_hand_count(self, unit_grid_n4):
        mu = BidDistribution(
            unit_grid_n4,
            ((bp(0, 0), 0.25), (bp(0, "1/2"), 0.25), (bp("1/2", "1/2"), 0.25), (bp("3/4", "1/4"), 0.25)),
        )
        cells = cumulative_masses(mu, bp("1/2", "1/2"))
        assert cells[BELOW, BELOW] == 0.25  # (0,0)
        assert cells[BELOW, EQUAL] == 0.25  # (0,1/2)
        assert cells[EQUAL, EQUAL] == 0.25  # (1/2,1/2)
        assert cells[2, BELOW] == 0.25  # (3/4,1/4)

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_cells_always_sum_to_one(self, seed):
        bids = BidGrid(2, Fraction(1))
        grid = type_grid(MarginalDist.uniform(), 3)
        s = random_monotone(grid, bids, seed)
        mu = induced_bid_distribution(s, grid, bids)
        for b in bids.pairs():
            assert abs(cumulative_masses(mu, b).sum() - 1.0) <= 1e-12


class TestBidDistributionValidation:
    def test_mass_must_sum_to_one(self, unit_grid_n4):
        with pytest.raises(ValueError, match="sum to 1"):
            BidDistribution(unit_grid_n4, ((bp(0, 0), 0.5),))

    def test_off_grid_support_rejected(self, unit_grid_n4):
        with pytest.raises(ValueError, match="not on the grid"):
            BidDistribution(unit_grid_n4, ((BidPair(Fraction(1, 3), Fraction(0)), 1.0),))

    def test_transpose(self, unit_grid_n4):
        mu = BidDistribution(unit_grid_n4, ((bp(0, "1/4"), 0.5), (bp("1/2", "3/4"), 0.5)))
        assert mu.transpose().atoms == ((bp("1/4", 0), 0.5), (bp("3/4", "1/2"), 0.5))
