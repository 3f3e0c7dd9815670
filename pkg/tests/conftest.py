from fractions import Fraction

import pytest

from simauction.distribution import MarginalDist, type_grid
from simauction.model import BidGrid, BidPair


@pytest.fixture
def unit_grid_n4() -> BidGrid:
    """Bid levels {0, 1/4, 1/2, 3/4, 1}."""
    return BidGrid(4, Fraction(1))


@pytest.fixture
def unit_grid_n2() -> BidGrid:
    """Bid levels {0, 1/2, 1}."""
    return BidGrid(2, Fraction(1))


@pytest.fixture
def uniform_types_m5():
    return type_grid(MarginalDist.uniform(), 5)


def bp(a, b) -> BidPair:
    return BidPair(Fraction(a), Fraction(b))
