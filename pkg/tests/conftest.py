import pytest

from bgwqsd.branching import load_offspring
from bgwqsd.yaglom import yaglom_limit


@pytest.fixture
def pure_death():
    """F(z) = 1 - m(1 - z) with m = 1/2."""
    return load_offspring({"type": "pure_death", "m": 0.5})


@pytest.fixture
def geometric():
    """Linear fractional law p_k = (4/5)(1/5)^k with m = 1/4."""
    return load_offspring({"type": "geometric", "b": 0.2})


@pytest.fixture
def geometric_third():
    """Linear fractional law p_k = (3/4)(1/4)^k with m = 1/3."""
    return load_offspring({"type": "geometric", "b": 0.25})


@pytest.fixture
def quadratic():
    return load_offspring({"type": "pmf", "p": [0.5, 0.3, 0.2]})


@pytest.fixture
def geometric_yaglom(geometric):
    return yaglom_limit(geometric, 512)
