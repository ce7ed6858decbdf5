import numpy as np
import pytest

from ramseylab.census import enumerate_tournaments
from ramseylab.tournaments import random_tournament


@pytest.fixture(scope="session")
def census6():
    """Codes for n=1..6, cached on disk after the first call."""
    return {n: enumerate_tournaments(n) for n in range(1, 7)}


@pytest.fixture(scope="session")
def t40():
    return random_tournament(40, seed=424242)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260823)
