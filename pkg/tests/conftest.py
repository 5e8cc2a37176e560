import numpy as np
import pytest

from dyncorr.distributions import RngStream


@pytest.fixture
def rng():
    """Library stream with a fixed seed."""
    return RngStream(20240811)


@pytest.fixture
def np_rng():
    """Plain numpy generator for test-side randomness."""
    return np.random.default_rng(987654321)
