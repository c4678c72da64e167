import numpy as np
import pytest

from core_math.types import SignVector


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def make_rng():
    def _make(seed=0):
        return np.random.default_rng(seed)
    return _make


@pytest.fixture
def parity_pair():
    """f, g on n = 2 whose product is the parity of bit 0"""
    return SignVector([1, 1, 1, -1]), SignVector([1, -1, 1, 1])
