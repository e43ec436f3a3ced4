import numpy as np
import pytest


@pytest.fixture
def rng():
    """One fixed generator per test; reseeded so tests stay order-independent."""
    return np.random.default_rng(20260819)
