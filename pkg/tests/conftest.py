import numpy as np
import pytest

from biphoton import FreqGrid


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_grids():
    return FreqGrid(60.0, 64), FreqGrid(60.0, 128)
