import sys
import os

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from core.gdd import GddParams
from core.hyperdomain import Partition


@pytest.fixture
def two_groups():
    """K=3 with groups {0} and {1, 2}."""
    return Partition.checked(3, [[0], [1, 2]])


@pytest.fixture
def default_partition():
    return Partition.checked(6, [[0], [1, 2], [3], [4, 5]])


@pytest.fixture
def table_params(two_groups):
    """GDD parameters from evidence (3, 0, 0 | 24)."""
    return GddParams.of([4.0, 1.0, 1.0], [0.0, 24.0], two_groups)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
