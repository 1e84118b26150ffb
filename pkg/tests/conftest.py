import numpy as np
import pytest

from src.drkit.htype_group import heisenberg, quaternionic


@pytest.fixture(scope="session")
def heis():
    return heisenberg(1)


@pytest.fixture(scope="session")
def quat():
    return quaternionic(1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
