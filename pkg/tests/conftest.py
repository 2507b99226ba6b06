import numpy as np
import pytest

from mixsynth.synthesis import enumerate_library


@pytest.fixture(scope="session")
def full_library():
    """Library deep enough for oracle calls at error 0.03 anywhere on the
    meridian; built once per session (~10 s budget, measured well under)."""
    return enumerate_library(10, 36)


@pytest.fixture(scope="session")
def small_library():
    return enumerate_library(5, 16)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
