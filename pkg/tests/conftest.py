import numpy as np
import pytest

from lppsim.tracy_widom import default_table


@pytest.fixture(scope="session")
def tw_table():
    # lru-cached in the library; the fixture just makes the dependency visible
    return default_table()


@pytest.fixture()
def rng():
    return np.random.default_rng(20260815)
