import numpy as np
import pytest

from lkcurv import builtin_graphs, builtin_sets


@pytest.fixture(scope="session")
def sets():
    return builtin_sets()


@pytest.fixture(scope="session")
def graphs():
    return builtin_graphs()


@pytest.fixture()
def rng():
    return np.random.Generator(np.random.Philox(key=np.array([101, 7], dtype=np.uint64)))
