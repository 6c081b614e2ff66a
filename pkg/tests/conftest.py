import numpy as np
import pytest

from miniq.legkin import DEFAULT_GEOMETRY, LegGeometry


@pytest.fixture
def unit():
    return LegGeometry(1.0, 1.0)


@pytest.fixture
def default_geom():
    return DEFAULT_GEOMETRY


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)
