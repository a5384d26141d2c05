import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from prophet_lab.dist_core import FiniteDist

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def dists(draw, max_points=6, max_value=20.0, min_points=1):
    """Random FiniteDist with well-separated support and masses bounded away from 0."""
    m = draw(st.integers(min_points, max_points))
    grid = draw(st.lists(st.integers(0, int(max_value * 8)), min_size=m, max_size=m, unique=True))
    support = np.sort(np.array(grid, dtype=float) / 8.0)
    w = draw(st.lists(st.floats(0.05, 1.0), min_size=m, max_size=m))
    probs = np.array(w) / sum(w)
    return FiniteDist(support, probs)


@pytest.fixture
def three_point():
    return FiniteDist([0.0, 1.0, 10.0], [0.5, 0.4, 0.1])


@pytest.fixture
def coin():
    return FiniteDist([0.0, 1.0], [0.5, 0.5])


@pytest.fixture
def rng():
    return np.random.default_rng(20260419)
