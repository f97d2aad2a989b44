import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from hemipwi.pwi import Protocol

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

angles = st.floats(min_value=0.0, max_value=np.pi, exclude_max=True, allow_nan=False)
protocols = st.builds(Protocol, angles, angles)


@st.composite
def hemisphere_points(draw):
    """Unit vectors with ``y < 0``, bounded away from the equator."""
    v = np.array([draw(st.floats(-1.0, 1.0)) for _ in range(3)])
    v[1] = -abs(v[1]) - 1e-3
    return v / np.linalg.norm(v)


def random_hemisphere(n, seed=0):
    rng = np.random.default_rng(seed)
    p = rng.normal(size=(n, 3))
    p /= np.linalg.norm(p, axis=1, keepdims=True)
    p[:, 1] = -np.abs(p[:, 1])
    return p


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
