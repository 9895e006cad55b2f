import numpy as np
import pytest


def ambient_points(n, seed, u1_range=(0.5, 50.0)):
    """Points of R^4 with u1 = |x|^2 log-uniform in u1_range."""
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(n, 4))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    u1 = np.exp(rng.uniform(*np.log(u1_range), size=n))
    return dirs * np.sqrt(u1)[:, None]


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
