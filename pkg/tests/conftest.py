import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


def random_coords(fam_name: str, n: int, seed: int) -> np.ndarray:
    """Random ground-set coordinates of the right ambient dimension."""
    rng = np.random.default_rng(seed)
    if fam_name == "intervals":
        return rng.random(n)
    return rng.random((n, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(0)
