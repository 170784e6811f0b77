import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from margcone.schottky import one_holed_torus, rotational, three_holed_sphere

settings.register_profile(
    "repro", derandomize=True, deadline=None, max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repro")


@pytest.fixture(scope="session")
def pants():
    return three_holed_sphere(4.0, 4.0)


@pytest.fixture(scope="session")
def torus():
    return one_holed_torus(5.0, 5.0, math.pi / 3)


@pytest.fixture(scope="session")
def triple():
    return rotational(3, 5.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
