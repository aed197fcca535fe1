import numpy as np
import pytest

from helmshape.geometry import make_disk, make_smooth_curve

# Fixed seed for every test that wants arbitrary densities; nothing in
# the library itself is randomized.
SEED = 20240817


def rng():
    return np.random.default_rng(SEED)


@pytest.fixture(scope="session")
def unit_disk_64():
    return make_disk(1.0, 64)


@pytest.fixture(scope="session")
def unit_disk_128():
    return make_disk(1.0, 128)


@pytest.fixture(scope="session")
def unit_disk_256():
    return make_disk(1.0, 256)


@pytest.fixture(scope="session")
def star_curve_128():
    return make_smooth_curve(lambda t: 1.0 + 0.15 * np.cos(3 * t), 128)
