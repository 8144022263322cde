import numpy as np
import pytest

from shpfc import SpectralGrid


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))


@pytest.fixture
def grid32():
    return SpectralGrid(32, 32.0)


@pytest.fixture
def grid_2pi():
    return SpectralGrid(32, 2.0 * np.pi)


def random_field(rng, M, amplitude=1.0):
    return amplitude * rng.standard_normal((M, M))


def mean_zero(grid, u):
    return u - u.mean()
