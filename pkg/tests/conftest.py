import numpy as np
import pytest

from zkg.spectral import Grid, frequency_field, physical_field


@pytest.fixture
def grid2d():
    return Grid(dim=2, n=16, L=16.0)


@pytest.fixture
def grid3d():
    return Grid(dim=3, n=16, L=16.0)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def random_physical(grid, rng, complex_field=True):
    v = rng.standard_normal(grid.shape)
    if complex_field:
        v = v + 1j * rng.standard_normal(grid.shape)
    return physical_field(grid, v)


def random_zero_mean_frequency(grid, rng):
    v = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    v[(0,) * grid.dim] = 0.0
    return frequency_field(grid, v)
