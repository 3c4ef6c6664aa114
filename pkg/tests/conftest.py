import numpy as np
import pytest

from boundstate_lab.core.numgrid import make_space_grid
from boundstate_lab.core.potentials import bump, gaussian, well


@pytest.fixture
def grid_1d():
    return make_space_grid(1, 20, 128)


@pytest.fixture
def small_grid_1d():
    return make_space_grid(1, 8, 64)


@pytest.fixture
def well_grid():
    # h = 0.15625 puts the well edge between nodes 0.9375 and 1.09375
    return make_space_grid(1, 40, 512)


@pytest.fixture
def grid_2d():
    return make_space_grid(2, 4, 16)


@pytest.fixture
def gaussian_1d(grid_1d):
    return gaussian(grid_1d, 5.0, 1.0)


@pytest.fixture
def deep_well(well_grid):
    return well(well_grid, 10.0, 1.0)


@pytest.fixture
def bump_1d():
    return bump(make_space_grid(1, 5, 64), 4.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
