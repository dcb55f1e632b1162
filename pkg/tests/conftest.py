import numpy as np
import pytest

from libssns.grid import Grid, gaussian_curl_field, lp_norm


@pytest.fixture(scope="session")
def small_grid():
    """ Cheap grid for algebraic identities """
    return Grid(16, 16.0)


@pytest.fixture(scope="session")
def fine_grid():
    """ Resolves unit-width Gaussians; used for exactness checks """
    return Grid(64, 16.0)


@pytest.fixture(scope="session")
def wide_grid():
    """ Box wide enough for width-16 data over tau in [0, 0.5] """
    return Grid(32, 32.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def small_data(wide_grid):
    """ Divergence-free Gaussian data with ||V0||_4 = 1e-3 """
    V0 = gaussian_curl_field(wide_grid, width=16.0)
    return V0 * (1e-3 / lp_norm(V0, 4.0))
