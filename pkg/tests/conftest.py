import numpy as np
import pytest

from rmdyn import Grid1D, GaussianParams, gaussian_packet


@pytest.fixture
def grid():
    return Grid1D(256, -10.0, 10.0)


@pytest.fixture
def fine_grid():
    return Grid1D(512, -10.0, 10.0)


def brute_moments(psi):
    """Independent midpoint-quadrature oracle for position moments."""
    x = psi.grid.x
    dens = np.abs(psi.amp) ** 2
    total = dens.sum() * psi.grid.dx
    mu = (x * dens).sum() * psi.grid.dx / total
    var = ((x - mu) ** 2 * dens).sum() * psi.grid.dx / total
    return mu, np.sqrt(var)


def packet(grid, a=0.0, p=0.0, sigma=1.0):
    return gaussian_packet(GaussianParams(a, p, sigma), grid)
