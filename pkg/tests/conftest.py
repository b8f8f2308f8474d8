import numpy as np
import pytest
from hypothesis import settings

from holowave.spectral import PeriodicGrid

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid2pi():
    return PeriodicGrid(64, 2 * np.pi)


def band_limited(rng, grid, modes, scale=1.0):
    spec = np.zeros(grid.n_points // 2 + 1, dtype=complex)
    spec[1 : modes + 1] = rng.standard_normal(modes) + 1j * rng.standard_normal(modes)
    u = np.fft.irfft(spec, n=grid.n_points)
    return scale * u / np.max(np.abs(u))
