import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from holowave import spectral as sp
from holowave.errors import ZeroModeError
from holowave.holomorphic import (
    holomorphic_product,
    holomorphy_defect,
    im_part_of_projection,
    make_holomorphic,
    project_Ph,
    tilbert_product_defect,
)
from holowave.spectral import PeriodicGrid

from conftest import band_limited


def test_make_holomorphic_examples(grid2pi):
    a = grid2pi.nodes
    z = make_holomorphic(grid2pi, np.zeros(64), 1.0)
    assert np.all(z.re == 0) and np.all(z.im == 0)
    z = make_holomorphic(grid2pi, np.cos(a), 1.0)
    assert np.allclose(z.im, -np.tanh(1.0) * np.sin(a), atol=1e-14)
    assert z.defect() <= 1e-12 and z.is_holomorphic()
    z = make_holomorphic(grid2pi, np.full(64, 2.5), 1.0)
    assert np.all(z.re == 2.5) and np.all(z.im == 0)


def test_project_examples(grid2pi, rng):
    a = grid2pi.nodes
    p = project_Ph(grid2pi, np.cos(a), 1.0)
    assert np.allclose(p.value, 0.5 * (np.cos(a) - 1j * np.tanh(1.0) * np.sin(a)), atol=1e-14)
    hol = make_holomorphic(grid2pi, band_limited(rng, grid2pi, 20), 0.8)
    assert np.allclose(project_Ph(grid2pi, hol.value, 0.8).value, hol.value, atol=1e-13)
    with pytest.raises(ZeroModeError):
        project_Ph(grid2pi, 1j * np.full(64, 0.2), 1.0)


def test_im_part_examples(grid2pi, rng):
    a = grid2pi.nodes
    u = band_limited(rng, grid2pi, 20)
    assert np.allclose(im_part_of_projection(grid2pi, u, 1.0), -0.5 * sp.tilbert(grid2pi, u, 1.0), atol=1e-15)
    hol = make_holomorphic(grid2pi, u, 1.0)
    assert np.allclose(im_part_of_projection(grid2pi, hol.value, 1.0), hol.im, atol=1e-14)
    assert np.allclose(im_part_of_projection(grid2pi, 1j * np.sin(a), 1.0), 0.5 * np.sin(a), atol=1e-15)


def test_product_defect_examples(grid2pi, rng):
    z = np.zeros(64)
    assert tilbert_product_defect(grid2pi, z, z, 1.0) == 0
    v = band_limited(rng, grid2pi, 20)
    assert tilbert_product_defect(grid2pi, np.full(64, 1.7), v, 1.0) <= 1e-14


def test_holomorphy_defect_examples(grid2pi):
    a = grid2pi.nodes
    z = make_holomorphic(grid2pi, np.cos(2 * a), 1.0)
    assert holomorphy_defect(grid2pi, z.value, 1.0) <= 1e-12
    assert holomorphy_defect(grid2pi, np.conj(z.value), 1.0) > 0.1
    assert holomorphy_defect(grid2pi, np.full(64, 3.0), 1.0) == 0


def test_not_a_complex_algebra(grid2pi):
    z = make_holomorphic(grid2pi, np.cos(grid2pi.nodes), 1.0)
    assert holomorphy_defect(grid2pi, 1j * z.value, 1.0) > 0.1


seeds = st.integers(0, 2**31 - 1)


@given(seeds, st.floats(0.2, 4.0))
def test_idempotence(seed, h):
    g = PeriodicGrid(128, 12.0)
    r = np.random.default_rng(seed)
    p, q = band_limited(r, g, 50), band_limited(r, g, 50)
    u = p + 0.3 + 1j * (q - np.mean(q))
    once = project_Ph(g, u, h)
    twice = project_Ph(g, once.value, h)
    assert sp.l2_norm(g, twice.value - once.value) <= 1e-10 * sp.l2_norm(g, u)
    assert np.allclose(once.im, im_part_of_projection(g, u, h), atol=1e-13)


@given(seeds, st.floats(-3, 3), st.floats(-3, 3))
def test_real_linear_closure(seed, a, b):
    g = PeriodicGrid(64, 7.0)
    r = np.random.default_rng(seed)
    u = make_holomorphic(g, band_limited(r, g, 20), 1.0)
    v = make_holomorphic(g, band_limited(r, g, 20), 1.0)
    assert holomorphy_defect(g, a * u.value + b * v.value, 1.0) <= 1e-10


@given(seeds, st.floats(0.2, 4.0))
def test_product_closure(seed, h):
    g = PeriodicGrid(256, 2 * np.pi)
    r = np.random.default_rng(seed)
    u = make_holomorphic(g, band_limited(r, g, 64), h)
    v = make_holomorphic(g, band_limited(r, g, 64), h)
    prod = holomorphic_product(g, u.value, v.value)
    assert holomorphy_defect(g, prod, h) <= 1e-9
    assert tilbert_product_defect(g, u.re, v.re, h) <= 1e-10 * sp.l2_norm(g, u.re) * sp.l2_norm(g, v.re)
