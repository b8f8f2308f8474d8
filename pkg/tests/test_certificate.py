import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from holowave import spectral as sp
from holowave.certificate import (
    CutoffFamily,
    commutator_identity_defect,
    cosh_energy,
    decay_scan,
    nonexistence_certificate,
    residual_pairing,
    sech_energy,
    sech_energy_physical,
    smoothstep,
    smoothstep_prime,
    truncated_energy_identity,
)
from holowave.errors import MagnitudeError, ParameterError, SeamWarning, UsageError
from holowave.spectral import PeriodicGrid
from holowave.steady import WaveParameters, residual_sinh

from conftest import band_limited

CAP = WaveParameters(0.0, 1.0, 1.0, 0.7)


def bump(grid, amp=0.3, width=3.0, tilt=0.2):
    a = grid.centered_nodes
    return amp * (1 + tilt * a / width) * np.exp(-0.5 * (a / width) ** 2)


@pytest.fixture
def long_grid():
    return PeriodicGrid(1024, 256.0)


def test_smoothstep_shape():
    x = np.linspace(-2, 2, 401)
    s = smoothstep(x)
    assert np.all(s[x <= -1] == 0) and np.all(s[x >= 1] == 1)
    assert np.all(np.diff(s) >= 0)
    inner = np.abs(x) < 0.5
    assert np.min(smoothstep_prime(x[inner])) >= CutoffFamily.kappa0 > 0
    # C^1 at the junctions: the derivative vanishes there
    assert smoothstep_prime(-1.0) == 0 and smoothstep_prime(1.0) == 0


def test_cutoff_validation():
    with pytest.raises(ParameterError):
        CutoffFamily(40.0, 256.0)
    with pytest.raises(ParameterError):
        CutoffFamily(0.0, 256.0)
    cut = CutoffFamily(32.0, 256.0)
    chi = cut.sample(PeriodicGrid(1024, 256.0))
    assert chi.max() == pytest.approx(1.0) and chi.min() == 0.0


def test_cosh_energy_examples(grid2pi):
    assert cosh_energy(grid2pi, np.zeros(64), 1.3) == 0
    a, c = 1e-2, 1.3
    val = cosh_energy(grid2pi, a * np.cos(grid2pi.nodes), c)
    assert val == pytest.approx(c**2 * np.pi * a**2, rel=a**2)
    with pytest.raises(MagnitudeError):
        cosh_energy(grid2pi, np.full(64, 800.0), 1.0)


def test_sech_energy_examples():
    grid = PeriodicGrid(128, 20.0)
    assert sech_energy(grid, np.zeros(128), 1.0) == 0
    a, h = 0.4, 0.8
    k = 2 * np.pi * 3 / 20.0
    u = a * np.cos(k * grid.nodes)
    expected = 0.5 * h * k**2 / np.cosh(h * k) ** 2 * a**2 * 20.0 / 2
    assert sech_energy(grid, u, h) == pytest.approx(expected, rel=1e-13)


@given(st.integers(0, 2**31 - 1), st.floats(0.2, 3.0))
def test_energy_signs_and_plancherel(seed, h):
    grid = PeriodicGrid(128, 30.0)
    u = band_limited(np.random.default_rng(seed), grid, 60)
    assert cosh_energy(grid, u, 0.8) > 0
    s = sech_energy(grid, u, h)
    assert s > 0
    assert sech_energy_physical(grid, u, h) == pytest.approx(s, rel=1e-12)


def test_commutator_examples(long_grid):
    cut = CutoffFamily(long_grid.length / 16, long_grid.length)
    assert commutator_identity_defect(long_grid, np.zeros(1024), cut, 1.0) == 0
    u = bump(long_grid)
    ua = sp.l2_norm(long_grid, sp.derivative(long_grid, u))
    assert commutator_identity_defect(long_grid, u, cut, 1.0) <= 1e-8 * ua**2
    with pytest.warns(SeamWarning):
        commutator_identity_defect(long_grid, np.sin(2 * np.pi * 4 * long_grid.nodes / 256), cut, 1.0)


@given(st.integers(0, 2**31 - 1), st.sampled_from([8.0, 16.0, 32.0]), st.floats(0.3, 3.0))
def test_commutator_identity_property(seed, r, h):
    grid = PeriodicGrid(512, 256.0)
    rng = np.random.default_rng(seed)
    u = bump(grid, rng.uniform(0.05, 1.0), rng.uniform(1.0, 4.0), rng.uniform(-0.5, 0.5))
    ua = sp.l2_norm(grid, sp.derivative(grid, u))
    assert commutator_identity_defect(grid, u, CutoffFamily(r, 256.0), h) <= 1e-8 * ua**2


def test_truncated_identity(long_grid):
    cut = CutoffFamily(long_grid.length / 32, long_grid.length)
    assert truncated_energy_identity(long_grid, np.zeros(1024), cut, CAP) == (0.0, 0.0)
    for p in (CAP, WaveParameters(0, 2.5, 0.6, 1.4)):
        u = bump(long_grid)
        lhs, rhs = truncated_energy_identity(long_grid, u, cut, p)
        pair = residual_pairing(long_grid, u, cut, p)
        assert abs(lhs - rhs - pair) <= 1e-8 * max(1.0, abs(lhs))


def test_decay_scan(long_grid):
    L = long_grid.length
    radii = [L / 64, L / 32, L / 16, L / 8]
    fit = decay_scan(long_grid, np.zeros(1024), radii, CAP)
    assert fit.degenerate and fit.exponent == -np.inf
    fit = decay_scan(long_grid, bump(long_grid, 0.3, 2.0, 0.0), radii, CAP)
    assert fit.exponent <= -0.4
    with pytest.raises(UsageError):
        decay_scan(long_grid, bump(long_grid), radii[:2], CAP)
    with pytest.raises(UsageError):
        decay_scan(long_grid, bump(long_grid), [L / 8, L / 16, L / 32], CAP)
    with pytest.raises(UsageError):
        decay_scan(long_grid, bump(long_grid), [L / 16, L / 8, L / 4], CAP)


def test_certificate_zero(long_grid):
    rep = nonexistence_certificate(long_grid, np.zeros(1024), CAP)
    assert (rep.cosh_energy, rep.sech_energy, rep.residual_norm, rep.verdict) == (0.0, 0.0, 0.0, "trivial")
    rep = nonexistence_certificate(long_grid, 1e-9 * bump(long_grid), CAP)
    assert rep.verdict == "trivial"


@pytest.mark.parametrize("c", [0.3, 1.0, 3.0])
def test_certificate_gaussian(c):
    # energy / (||R|| ||u_a||) grows with the bump width; width 16 clears margin 10
    grid = PeriodicGrid(2048, 512.0)
    a = grid.centered_nodes
    u = 0.3 * np.exp(-0.5 * (a / 16.0) ** 2)
    rep = nonexistence_certificate(grid, u, CAP.with_c(c))
    assert rep.cosh_energy > 0 and rep.sech_energy > 0
    assert rep.verdict == "inconsistent-with-solution"
    assert rep.virial_pairing == pytest.approx(rep.energy, rel=1e-10)


def test_certificate_narrow_bump_inconclusive(long_grid):
    rep = nonexistence_certificate(long_grid, bump(long_grid, 0.3, 1.0, 0.0), CAP)
    assert rep.energy > 0 and rep.verdict == "inconclusive"
    assert rep.virial_pairing == pytest.approx(rep.energy, rel=1e-10)


def test_certificate_periodic_inconclusive(grid2pi):
    rep = nonexistence_certificate(grid2pi, 0.1 * np.cos(grid2pi.nodes), CAP)
    assert rep.verdict == "inconclusive" and rep.seam_fraction > 0.1


def test_certificate_usage(long_grid):
    with pytest.raises(UsageError):
        nonexistence_certificate(long_grid, bump(long_grid), WaveParameters(1, 1, 1, 1))
    with pytest.raises(UsageError):
        nonexistence_certificate(long_grid, bump(long_grid), WaveParameters(1, 0, 1, 1))


def test_report_json(long_grid):
    d = nonexistence_certificate(long_grid, bump(long_grid), CAP).to_json()
    for key in ("cosh_energy", "sech_energy", "residual_norm", "b32_norm", "verdict"):
        assert key in d


def test_soundness_on_zero_residual(long_grid):
    u = np.zeros(1024)
    assert sp.l2_norm(long_grid, residual_sinh(long_grid, u, CAP)) == 0
    rep = nonexistence_certificate(long_grid, u, CAP)
    assert rep.energy == 0
