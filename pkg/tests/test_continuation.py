import math

import numpy as np
import pytest

from holowave import spectral as sp
from holowave.continuation import (
    BranchPoint,
    ContinuationConfig,
    NewtonConfig,
    SeedSpec,
    coeffs_to_field,
    continue_branch,
    field_to_coeffs,
    newton_solve,
    random_seeds,
    seed_from_dispersion,
    solitary_search,
    solve_seed,
)
from holowave.errors import NewtonFailure, ParameterError, UsageError
from holowave.spectral import PeriodicGrid
from holowave.steady import SteadyProfile, WaveParameters, dispersion_speed, residual_full, residual_sinh

CAP = WaveParameters(0.0, 1.0, 1.0, 1.0)


def test_config_validation():
    with pytest.raises(ParameterError):
        NewtonConfig(max_iters=0)
    with pytest.raises(ParameterError):
        NewtonConfig(abs_tol=0)
    with pytest.raises(ParameterError):
        NewtonConfig(damping=1.5)
    with pytest.raises(ParameterError):
        NewtonConfig(linear_solver="lu")
    with pytest.raises(ParameterError):
        ContinuationConfig(ds=1.0, ds_max=0.5)
    with pytest.raises(ParameterError):
        ContinuationConfig(ds_min=0.0)


def test_cosine_roundtrip():
    grid = PeriodicGrid(32, 7.0)
    x = np.random.default_rng(0).standard_normal(16)
    assert np.allclose(field_to_coeffs(grid, coeffs_to_field(grid, x)), x, atol=1e-14)


@pytest.mark.parametrize("kind,params", [("full", WaveParameters(1, 1, 1, 0.8)), ("sinh", CAP)])
def test_newton_zero_guess(kind, params):
    grid = PeriodicGrid(64, 2 * np.pi)
    pt = newton_solve(kind, grid, np.zeros(64), params)
    assert pt.iterations <= 1 and pt.u_sup == 0 and pt.residual_norm == 0


def test_newton_degenerate_guess():
    grid = PeriodicGrid(64, 2 * np.pi)
    with pytest.raises(NewtonFailure) as exc:
        newton_solve("full", grid, -np.ones(64), WaveParameters(1, 0, 1, 1))
    assert exc.value.reason == "degenerate-profile"


def test_newton_bad_kind():
    grid = PeriodicGrid(16, 2 * np.pi)
    with pytest.raises(UsageError):
        newton_solve("euler", grid, np.zeros(16), CAP)
    with pytest.raises(UsageError):
        newton_solve("sinh", grid, np.zeros(16), WaveParameters(1, 1, 1, 1))


def test_newton_quadratic_tail():
    grid = PeriodicGrid(64, 2 * np.pi)
    seed = seed_from_dispersion(grid, 1.0, 0.05, WaveParameters(0, 1, 1, 1), kind="full", order=1)
    cfg = NewtonConfig(max_iters=5, abs_tol=1e-300, rel_tol=1e-300)
    with pytest.raises(NewtonFailure) as exc:
        newton_solve("full", grid, seed.field, seed.params, cfg, fix_mode=(1, 0.025))
    steps = [s for _, s in exc.value.history[1:] if s > 1e-13]
    assert len(steps) >= 3
    for a, b in zip(steps[1:], steps[2:]):
        assert b <= 10 * a**2
    pt = newton_solve("full", grid, seed.field, seed.params, fix_mode=(1, 0.025))
    assert pt.residual_norm <= 1e-10
    assert pt.params.c**2 == pytest.approx(math.tanh(1.0), rel=1e-2)


def test_seed_examples():
    grid = PeriodicGrid(64, 2 * np.pi)
    p = WaveParameters(0, 1, 1, 1)
    s = seed_from_dispersion(grid, 1.0, 0.0, p)
    assert np.all(s.field == 0)
    norms = []
    for a in (1e-3, 5e-4):
        s = seed_from_dispersion(grid, 1.0, a, p, order=1)
        assert s.params.c**2 == pytest.approx(math.tanh(1.0), rel=1e-15)
        prof = SteadyProfile.from_real(grid, s.field, 1.0)
        norms.append(sp.l2_norm(grid, residual_full(prof, s.params)))
    assert norms[0] / norms[1] == pytest.approx(4.0, rel=0.05)
    with pytest.raises(ParameterError):
        seed_from_dispersion(grid, 1.5, 1e-3, p)


def test_second_order_seed_is_cubic():
    grid = PeriodicGrid(64, 2 * np.pi)
    p = WaveParameters(1, 1, 1, 1)
    norms = []
    for a in (1e-2, 5e-3):
        s = seed_from_dispersion(grid, 1.0, a, p)
        norms.append(sp.l2_norm(grid, residual_full(SteadyProfile.from_real(grid, s.field, 1.0), s.params)))
    assert norms[0] / norms[1] == pytest.approx(8.0, rel=0.1)


def test_sinh_seed_speed():
    grid = PeriodicGrid(64, 2 * np.pi)
    s = seed_from_dispersion(grid, 2.0, 1e-3, CAP, kind="sinh")
    assert s.params.c**2 == pytest.approx(dispersion_speed(2.0, CAP) / 2)


def test_zero_seed_zero_tangent():
    grid = PeriodicGrid(32, 2 * np.pi)
    pt = newton_solve("sinh", grid, np.zeros(32), CAP)
    br = continue_branch(pt)
    assert br.termination == "zero-tangent" and len(br.points) == 1


def test_crapper_branch_reaches_overhang():
    grid = PeriodicGrid(128, 2 * np.pi)
    seed = solve_seed(seed_from_dispersion(grid, 1.0, 0.01, CAP, kind="sinh"))
    br = continue_branch(seed, ContinuationConfig(ds=0.05, ds_max=0.2, max_points=80, stop_on_overhang=True))
    assert br.termination == "overhang"
    assert br.points[-1].overhang and not br.points[0].overhang
    for pt in br.points:
        replay = sp.l2_norm(grid, residual_sinh(grid, pt.field, pt.params))
        assert replay <= 1e-9
        assert abs(replay - pt.residual_norm) <= 1e-12
        full = residual_full(pt.steady_profile(), pt.full_params())
        assert sp.l2_norm(grid, full) <= 1e-8


def test_gravity_solitary_branch():
    h, amp = 1.0, 0.1
    grid = PeriodicGrid(512, 128.0)
    a = grid.centered_nodes
    kappa = math.sqrt(3 * amp / (4 * h**3))
    c = math.sqrt(1 + amp)
    seed = newton_solve("full", grid, amp / np.cosh(kappa * a) ** 2, WaveParameters(1, 0, h, c))
    br = continue_branch(seed, ContinuationConfig(ds=0.02, ds_max=0.05, max_points=6, c_max=1.14))
    assert len(br.points) >= 3
    for pt in br.points:
        assert pt.params.c**2 > 1.0
        assert pt.residual_norm <= 1e-10
        f = pt.field
        edge = np.abs(a) > grid.length / 2 - 4
        assert np.max(np.abs(f[edge])) < 1e-4 * np.max(np.abs(f))


def test_search_zero_seed():
    rep = solitary_search(CAP.with_c(1 / math.sqrt(2)), [16.0], [SeedSpec(0.0, 2.0)])
    assert rep.cells[0].outcome == "collapsed-to-zero"


def test_search_usage():
    with pytest.raises(UsageError):
        solitary_search(WaveParameters(1, 1, 1, 1), [16.0], [SeedSpec(0.1, 2.0)])
    with pytest.raises(UsageError):
        solitary_search(CAP, [32.0, 16.0], [SeedSpec(0.1, 2.0)])


def test_random_seeds_deterministic():
    a = random_seeds(np.random.default_rng(7), 5)
    b = random_seeds(np.random.default_rng(7), 5)
    assert a == b
    for s in a:
        assert 0.05 <= abs(s.amplitude) <= 0.6 and 1 <= s.width <= 5


def test_small_search_consistent():
    p = CAP.with_c(1 / math.sqrt(2))
    rep = solitary_search(p, [32.0, 64.0], random_seeds(np.random.default_rng(1), 3))
    assert rep.persistent_nonzero == 0 and rep.monotone
    assert rep.consistent_with_nonexistence
    for c in rep.cells:
        if c.outcome == "converged-nonzero":
            assert c.certificate is not None


def test_periodic_control():
    p = WaveParameters(0, 1, 1, 1)
    grid = PeriodicGrid(64, 2 * np.pi)
    pt = solve_seed(seed_from_dispersion(grid, 1.0, 0.2, p, kind="sinh"))
    assert pt.u_sup > 0.05 and pt.residual_norm <= 1e-10
    assert isinstance(pt, BranchPoint)
