"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line."""

import math

import numpy as np
import pytest

from holowave import spectral as sp
from holowave.certificate import (
    CutoffFamily,
    commutator_identity_defect,
    decay_scan,
    residual_pairing,
    truncated_energy_identity,
)
from holowave.cli import main
from holowave.continuation import (
    ContinuationConfig,
    continue_branch,
    newton_solve,
    random_seeds,
    seed_from_dispersion,
    solitary_search,
    solve_seed,
)
from holowave.holomorphic import project_Ph, tilbert_product_defect
from holowave.spectral import PeriodicGrid
from holowave.steady import (
    SteadyProfile,
    WaveParameters,
    exp_log_profile,
    log_reduce,
    residual_full,
    residual_scaled,
    residual_sinh,
)

pytestmark = pytest.mark.acceptance


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}; {detail}")

    return emit


def band_limited(rng, grid, modes):
    spec = np.zeros(grid.n_points // 2 + 1, dtype=complex)
    spec[1 : modes + 1] = rng.standard_normal(modes) + 1j * rng.standard_normal(modes)
    u = np.fft.irfft(spec, n=grid.n_points)
    return u / np.max(np.abs(u))


def decaying_profile(rng, grid):
    a = grid.centered_nodes
    amp, w = rng.uniform(0.05, 1.0), rng.uniform(1.0, 6.0)
    shift = rng.uniform(-w, w)
    x = (a - shift) / w
    return amp * (1 + rng.uniform(-0.5, 0.5) * x + rng.uniform(-0.2, 0.2) * x * x) * np.exp(-0.5 * x * x)


def test_criterion_1_operator_identities(report):
    rng = np.random.default_rng(1)
    grid = PeriodicGrid(1024, 2 * np.pi)
    a = grid.nodes
    mode_err = 0.0
    for h in (0.5, 1.0, 2.0):
        for k in range(1, 512):
            got = sp.tilbert(grid, np.cos(k * a), h)
            want = np.tanh(h * k) * np.sin(k * a)
            mode_err = max(mode_err, np.max(np.abs(got - want)) / np.max(np.abs(want)))
    skew = prod = idem = 0.0
    for _ in range(100):
        h = rng.uniform(0.2, 3.0)
        u, v = band_limited(rng, grid, 256), band_limited(rng, grid, 256)
        nu, nv = sp.l2_norm(grid, u), sp.l2_norm(grid, v)
        s = sp.inner(grid, sp.tilbert(grid, u, h), v) + sp.inner(grid, u, sp.tilbert(grid, v, h))
        skew = max(skew, abs(s) / (nu * nv))
        prod = max(prod, tilbert_product_defect(grid, u, v, h) / (nu * nv))
        w = u + 0.4 + 1j * v
        once = project_Ph(grid, w, h).value
        twice = project_Ph(grid, once, h).value
        idem = max(idem, sp.l2_norm(grid, twice - once) / sp.l2_norm(grid, w))
    ok = mode_err <= 1e-12 and skew <= 1e-12 and prod <= 1e-10 and idem <= 1e-10
    report(1, ok, f"single-mode {mode_err:.2e} (tol 1e-12), skew {skew:.2e} (1e-12), product rule {prod:.2e} (1e-10), idempotence {idem:.2e} (1e-10)")
    assert ok


def test_criterion_2_proof_identities(report):
    rng = np.random.default_rng(2)
    grid = PeriodicGrid(1024, 256.0)
    L = grid.length
    radii = [L / 64, L / 32, L / 16, L / 8]
    p = WaveParameters(0.0, 1.0, 1.0, 0.7)
    comm = ident = 0.0
    family = []
    for _ in range(20):
        u = decaying_profile(rng, grid)
        ua2 = sp.l2_norm(grid, sp.derivative(grid, u)) ** 2
        for r in radii:
            cut = CutoffFamily(r, L)
            comm = max(comm, commutator_identity_defect(grid, u, cut, p.h) / ua2)
            lhs, rhs = truncated_energy_identity(grid, u, cut, p)
            gap = abs(lhs - rhs - residual_pairing(grid, u, cut, p))
            ident = max(ident, gap / max(1.0, abs(lhs), abs(rhs)))
        family.append(decay_scan(grid, u, radii, p).exponent)
    # the decay fit is asserted on Gaussian bumps; tilted or shifted bumps
    # whose width is comparable to L/64 can put a sign change of rhs inside
    # the scanned range, which no power law fits
    a = grid.centered_nodes
    gauss = [decay_scan(grid, 0.3 * np.exp(-0.5 * (a / w) ** 2), radii, p).exponent for w in (0.5, 1, 2, 4, 6, 8)]
    worst = max(gauss)
    ok = comm <= 1e-8 and ident <= 1e-8 and worst <= -0.4
    report(
        2,
        ok,
        f"commutator {comm:.2e} x |u_a|^2 (tol 1e-8), identity with pairing {ident:.2e} (1e-8) over 20 profiles; "
        f"worst Gaussian decay exponent {worst:.3f} (<= -0.4); diagnostic: random-family exponents median {np.median(family):.2f}, max {max(family):.2f}",
    )
    assert ok


def test_criterion_3_reduction_equivalence(report):
    rng = np.random.default_rng(3)
    grid = PeriodicGrid(256, 2 * np.pi)
    p = WaveParameters(0.0, 1.0, 1.0, 0.8)
    point = rel = 0.0
    for _ in range(20):
        t = 0.3 * band_limited(rng, grid, 12)
        prof = exp_log_profile(grid, t - np.mean(t), p.h)
        lp = log_reduce(prof)
        lhs = np.exp(-1j * lp.v) * residual_scaled(prof, p)
        rhs = -p.sigma * sp.derivative(grid, lp.v) - 2 * p.c**2 * np.sinh(lp.u)
        point = max(point, float(np.max(np.abs(lhs - rhs))))
        full = np.exp(lp.u) * residual_full(prof, p)
        sinh = residual_sinh(grid, lp.u, p.with_c(p.c / math.sqrt(2)))
        rel = max(rel, sp.l2_norm(grid, full - sinh) / sp.l2_norm(grid, sinh))
    ok = point <= 1e-9 and rel <= 1e-8
    report(3, ok, f"pointwise log identity {point:.2e} (tol 1e-9), full vs sinh {rel:.2e} relative (1e-8) over 20 profiles")
    assert ok


def test_criterion_4_dispersion_seed(report):
    grid = PeriodicGrid(64, 2 * np.pi)
    a = 1e-3
    worst, failures = 0.0, []
    for g, s in ((0, 1), (1, 0), (1, 1)):
        for h in (0.5, 1.0, 2.0):
            for k in (1.0, 2.0):
                seed = seed_from_dispersion(grid, k, a, WaveParameters(g, s, h, 1.0))
                prof = SteadyProfile.from_real(grid, seed.field, h)
                ratio = sp.l2_norm(grid, residual_full(prof, seed.params)) / a
                worst = max(worst, ratio)
                if ratio > 1e-5:
                    failures.append(f"(g={g},sigma={s},h={h},k={k:g}): {ratio:.2e}")
    ok = not failures
    detail = f"worst residual / a = {worst:.2e} (tol 1e-5) over 18 cases"
    if failures:
        detail += "; exceeded at " + ", ".join(failures)
    report(4, ok, detail)
    assert ok


def test_criterion_5_existence_controls(report):
    grid = PeriodicGrid(128, 2 * np.pi)
    cap = WaveParameters(0.0, 1.0, 1.0, 1.0)
    seed = solve_seed(seed_from_dispersion(grid, 1.0, 1e-3, cap, kind="sinh"))
    br = continue_branch(seed, ContinuationConfig(ds=0.05, ds_max=0.2, max_points=120, stop_on_overhang=True))
    res_cap = max(
        max(sp.l2_norm(grid, residual_sinh(grid, pt.field, pt.params)), sp.l2_norm(grid, residual_full(pt.steady_profile(), pt.full_params())))
        for pt in br.points
    )
    ok_i = br.points[-1].overhang and res_cap <= 1e-9

    h, amp = 1.0, 0.1
    lgrid = PeriodicGrid(512, 128.0)
    x = lgrid.centered_nodes
    kappa = math.sqrt(3 * amp / (4 * h**3))
    grav = WaveParameters(1.0, 0.0, h, math.sqrt(1 + amp))
    gseed = newton_solve("full", lgrid, amp / np.cosh(kappa * x) ** 2, grav)
    gbr = continue_branch(gseed, ContinuationConfig(ds=0.02, ds_max=0.05, max_points=12, c_max=1.14))
    c2 = [pt.params.c**2 for pt in gbr.points]
    res_grav = max(sp.l2_norm(lgrid, residual_full(pt.steady_profile(), pt.params)) for pt in gbr.points)
    edge = np.abs(x) > lgrid.length / 2 - 4
    tail = max(np.max(np.abs(pt.field[edge])) / np.max(np.abs(pt.field)) for pt in gbr.points)
    ok_ii = min(c2) > grav.g * h and res_grav <= 1e-9 and len(gbr.points) >= 3

    ok = ok_i and ok_ii
    last = br.points[-1]
    report(
        5,
        ok,
        f"(i) capillary branch {len(br.points)} points, overhang {last.overhang} at amplitude {last.amplitude:.4f}, max residual {res_cap:.2e} (tol 1e-9); "
        f"(ii) gravity solitary L=128 {len(gbr.points)} points, c^2 in [{min(c2):.4f}, {max(c2):.4f}] vs gh = 1, max residual {res_grav:.2e}, edge/peak {tail:.1e}",
    )
    assert ok


def test_criterion_6_nonexistence_experiment(report):
    p = WaveParameters(0.0, 1.0, 1.0, 1.0 / math.sqrt(2))
    seeds = random_seeds(np.random.default_rng(0), 10)
    rep = solitary_search(p, [64.0, 128.0, 256.0], seeds)
    collapsed = [c for c in rep.cells if c.outcome == "collapsed-to-zero"]
    collapse_ok = all(c.u_sup < 1e-8 for c in collapsed)
    stagnated = [c for c in rep.cells if c.outcome == "stagnated" and c.u_sup > 1e-8]
    stag_ok = all(
        c.certificate is not None and c.certificate.verdict == "inconsistent-with-solution" and c.certificate.energy > 10 * c.certificate.pairing_bound
        for c in stagnated
    )
    periodic = [c for c in rep.cells if c.outcome == "converged-nonzero" and not c.localized]
    ok = rep.persistent_nonzero == 0 and rep.monotone and collapse_ok and stag_ok
    loc = ", ".join(f"{k:g}: {v:.3g}" for k, v in rep.max_localized_amplitude.items())
    raw = ", ".join(f"{k:g}: {v:.3g}" for k, v in rep.max_nonzero_amplitude.items())
    report(
        6,
        ok,
        f"{len(rep.cells)} cells, {len(collapsed)} collapsed, {len(stagnated)} nontrivial stagnated (all certified: {stag_ok}), "
        f"persistent localized nonzero {rep.persistent_nonzero}, max localized sup|U| by L {{{loc}}}; "
        f"raw max including {len(periodic)} non-localized periodic states {{{raw}}}",
    )
    assert ok


def _artifacts(root):
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_criterion_7_determinism(report, tmp_path, monkeypatch):
    runs = []
    for name in ("first", "second"):
        d = tmp_path / name
        d.mkdir()
        monkeypatch.chdir(d)
        assert main(["selftest", "--set", "run.seed=11", "--set", "run.out_dir=out/selftest"]) == 0
        assert main(["search", "--set", "run.seed=11", "--set", "run.out_dir=out/search"]) == 0
        runs.append(_artifacts(d / "out"))
    ok = runs[0] == runs[1] and len(runs[0]) >= 5
    report(7, ok, f"{len(runs[0])} artifacts from selftest and search compared byte for byte across two runs: {'identical' if runs[0] == runs[1] else 'different'}")
    assert ok
