"""Seeded operator and identity checks run by ``holowave selftest``."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import spectral as sp
from .certificate import (
    CutoffFamily,
    commutator_identity_defect,
    cosh_energy,
    residual_pairing,
    sech_energy,
    sech_energy_physical,
    truncated_energy_identity,
)
from .errors import ZeroModeError
from .holomorphic import holomorphy_defect, make_holomorphic, project_Ph, tilbert_product_defect
from .spectral import PeriodicGrid
from .steady import (
    WaveParameters,
    exp_log_profile,
    log_reduce,
    residual_full,
    residual_scaled,
    residual_sinh,
    sinh_jacobian_apply,
    SteadyProfile,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    defect: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.defect) and self.defect <= self.tol)

    def as_dict(self) -> dict:
        return {"name": self.name, "defect": self.defect, "tol": self.tol, "passed": self.passed}


def random_band_limited(rng: np.random.Generator, grid: PeriodicGrid, modes: int, decay: float = 0.0) -> np.ndarray:
    """Real field with random coefficients on wavenumbers ``1 .. modes``, scaled to unit sup norm."""
    spec = np.zeros(grid.n_points // 2 + 1, dtype=complex)
    m = np.arange(1, modes + 1)
    amp = (1.0 + m) ** (-decay)
    spec[1 : modes + 1] = amp * (rng.standard_normal(modes) + 1j * rng.standard_normal(modes))
    spec[0] = rng.standard_normal()
    u = np.fft.irfft(spec, n=grid.n_points)
    return u / np.max(np.abs(u))


def random_bump(rng: np.random.Generator, grid: PeriodicGrid, amp_range=(0.05, 0.5), width_range=(1.0, 4.0)) -> np.ndarray:
    """Smooth localized profile: a Gaussian envelope times a random low-order polynomial."""
    a = grid.centered_nodes
    amp = rng.uniform(*amp_range)
    w = rng.uniform(*width_range)
    shift = rng.uniform(-w, w)
    poly = 1.0 + 0.3 * rng.standard_normal() * (a - shift) / w
    return amp * poly * np.exp(-0.5 * ((a - shift) / w) ** 2)


def _rel(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    den = np.linalg.norm(b)
    return float(np.linalg.norm(a - b) / den) if den else float(np.linalg.norm(a))


# --- individual checks ------------------------------------------------------


def check_tilbert_modes(rng, n_random) -> float:
    grid = PeriodicGrid(256, 2 * np.pi)
    a = grid.nodes
    worst = 0.0
    for h in (0.5, 1.0, 2.0):
        for k in (1, 2, 5, 17):
            worst = max(worst, _rel(sp.tilbert(grid, np.cos(k * a), h), np.tanh(h * k) * np.sin(k * a)))
            worst = max(worst, _rel(sp.tilbert(grid, np.sin(k * a), h), -np.tanh(h * k) * np.cos(k * a)))
    return worst


def check_skew_adjoint(rng, n_random) -> float:
    grid = PeriodicGrid(512, 40.0)
    worst = 0.0
    for _ in range(n_random):
        u = rng.standard_normal(grid.n_points)
        v = rng.standard_normal(grid.n_points)
        s = sp.inner(grid, sp.tilbert(grid, u, 1.0), v) + sp.inner(grid, u, sp.tilbert(grid, v, 1.0))
        worst = max(worst, abs(s) / (sp.l2_norm(grid, u) * sp.l2_norm(grid, v)))
    return worst


def check_inverse(rng, n_random) -> float:
    grid = PeriodicGrid(256, 30.0)
    worst = 0.0
    for _ in range(n_random):
        u = random_band_limited(rng, grid, 100)
        back = sp.tilbert_inverse(grid, sp.tilbert(grid, u, 1.3), 1.3)
        worst = max(worst, _rel(back, u - np.mean(u)))
    return worst


def check_low_frequency(rng, n_random) -> float:
    """max over modes of ``|tanh(h xi) - h xi| / (h^3 |xi|^3 / 3) - 1``, clipped at 0."""
    grid = PeriodicGrid(1024, 256.0)
    xi = grid.wavenumbers[1:-1]
    h = 1.0
    ratio = np.abs(np.tanh(h * xi) - h * xi) / (h**3 * xi**3 / 3)
    return float(max(0.0, np.max(ratio) - 1.0))


def check_parseval(rng, n_random) -> float:
    grid = PeriodicGrid(256, 17.0)
    worst = 0.0
    for _ in range(n_random):
        u = random_band_limited(rng, grid, 127)
        v = random_band_limited(rng, grid, 127)
        uh, vh = np.fft.fft(u) / grid.n_points, np.fft.fft(v) / grid.n_points
        spec = grid.length * float(np.real(np.sum(np.conj(uh) * vh)))
        worst = max(worst, abs(sp.integrate(grid, u * v) - spec) / (sp.l2_norm(grid, u) * sp.l2_norm(grid, v)))
    return worst


def check_lp_partition(rng, n_random) -> float:
    grid = PeriodicGrid(512, 64.0)
    u = random_band_limited(rng, grid, 255)
    return _rel(np.sum(sp.lp_blocks(grid, u), axis=0), u)


def check_product_rule(rng, n_random) -> float:
    grid = PeriodicGrid(1024, 2 * np.pi)
    worst = 0.0
    for _ in range(n_random):
        u = random_band_limited(rng, grid, 256)
        v = random_band_limited(rng, grid, 256)
        d = tilbert_product_defect(grid, u, v, 0.7)
        worst = max(worst, d / (sp.l2_norm(grid, u) * sp.l2_norm(grid, v)))
    return worst


def check_idempotence(rng, n_random) -> float:
    grid = PeriodicGrid(256, 20.0)
    worst = 0.0
    for _ in range(n_random):
        p = random_band_limited(rng, grid, 100)
        q = random_band_limited(rng, grid, 100)
        q = q - np.mean(q)
        u = p + 1j * q
        once = project_Ph(grid, u, 1.0)
        twice = project_Ph(grid, once.value, 1.0)
        worst = max(worst, sp.l2_norm(grid, twice.value - once.value) / sp.l2_norm(grid, u))
    return worst


def check_real_algebra(rng, n_random) -> float:
    """Defect of a real combination, plus a penalty if ``i * u`` is wrongly holomorphic."""
    grid = PeriodicGrid(128, 2 * np.pi)
    u = make_holomorphic(grid, random_band_limited(rng, grid, 40), 1.0)
    v = make_holomorphic(grid, random_band_limited(rng, grid, 40), 1.0)
    comb = 1.7 * u.value - 0.4 * v.value
    witness = make_holomorphic(grid, np.cos(grid.nodes), 1.0)
    penalty = 0.0 if holomorphy_defect(grid, 1j * witness.value, 1.0) > 1e-3 else 1.0
    return holomorphy_defect(grid, comb, 1.0) + penalty


def _random_profile(rng, grid, h, scale=0.3):
    t = scale * random_band_limited(rng, grid, 12, decay=1.0)
    t = t - np.mean(t)
    return exp_log_profile(grid, t, h), t


def check_reduction_scaled(rng, n_random) -> float:
    grid = PeriodicGrid(256, 2 * np.pi)
    worst = 0.0
    for _ in range(n_random):
        prof, _ = _random_profile(rng, grid, 1.0)
        p = WaveParameters(0.0, 1.3, 1.0, 0.8)
        lp = log_reduce(prof)
        lhs = np.exp(-1j * lp.v) * residual_scaled(prof, p)
        rhs = -p.sigma * sp.derivative(grid, lp.v) - 2 * p.c**2 * np.sinh(lp.u)
        worst = max(worst, sp.l2_norm(grid, lhs - rhs) / (1.0 + sp.l2_norm(grid, rhs)))
    return worst


def check_reduction_full(rng, n_random) -> float:
    grid = PeriodicGrid(256, 2 * np.pi)
    worst = 0.0
    for _ in range(n_random):
        prof, _ = _random_profile(rng, grid, 1.0)
        p = WaveParameters(0.0, 1.3, 1.0, 0.8)
        lp = log_reduce(prof)
        full = np.exp(lp.u) * residual_full(prof, p)
        sinh = residual_sinh(grid, lp.u, p.with_c(p.c / np.sqrt(2.0)))
        worst = max(worst, sp.l2_norm(grid, full - sinh) / sp.l2_norm(grid, sinh))
    return worst


def check_translation(rng, n_random) -> float:
    grid = PeriodicGrid(128, 2 * np.pi)
    prof, t = _random_profile(rng, grid, 1.0)
    p = WaveParameters(1.0, 1.0, 1.0, 0.9)
    shift = 7
    shifted = exp_log_profile(grid, np.roll(t, shift), 1.0)
    a = residual_full(shifted, p)
    b = np.roll(residual_full(prof, p), shift)
    return _rel(a, b)


def check_flat_state(rng, n_random) -> float:
    grid = PeriodicGrid(64, 2 * np.pi)
    worst = 0.0
    for g, s in ((1, 0), (0, 1), (1, 1)):
        p = WaveParameters(g, s, 1.0, 0.7)
        worst = max(worst, float(np.max(np.abs(residual_full(SteadyProfile.from_real(grid, np.zeros(64), 1.0), p)))))
    worst = max(worst, float(np.max(np.abs(residual_sinh(grid, np.zeros(64), WaveParameters(0, 1, 1, 0.7))))))
    return worst


def check_sinh_jacobian(rng, n_random) -> float:
    """``|slope - 2|`` of the central-difference error against ``eps`` in log-log scale.

    The perturbation is O(1) so that truncation error dominates rounding
    down to ``eps = 1e-5``.
    """
    grid = PeriodicGrid(128, 2 * np.pi)
    u = random_band_limited(rng, grid, 6, decay=1.0)
    du = 10.0 * random_band_limited(rng, grid, 6, decay=1.0)
    p = WaveParameters(0, 1.0, 1.0, 0.6)
    jd = sinh_jacobian_apply(grid, u, du, p)
    eps = np.array([1e-3, 1e-4, 1e-5])
    errs = []
    for e in eps:
        fd = (residual_sinh(grid, u + e * du, p) - residual_sinh(grid, u - e * du, p)) / (2 * e)
        errs.append(sp.l2_norm(grid, fd - jd))
    slope = np.polyfit(np.log(eps), np.log(errs), 1)[0]
    return float(abs(slope - 2.0))


def check_commutator(rng, n_random) -> float:
    grid = PeriodicGrid(1024, 256.0)
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for _ in range(n_random):
            u = random_bump(rng, grid)
            ua = sp.derivative(grid, u)
            d = commutator_identity_defect(grid, u, CutoffFamily(256.0 / 16, 256.0), 1.0)
            worst = max(worst, d / sp.l2_norm(grid, ua) ** 2)
    return worst


def check_truncated_identity(rng, n_random) -> float:
    grid = PeriodicGrid(1024, 256.0)
    p = WaveParameters(0.0, 1.0, 1.0, 0.7)
    worst = 0.0
    for _ in range(n_random):
        u = random_bump(rng, grid)
        cut = CutoffFamily(rng.choice([4.0, 8.0, 16.0, 32.0]), 256.0)
        lhs, rhs = truncated_energy_identity(grid, u, cut, p)
        pair = residual_pairing(grid, u, cut, p)
        worst = max(worst, abs(lhs - rhs - pair) / max(1.0, abs(lhs)))
    return worst


def check_plancherel(rng, n_random) -> float:
    grid = PeriodicGrid(512, 64.0)
    worst = 0.0
    for _ in range(n_random):
        u = random_band_limited(rng, grid, 200, decay=1.0)
        a, b = sech_energy(grid, u, 1.0), sech_energy_physical(grid, u, 1.0)
        worst = max(worst, abs(a - b) / abs(a))
    return worst


def check_energy_sign(rng, n_random) -> float:
    """Count of random inputs with a negative energy, or a non-zero energy at ``u = 0``."""
    grid = PeriodicGrid(256, 32.0)
    bad = 0
    for _ in range(n_random):
        u = random_band_limited(rng, grid, 100)
        if cosh_energy(grid, u, 0.8) <= 0 or sech_energy(grid, u, 1.0) <= 0:
            bad += 1
    zero = np.zeros(grid.n_points)
    bad += int(cosh_energy(grid, zero, 0.8) != 0 or sech_energy(grid, zero, 1.0) != 0)
    return float(bad)


def check_zero_mode_gate(rng, n_random) -> float:
    grid = PeriodicGrid(64, 2 * np.pi)
    try:
        project_Ph(grid, 1j * np.ones(64), 1.0)
    except ZeroModeError:
        return 0.0
    return 1.0


CHECKS: tuple[tuple[str, Callable, float], ...] = (
    ("spectral.tilbert_single_mode", check_tilbert_modes, 1e-12),
    ("spectral.skew_adjoint", check_skew_adjoint, 1e-12),
    ("spectral.inverse_identity", check_inverse, 1e-10),
    ("spectral.low_frequency_gap", check_low_frequency, 1e-6),
    ("spectral.parseval", check_parseval, 1e-12),
    ("spectral.lp_partition", check_lp_partition, 1e-12),
    ("holomorphic.product_rule", check_product_rule, 1e-10),
    ("holomorphic.idempotence", check_idempotence, 1e-10),
    ("holomorphic.real_algebra", check_real_algebra, 1e-10),
    ("holomorphic.zero_mode_gate", check_zero_mode_gate, 0.0),
    ("steady.reduction_scaled", check_reduction_scaled, 1e-9),
    ("steady.reduction_full_sinh", check_reduction_full, 1e-8),
    ("steady.translation", check_translation, 1e-12),
    ("steady.flat_state", check_flat_state, 1e-14),
    ("steady.sinh_jacobian_order", check_sinh_jacobian, 0.1),
    ("certificate.commutator", check_commutator, 1e-8),
    ("certificate.truncated_identity", check_truncated_identity, 1e-8),
    ("certificate.plancherel", check_plancherel, 1e-12),
    ("certificate.energy_sign", check_energy_sign, 0.0),
)


def run_selftest(seed: int = 0, n_random: int = 20) -> list:
    """Run every check with its own generator spawned from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(len(CHECKS))
    out = []
    for (name, fn, tol), ss in zip(CHECKS, children):
        out.append(CheckResult(name, float(fn(np.random.default_rng(ss), n_random)), tol))
    return out
