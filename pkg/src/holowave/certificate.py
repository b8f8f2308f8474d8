"""Energy identities behind the non-existence of pure-capillary solitary waves.

For ``g = 0`` the steady problem reduces to ``sigma T_h U_a = 2 c^2 sinh U``.
Testing it against ``chi_r U_a`` for a cutoff ``chi_r`` rising across
``|alpha| < r`` and letting ``r`` grow gives, for a decaying solution,

    2 c^2 int (cosh U - 1) + (sigma h / 2) int |xi|^2 |U_hat|^2 sech^2(h xi) = 0,

two non-negative terms, hence ``U = 0``.  For a non-solution with residual
``R`` the right side becomes ``int alpha U_a R``.  This module evaluates each
step of that chain on the torus.

Integrals of products are evaluated on the 2x grid, where the quadrature is
exact for products of three grid-band-limited fields; this keeps the discrete
identities exact up to rounding.
"""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import spectral as sp
from .errors import MagnitudeError, ParameterError, SeamWarning, UsageError
from .spectral import PeriodicGrid
from .steady import WaveParameters, residual_sinh

TRIVIAL_THRESHOLD = 1e-8
DEFAULT_MARGIN = 10.0
SEAM_TOL = 1e-6
_MAX_EXP_ARG = 700.0


def smoothstep(x):
    """C^2 quintic step: 0 below -1, 1 above +1."""
    t = np.clip((np.asarray(x, dtype=float) + 1.0) / 2.0, 0.0, 1.0)
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0)


def smoothstep_prime(x):
    t = np.clip((np.asarray(x, dtype=float) + 1.0) / 2.0, 0.0, 1.0)
    return 15.0 * t * t * (1.0 - t) ** 2


@dataclass(frozen=True)
class CutoffFamily:
    """``chi_r(alpha) = chi(alpha / r)`` placed at the torus center.

    The torus has no room for a function that is 0 on the left and 1 on the
    right, so after rising on ``[-r, r]`` the cutoff falls back to 0 on
    ``[L/2 - 2r, L/2]``, next to the seam.  Profiles must be negligible on
    that fall region, which :meth:`seam_fraction` measures.
    """

    r: float
    length: float

    def __post_init__(self):
        if not self.r > 0:
            raise ParameterError("cutoff scale r must be positive")
        if self.r > self.length / 8 * (1 + 1e-12):
            raise ParameterError(f"r = {self.r} exceeds L/8 = {self.length / 8}")

    # chi' >= kappa0 on (-1/2, 1/2)
    kappa0 = float(smoothstep_prime(0.5))

    def sample(self, grid: PeriodicGrid) -> np.ndarray:
        a = grid.centered_nodes
        rise = smoothstep(a / self.r)
        fall = smoothstep((self.length / 2 - self.r - a) / self.r)
        return rise * fall

    def fall_region(self, grid: PeriodicGrid) -> np.ndarray:
        return grid.centered_nodes >= self.length / 2 - 2 * self.r

    def seam_fraction(self, grid: PeriodicGrid, u) -> float:
        """Share of ``||u||_2 + ||u_a||_2`` carried by the fall region."""
        u = np.asarray(u, dtype=float)
        ua = sp.derivative(grid, u)
        mask = self.fall_region(grid)
        total = sp.l2_norm(grid, u) + sp.l2_norm(grid, ua)
        if total == 0:
            return 0.0
        return (sp.l2_norm(grid, u * mask) + sp.l2_norm(grid, ua * mask)) / total


def _check_seam(grid: PeriodicGrid, u, cut: CutoffFamily, tol: float) -> float:
    frac = cut.seam_fraction(grid, u)
    if frac > tol:
        warnings.warn(
            f"profile carries a fraction {frac:.2e} of its norm next to the periodization seam",
            SeamWarning,
            stacklevel=3,
        )
    return frac


def _check_magnitude(u) -> None:
    if np.max(np.abs(u), initial=0.0) > _MAX_EXP_ARG:
        raise MagnitudeError("|u| exceeds the range where cosh/sinh are representable")


# --- energies ---------------------------------------------------------------


def cosh_energy(grid: PeriodicGrid, u, c: float) -> float:
    """``2 c^2 int (cosh u - 1)``, evaluated as ``4 c^2 int sinh(u/2)^2``."""
    u = sp.check_field(grid, u)
    _check_magnitude(u)
    return float(4.0 * c**2 * sp.integrate(grid, np.sinh(0.5 * u) ** 2))


def _rfft_weights(grid: PeriodicGrid) -> np.ndarray:
    w = np.full(grid.n_points // 2 + 1, 2.0)
    w[0] = 1.0
    w[-1] = 0.0  # odd symbols vanish on the Nyquist mode
    return w


def sech_energy(grid: PeriodicGrid, u, h: float) -> float:
    """``(h/2) sum |xi|^2 |u_hat|^2 sech^2(h xi)`` with ``int u v = L sum conj(u_hat) v_hat``."""
    u = sp.check_field(grid, u)
    if not h > 0:
        raise ParameterError("depth must be positive")
    xi = grid.wavenumbers
    c = np.fft.rfft(u) / grid.n_points
    spec = _rfft_weights(grid) * xi**2 * np.abs(c) ** 2 / np.cosh(h * xi) ** 2
    return float(0.5 * h * grid.length * np.sum(spec))


def sech_energy_physical(grid: PeriodicGrid, u, h: float) -> float:
    """Same quantity in physical space: ``(h/2) int (u_a^2 - (T_h u_a)^2)``."""
    ua = sp.derivative(grid, u)
    tua = sp.tilbert(grid, ua, h)
    fine = grid.refined(2)
    f, tf = sp.refine(grid, ua), sp.refine(grid, tua)
    return float(0.5 * h * sp.integrate(fine, f * f - tf * tf))


# --- identities along the proof ---------------------------------------------


class CommutatorSides(NamedTuple):
    lhs: float
    rhs: float


def commutator_sides(grid: PeriodicGrid, u, cut: CutoffFamily, h: float, seam_tol: float = SEAM_TOL) -> CommutatorSides:
    """``-int chi_r U_a T U_a`` and ``1/2 int (U_a^2 - (T U_a)^2) T chi_r``."""
    u = sp.check_field(grid, u)
    _check_seam(grid, u, cut, seam_tol)
    fine = grid.refined(2)
    chi = cut.sample(grid)
    f = sp.refine(grid, sp.derivative(grid, u))
    tf = sp.tilbert(fine, f, h)
    chif = sp.refine(grid, chi)
    tchi = sp.tilbert(fine, chif, h)
    lhs = -sp.integrate(fine, chif * f * tf)
    rhs = 0.5 * sp.integrate(fine, (f * f - tf * tf) * tchi)
    return CommutatorSides(float(lhs), float(rhs))


def commutator_identity_defect(grid: PeriodicGrid, u, cut: CutoffFamily, h: float, seam_tol: float = SEAM_TOL) -> float:
    """Absolute gap in the commutator identity; an operator identity, no equation needed."""
    lhs, rhs = commutator_sides(grid, u, cut, h, seam_tol)
    return abs(lhs - rhs)


def _identity_pieces(grid: PeriodicGrid, u, cut: CutoffFamily, params: WaveParameters):
    fine = grid.refined(2)
    h, r = params.h, cut.r
    chi = cut.sample(grid)
    # chi'(alpha/r) = r d/dalpha chi_r; spectral so that integration by parts is exact
    dchi = r * sp.derivative(grid, chi)
    f = sp.refine(grid, sp.derivative(grid, u))
    tf = sp.tilbert(fine, f, h)
    d = f * f - tf * tf
    chif = sp.refine(grid, chi)
    dchif = sp.refine(grid, dchi)
    low = sp.tilbert(fine, chif, h) + h * sp.derivative(fine, chif)
    return fine, chif, dchif, f, d, low


def truncated_energy_identity(
    grid: PeriodicGrid, u, cut: CutoffFamily, params: WaveParameters, seam_tol: float = SEAM_TOL
) -> tuple[float, float]:
    """Both sides of the cutoff energy identity.

    ``lhs = (2c^2/sigma) int chi'(a/r)(cosh u - 1) + (h/2) int (u_a^2 - (T u_a)^2) chi'(a/r)``
    ``rhs = (r/2) int (u_a^2 - (T u_a)^2) (T_h + h d/da) chi_r``

    With ``sigma = 1`` this is the identity as used in the proof.  On
    solutions the sides agree; in general ``lhs - rhs`` equals
    :func:`residual_pairing`.
    """
    if not params.sigma > 0:
        raise UsageError("the energy identity needs sigma > 0")
    u = sp.check_field(grid, u)
    _check_magnitude(u)
    _check_seam(grid, u, cut, seam_tol)
    fine, chif, dchif, f, d, low = _identity_pieces(grid, u, cut, params)
    coshm1 = 2.0 * np.sinh(0.5 * u) ** 2
    lhs = (2.0 * params.c**2 / params.sigma) * sp.integrate(fine, dchif * sp.refine(grid, coshm1))
    lhs += 0.5 * params.h * sp.integrate(fine, d * dchif)
    rhs = 0.5 * cut.r * sp.integrate(fine, d * low)
    return float(lhs), float(rhs)


def residual_pairing(grid: PeriodicGrid, u, cut: CutoffFamily, params: WaveParameters) -> float:
    """``(r/sigma) int chi_r u_a R`` with ``R = residual_sinh(u)``."""
    u = sp.check_field(grid, u)
    fine = grid.refined(2)
    chif = sp.refine(grid, cut.sample(grid))
    f = sp.refine(grid, sp.derivative(grid, u))
    rf = sp.refine(grid, residual_sinh(grid, u, params))
    return float(cut.r / params.sigma * sp.integrate(fine, chif * f * rf))


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    fit_residual: float
    radii: tuple
    rhs: tuple
    degenerate: bool = False


def decay_scan(grid: PeriodicGrid, u, radii: Sequence[float], params: WaveParameters, seam_tol: float = SEAM_TOL) -> DecayFit:
    """Least-squares slope of ``log|rhs|`` against ``log r``.

    An identically vanishing right side (``u = 0``) is reported as exact
    decay: ``exponent = -inf`` with ``degenerate = True``.
    """
    radii = [float(r) for r in radii]
    if len(radii) < 3:
        raise UsageError("decay_scan needs at least three radii")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise UsageError("radii must be strictly increasing")
    if radii[-1] > grid.length / 8 * (1 + 1e-12):
        raise UsageError("largest radius exceeds L/8")
    rhs = [truncated_energy_identity(grid, u, CutoffFamily(r, grid.length), params, seam_tol)[1] for r in radii]
    mags = np.abs(rhs)
    if np.all(mags == 0):
        return DecayFit(float("-inf"), 0.0, tuple(radii), tuple(rhs), degenerate=True)
    if np.any(mags == 0):
        raise UsageError("rhs vanishes at some but not all radii; no power law to fit")
    x, y = np.log(radii), np.log(mags)
    slope, icpt = np.polyfit(x, y, 1)
    fit_res = float(np.sqrt(np.mean((y - (slope * x + icpt)) ** 2)))
    return DecayFit(float(slope), fit_res, tuple(radii), tuple(float(v) for v in rhs))


# --- certificate ------------------------------------------------------------


@dataclass(frozen=True)
class CertificateReport:
    cosh_energy: float
    sech_energy: float
    residual_norm: float
    b32_norm: float
    verdict: str
    pairing_bound: float = 0.0
    virial_pairing: float = 0.0
    seam_fraction: float = 0.0

    @property
    def energy(self) -> float:
        return self.cosh_energy + self.sech_energy

    def to_json(self) -> dict:
        return asdict(self)


VERDICTS = ("trivial", "inconsistent-with-solution", "inconclusive")


def nonexistence_certificate(
    grid: PeriodicGrid,
    u,
    params: WaveParameters,
    margin: float = DEFAULT_MARGIN,
    trivial_threshold: float = TRIVIAL_THRESHOLD,
    seam_tol: float = SEAM_TOL,
) -> CertificateReport:
    """Energy certificate for a candidate ``U`` of the pure-capillary sinh equation.

    ``sech_energy`` is reported with its factor ``sigma``, so that the energy
    sum equals ``int alpha U_a R`` for every profile decaying at the seam and
    vanishes on any genuine solitary solution.

    Verdicts: ``trivial`` when ``sup|u| <= trivial_threshold``;
    ``inconsistent-with-solution`` when the energy sum exceeds
    ``margin * ||R||_2 * ||u_a||_2``; otherwise ``inconclusive``.  Profiles
    that do not decay at the seam (periodic states) are always
    ``inconclusive``: the identity presumes decay.
    """
    if params.g != 0:
        raise UsageError("the certificate applies to the pure-capillary problem (g = 0)")
    if not params.sigma > 0:
        raise UsageError("the certificate needs sigma > 0")
    u = sp.check_field(grid, u)
    _check_magnitude(u)
    res = residual_sinh(grid, u, params)
    ua = sp.derivative(grid, u)
    ce = cosh_energy(grid, u, params.c)
    se = params.sigma * sech_energy(grid, u, params.h)
    rn = sp.l2_norm(grid, res)
    bound = rn * sp.l2_norm(grid, ua)
    fine = grid.refined(2)
    alpha = fine.centered_nodes
    virial = float(sp.integrate(fine, alpha * sp.refine(grid, ua) * sp.refine(grid, res)))
    seam = CutoffFamily(grid.length / 8, grid.length).seam_fraction(grid, u)

    if np.max(np.abs(u), initial=0.0) <= trivial_threshold:
        verdict = "trivial"
    elif seam > seam_tol:
        verdict = "inconclusive"
    elif ce + se > margin * bound:
        verdict = "inconsistent-with-solution"
    else:
        verdict = "inconclusive"
    return CertificateReport(
        cosh_energy=ce,
        sech_energy=se,
        residual_norm=rn,
        b32_norm=sp.besov_norm(grid, u, 1.5),
        verdict=verdict,
        pairing_bound=bound,
        virial_pairing=virial,
        seam_fraction=seam,
    )
