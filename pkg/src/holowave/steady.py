"""Travelling-wave residuals in holomorphic coordinates.

The unknown of the steady problem is the boundary trace ``W_alpha`` (a
holomorphic function); ``1 + W_alpha = Z_alpha`` parametrizes the tangent of
the free surface.  Three equivalent forms of the steady equation are exposed:

* :func:`residual_full` -- the real equation
  ``-c^2/2 (J - 1)/J + g Im W + Re[i sigma/(1+W_a) d/da((1+W_a)/|1+W_a|)]``,
* :func:`residual_scaled` -- the complex pure-capillary form
  ``i sigma d/da((1+W_a)/|1+W_a|) - c^2 [W_a + conj(W_a)/(1+conj(W_a))]``,
* :func:`residual_sinh` -- after ``log(1+W_a) = U + iV`` with ``V = -T_h U``,
  ``sigma T_h U_a - 2 c^2 sinh U``.

They are linked exactly by ``(1 + W_a) * residual_full(c) = residual_scaled(c / sqrt 2)``
and ``exp(-iV) * residual_scaled(c) = residual_sinh(U; c)``.

Nonlinear terms are evaluated on the 2x grid and truncated back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spectral as sp
from .errors import DegeneracyError, LogBranchError, ParameterError, UsageError
from .holomorphic import (
    HolomorphicBoundaryFunction,
    make_holomorphic,
    project_Ph,
)
from .spectral import PeriodicGrid

DEFAULT_DELTA = 1e-3


@dataclass(frozen=True)
class WaveParameters:
    g: float
    sigma: float
    h: float
    c: float

    def __post_init__(self):
        for name in ("g", "sigma", "h", "c"):
            val = getattr(self, name)
            if not np.isfinite(val):
                raise ParameterError(f"{name} must be finite, got {val!r}")
            object.__setattr__(self, name, float(val))
        if self.g < 0 or self.sigma < 0:
            raise ParameterError("g and sigma must be non-negative")
        if self.g == 0 and self.sigma == 0:
            raise ParameterError("at least one of g, sigma must be non-zero")
        if self.h <= 0:
            raise ParameterError(f"depth h must be positive, got {self.h!r}")

    def with_c(self, c: float) -> "WaveParameters":
        return WaveParameters(self.g, self.sigma, self.h, c)


@dataclass(frozen=True)
class SteadyProfile:
    """The trace ``W_alpha`` together with a lower bound ``delta`` for ``|1 + W_alpha|``."""

    w_alpha: HolomorphicBoundaryFunction
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        if not self.delta > 0:
            raise ParameterError("delta must be positive")
        m = float(np.min(np.abs(1.0 + self.w_alpha.value)))
        if m < self.delta:
            raise DegeneracyError(f"min |1 + W_alpha| = {m:.3e} is below delta = {self.delta:.3e}")

    @classmethod
    def from_real(cls, grid: PeriodicGrid, re_w_alpha, h: float, delta: float = DEFAULT_DELTA) -> "SteadyProfile":
        return cls(make_holomorphic(grid, re_w_alpha, h), delta)

    @property
    def grid(self) -> PeriodicGrid:
        return self.w_alpha.grid

    @property
    def h(self) -> float:
        return self.w_alpha.h

    @property
    def value(self) -> np.ndarray:
        return self.w_alpha.value

    def jacobian_factor(self) -> np.ndarray:
        """``J = |1 + W_alpha|^2``."""
        return np.abs(1.0 + self.value) ** 2


@dataclass(frozen=True)
class LogProfile:
    """``U + iV = log(1 + W_alpha)``."""

    grid: PeriodicGrid
    u: np.ndarray
    v: np.ndarray
    h: float

    def defect(self) -> float:
        return sp.l2_norm(self.grid, self.v + sp.tilbert(self.grid, self.u, self.h))


@dataclass(frozen=True)
class DynamicPair:
    """Holomorphic traces ``W`` and ``Q`` of the time-dependent system."""

    w: HolomorphicBoundaryFunction
    q: HolomorphicBoundaryFunction

    @property
    def grid(self) -> PeriodicGrid:
        return self.w.grid


# --- helpers ----------------------------------------------------------------


def _check_delta(one_plus_w: np.ndarray, delta: float) -> None:
    m = float(np.min(np.abs(one_plus_w)))
    if not m >= delta:
        raise DegeneracyError(f"min |1 + W_alpha| = {m:.3e} is below delta = {delta:.3e}")


def surface_elevation(grid: PeriodicGrid, w_alpha, h: float) -> np.ndarray:
    """``Im W`` recovered from ``W_alpha``.

    The zero-mean primitive of ``Im W_alpha`` plus ``h * mean(Re W_alpha)``:
    a mean horizontal stretch ``Re W = a0 * alpha`` lifts the surface by
    ``a0 * h`` when the bottom stays at ``-h``.
    """
    w_alpha = np.asarray(w_alpha)
    return h * np.mean(np.real(w_alpha), axis=-1, keepdims=True) + sp.antiderivative(grid, np.imag(w_alpha))


def exp_log_profile(grid: PeriodicGrid, u, h: float, delta: float = DEFAULT_DELTA) -> SteadyProfile:
    """Build the profile with ``1 + W_alpha = exp(u - i T_h u)``."""
    t = make_holomorphic(grid, u, h)
    w = np.exp(t.value) - 1.0
    return SteadyProfile(HolomorphicBoundaryFunction(grid, w.real, w.imag, float(h)), delta)


# --- time-dependent system under the travelling ansatz ----------------------


def compute_F(pair: DynamicPair, params: WaveParameters, delta: float = DEFAULT_DELTA, tol: float = sp.ZERO_MEAN_TOL):
    """``F = P_h[(Q_a - conj Q_a) / J]``."""
    grid = pair.grid
    w_a = sp.derivative(grid, pair.w.value)
    q_a = sp.derivative(grid, pair.q.value)
    _check_delta(1.0 + w_a, delta)
    wf, qf = sp.refine(grid, w_a), sp.refine(grid, q_a)
    arg = sp.coarsen(grid, 2j * qf.imag / np.abs(1.0 + wf) ** 2)
    return project_Ph(grid, arg, params.h, tol=tol)


def traveling_system_residual(pair: DynamicPair, params: WaveParameters, delta: float = DEFAULT_DELTA):
    """Real parts of both equations of the holomorphic system with ``d/dt = -c d/da``.

    Returns ``(r1, r2)`` with ``r1 = Re(-c W_a + F (1 + W_a))`` and ``r2`` the
    real part of the second equation with its mean removed.

    On the torus two real constants are left open: ``F`` is known only up to
    ``kappa`` (the kernel of ``T_h``; ``kappa (1 + W_a)`` is a horizontal
    reparametrization drift) and ``Q`` only up to a real constant.  ``kappa``
    is fixed so that ``r1`` has zero mean, and ``r2`` is reported modulo
    constants.
    """
    grid, h, c = pair.grid, params.h, params.c
    w_a = sp.derivative(grid, pair.w.value)
    q_a = sp.derivative(grid, pair.q.value)
    w_aa = sp.derivative(grid, w_a)
    F = compute_F(pair, params, delta).value

    prod = sp.dealiased_product
    base = np.real(-c * w_a + F + prod(grid, F, w_a))
    kappa = -np.mean(base) / (1.0 + np.mean(w_a.real))
    F = F + kappa
    r1 = base + kappa * (1.0 + w_a.real)

    wf = sp.refine(grid, w_a)
    qf = sp.refine(grid, q_a)
    waaf = sp.refine(grid, w_aa)
    jf = np.abs(1.0 + wf) ** 2
    kinetic = sp.coarsen(grid, np.abs(qf) ** 2 / jf)
    a = waaf / (np.sqrt(jf) * (1.0 + wf))
    capillary = sp.coarsen(grid, np.real(1j * (a - np.conj(a))))

    second = (
        -c * q_a
        + prod(grid, F, q_a)
        - params.g * sp.tilbert(grid, pair.w.value, h)
        + project_Ph(grid, kinetic, h).value
        + params.sigma * project_Ph(grid, capillary, h).value
    )
    r2 = np.real(second)
    return r1, r2 - np.mean(r2)


def qw_defect(grid: PeriodicGrid, w_alpha, q_alpha, c: float) -> float:
    return sp.l2_norm(grid, np.asarray(q_alpha) - c * np.asarray(w_alpha))


def check_QW_relation(pair: DynamicPair, c: float) -> float:
    """``||Q_a - c W_a||_2``; zero exactly on travelling solutions."""
    grid = pair.grid
    return qw_defect(grid, sp.derivative(grid, pair.w.value), sp.derivative(grid, pair.q.value), c)


# --- steady equation ---------------------------------------------------------


def _capillary_pieces(fine: PeriodicGrid, one: np.ndarray):
    jf = np.abs(one) ** 2
    n = one / np.sqrt(jf)
    return jf, n, sp.derivative(fine, n)


def residual_full(profile: SteadyProfile, params: WaveParameters) -> np.ndarray:
    """Left-hand side of the steady equation for all ``(g, sigma, h, c)``; a real field."""
    grid = profile.grid
    w = profile.value
    _check_delta(1.0 + w, profile.delta)
    fine = grid.refined(2)
    one = 1.0 + sp.refine(grid, w)
    _check_delta(one, profile.delta)
    jf, n, dn = _capillary_pieces(fine, one)
    local = -0.5 * params.c**2 * (1.0 - 1.0 / jf) + np.real(1j * params.sigma * dn / one)
    out = sp.coarsen(grid, local)
    if params.g:
        out = out + params.g * surface_elevation(grid, w, params.h)
    return out


def full_jacobian_apply(profile: SteadyProfile, d_re, params: WaveParameters) -> np.ndarray:
    """Derivative of :func:`residual_full` along holomorphic perturbations.

    ``d_re`` holds perturbations of ``Re W_alpha`` (shape ``(n,)`` or
    ``(k, n)``); the imaginary part follows by holomorphy.
    """
    grid, h = profile.grid, profile.h
    d_re = np.asarray(d_re, dtype=float)
    dw = d_re - 1j * sp.tilbert(grid, d_re, h)
    fine = grid.refined(2)
    one = 1.0 + sp.refine(grid, profile.value)
    jf, n, dn = _capillary_pieces(fine, one)
    dwf = sp.refine(grid, dw)
    dj = 2.0 * np.real(np.conj(one) * dwf)
    sq = np.sqrt(jf)
    d_n = dwf / sq - one * dj / (2.0 * jf * sq)
    local = -0.5 * params.c**2 * dj / jf**2 + np.real(
        1j * params.sigma * (sp.derivative(fine, d_n) / one - dwf * dn / one**2)
    )
    out = sp.coarsen(grid, local)
    if params.g:
        out = out + params.g * surface_elevation(grid, dw, h)
    return out


def residual_scaled(profile: SteadyProfile, params: WaveParameters) -> np.ndarray:
    """Complex pure-capillary form; ``params.g`` must be zero."""
    if params.g != 0:
        raise UsageError("residual_scaled is the g = 0 equation")
    grid = profile.grid
    w = profile.value
    _check_delta(1.0 + w, profile.delta)
    fine = grid.refined(2)
    wf = sp.refine(grid, w)
    one = 1.0 + wf
    _, _, dn = _capillary_pieces(fine, one)
    local = 1j * params.sigma * dn - params.c**2 * (wf + np.conj(wf) / np.conj(one))
    return sp.coarsen(grid, local)


def log_reduce(profile: SteadyProfile) -> LogProfile:
    """``U = log|1 + W_a|`` and the continuous branch ``V = arg(1 + W_a)``.

    The branch is pinned so that ``V`` has (nearly) zero mean, as the
    imaginary part of a holomorphic function must.  A non-zero winding of
    ``1 + W_a`` around the origin leaves no continuous periodic branch.
    """
    grid = profile.grid
    one = 1.0 + profile.value
    _check_delta(one, profile.delta)
    ang = np.angle(one)
    closed = np.unwrap(np.append(ang, ang[0]))
    winding = int(round((closed[-1] - closed[0]) / (2 * np.pi)))
    if winding != 0:
        raise LogBranchError(f"1 + W_alpha winds {winding} times around 0; no periodic logarithm")
    v = closed[:-1]
    v = v - 2 * np.pi * np.round(np.mean(v) / (2 * np.pi))
    u = np.log(np.abs(one))
    return LogProfile(grid, u, v, profile.h)


def residual_sinh(grid: PeriodicGrid, u, params: WaveParameters) -> np.ndarray:
    """``sigma T_h U_a - 2 c^2 sinh U``."""
    if not params.sigma > 0:
        raise UsageError("the sinh form needs sigma > 0")
    u = sp.check_field(grid, u)
    return params.sigma * sp.tilbert(grid, sp.derivative(grid, u), params.h) - 2 * params.c**2 * np.sinh(u)


def sinh_jacobian_apply(grid: PeriodicGrid, u, du, params: WaveParameters) -> np.ndarray:
    du = np.asarray(du, dtype=float)
    lin = params.sigma * sp.tilbert(grid, sp.derivative(grid, du), params.h)
    return lin - 2 * params.c**2 * np.cosh(u) * du


def sinh_symbol(grid: PeriodicGrid, params: WaveParameters) -> np.ndarray:
    """Symbol of ``sigma T_h d/da`` in rfft layout: ``sigma xi tanh(h xi)``."""
    xi = grid.wavenumbers
    s = params.sigma * xi * np.tanh(params.h * xi)
    s[-1] = 0.0
    return s


def dispersion_speed(k, params: WaveParameters):
    """Squared linear phase speed ``c^2(k) = (g/k + sigma k) tanh(h k)``."""
    k_arr = np.asarray(k, dtype=float)
    if np.any(~(k_arr > 0)):
        raise ParameterError("wavenumber must be positive")
    out = (params.g / k_arr + params.sigma * k_arr) * np.tanh(params.h * k_arr)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Surface:
    alpha: np.ndarray
    z: np.ndarray
    overhang: bool


def reconstruct_surface(profile: SteadyProfile, refine_factor: int = 4) -> Surface:
    """Free surface ``Z(alpha) = alpha + W(alpha)`` on the centered nodes.

    ``Re W`` is ``mean(Re W_a) * alpha`` plus the zero-mean primitive of the
    rest (the horizontal translation constant is fixed to zero);
    ``Im W`` comes from :func:`surface_elevation`.  ``overhang`` is set when
    ``1 + Re W_a`` becomes negative, i.e. the surface is not a graph.
    """
    grid = profile.grid
    w = profile.value
    alpha = grid.centered_nodes
    a0 = float(np.mean(w.real))
    re_w = a0 * alpha + sp.antiderivative(grid, w.real)
    im_w = surface_elevation(grid, w, profile.h)
    fine_re = sp.refine(grid, w.real, refine_factor) if refine_factor > 1 else w.real
    overhang = bool(np.min(1.0 + fine_re) < 0.0)
    return Surface(alpha, alpha + re_w + 1j * im_w, overhang)
