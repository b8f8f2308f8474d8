"""Newton solver, pseudo-arclength continuation and the solitary-wave search.

Unknowns are even profiles stored as cosine coefficients ``x_m`` (rfft
layout, modes ``0 .. n/2 - 1``, the Nyquist mode pinned to zero): the field is
``x_0 + 2 sum_m x_m cos(xi_m alpha)``.  Evenness removes the translation
degeneracy without a phase condition.

Two formulations are supported:

``full``
    unknown ``Re W_alpha``; residual :func:`~holowave.steady.residual_full`.
    The mean of ``Re W_alpha`` is kept as an unknown: its equation has the
    non-degenerate coefficient ``g h - c^2``.
``sinh``
    unknown ``U``; residual :func:`~holowave.steady.residual_sinh` (``g = 0``).
    Its speed relates to the full one by ``c_full = sqrt(2) c_sinh``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from . import spectral as sp
from .certificate import SEAM_TOL, CertificateReport, nonexistence_certificate
from .errors import DegeneracyError, MagnitudeError, NewtonFailure, ParameterError, UsageError
from .spectral import PeriodicGrid
from .steady import (
    DEFAULT_DELTA,
    LogProfile,
    SteadyProfile,
    WaveParameters,
    exp_log_profile,
    full_jacobian_apply,
    reconstruct_surface,
    residual_full,
    residual_sinh,
    sinh_jacobian_apply,
    surface_elevation,
)

KINDS = ("full", "sinh")
COLLAPSE_TOL = 1e-8
DENSE_LIMIT = 1024
SQRT2 = math.sqrt(2.0)


# --- configuration ----------------------------------------------------------


@dataclass(frozen=True)
class NewtonConfig:
    max_iters: int = 40
    abs_tol: float = 1e-10
    rel_tol: float = 1e-13
    damping: float = 1.0
    linear_solver: str = "auto"  # dense | iterative | auto
    krylov_maxiter: int = 400
    krylov_tol: float = 1e-12
    min_damping: float = 1.0 / 256
    divergence_factor: float = 1e8

    def __post_init__(self):
        if self.max_iters < 1:
            raise ParameterError("max_iters must be at least 1")
        if not (self.abs_tol > 0 and self.rel_tol > 0 and self.krylov_tol > 0):
            raise ParameterError("tolerances must be positive")
        if not 0 < self.damping <= 1:
            raise ParameterError("damping must lie in (0, 1]")
        if self.linear_solver not in ("dense", "iterative", "auto"):
            raise ParameterError(f"unknown linear solver {self.linear_solver!r}")
        if self.krylov_maxiter < 1:
            raise ParameterError("krylov_maxiter must be at least 1")


@dataclass(frozen=True)
class ContinuationConfig:
    ds: float = 0.02
    ds_min: float = 1e-5
    ds_max: float = 0.1
    max_points: int = 200
    target_amplitude: Optional[float] = None
    c_min: Optional[float] = None
    c_max: Optional[float] = None
    detect_folds: bool = True
    max_folds: int = 2
    stop_on_overhang: bool = False
    fast_iters: int = 4

    def __post_init__(self):
        if not 0 < self.ds_min <= self.ds <= self.ds_max:
            raise ParameterError("need 0 < ds_min <= ds <= ds_max")
        if self.max_points < 1:
            raise ParameterError("max_points must be at least 1")
        if self.max_folds < 0:
            raise ParameterError("max_folds must be non-negative")


# --- records ----------------------------------------------------------------


@dataclass(frozen=True)
class BranchPoint:
    kind: str
    grid: PeriodicGrid
    coeffs: np.ndarray
    params: WaveParameters
    residual_norm: float
    amplitude: float
    overhang: bool
    u_sup: float
    iterations: int = 0
    certificate: Optional[CertificateReport] = None
    arclength: float = 0.0

    @property
    def field(self) -> np.ndarray:
        return coeffs_to_field(self.grid, self.coeffs)

    @property
    def profile(self):
        """``SteadyProfile`` (full) or ``LogProfile`` (sinh)."""
        f = self.field
        if self.kind == "full":
            return SteadyProfile.from_real(self.grid, f, self.params.h, delta=_SMALL_DELTA)
        return LogProfile(self.grid, f, -sp.tilbert(self.grid, f, self.params.h), self.params.h)

    def steady_profile(self) -> SteadyProfile:
        if self.kind == "full":
            return self.profile
        return exp_log_profile(self.grid, self.field, self.params.h, delta=_SMALL_DELTA)

    def full_params(self) -> WaveParameters:
        """Parameters under which :meth:`steady_profile` solves the full equation."""
        return self.params if self.kind == "full" else self.params.with_c(SQRT2 * self.params.c)


@dataclass
class Branch:
    points: list = field(default_factory=list)
    seed: dict = field(default_factory=dict)
    termination: str = ""
    folds: int = 0


@dataclass(frozen=True)
class NewtonResult:
    y: np.ndarray
    residual_norm: float
    iterations: int
    history: tuple


_SMALL_DELTA = 1e-12


# --- cosine basis -----------------------------------------------------------


def n_modes(grid: PeriodicGrid) -> int:
    return grid.n_points // 2


def coeffs_to_field(grid: PeriodicGrid, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    spec = np.zeros(x.shape[:-1] + (grid.n_points // 2 + 1,), dtype=complex)
    spec[..., : x.shape[-1]] = x
    return np.fft.irfft(spec, n=grid.n_points, axis=-1) * grid.n_points


def field_to_coeffs(grid: PeriodicGrid, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return np.real(np.fft.rfft(u, axis=-1))[..., : n_modes(grid)] / grid.n_points


def cosine_weights(grid: PeriodicGrid) -> np.ndarray:
    """Weights making ``sum w x^2`` the mean square of the field."""
    w = np.full(n_modes(grid), 2.0)
    w[0] = 1.0
    return w


def even_part(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return 0.5 * (u + np.roll(u[..., ::-1], 1, axis=-1))


# --- problem definitions ----------------------------------------------------


class _Problem:
    """Residual, Jacobian and derivative in ``c`` for one formulation."""

    def __init__(self, kind: str, grid: PeriodicGrid, params: WaveParameters, delta: float):
        if kind not in KINDS:
            raise UsageError(f"unknown residual kind {kind!r}")
        if kind == "sinh":
            if params.g != 0:
                raise UsageError("the sinh formulation is the g = 0 problem")
            if not params.sigma > 0:
                raise UsageError("the sinh formulation needs sigma > 0")
        self.kind, self.grid, self.params, self.delta = kind, grid, params, delta
        self.m = n_modes(grid)

    def _profile(self, u):
        return SteadyProfile.from_real(self.grid, u, self.params.h, self.delta)

    def residual_field(self, x, c: float) -> np.ndarray:
        u = coeffs_to_field(self.grid, x)
        p = self.params.with_c(c)
        if self.kind == "full":
            return residual_full(self._profile(u), p)
        if np.max(np.abs(u)) > 700:
            raise MagnitudeError("sinh argument out of range")
        return residual_sinh(self.grid, u, p)

    def jacobian(self, x, c: float) -> np.ndarray:
        basis = coeffs_to_field(self.grid, np.eye(self.m))
        return field_to_coeffs(self.grid, self._apply_fields(x, c, basis)).T

    def _apply_fields(self, x, c: float, du) -> np.ndarray:
        u = coeffs_to_field(self.grid, x)
        p = self.params.with_c(c)
        if self.kind == "full":
            return full_jacobian_apply(self._profile(u), du, p)
        return sinh_jacobian_apply(self.grid, u, du, p)

    def jacobian_apply(self, x, c: float) -> Callable:
        u = coeffs_to_field(self.grid, x)
        p = self.params.with_c(c)
        prof = self._profile(u) if self.kind == "full" else None

        def mv(v):
            du = coeffs_to_field(self.grid, v)
            if prof is not None:
                out = full_jacobian_apply(prof, du, p)
            else:
                out = sinh_jacobian_apply(self.grid, u, du, p)
            return field_to_coeffs(self.grid, out)

        return mv

    def preconditioner(self, c: float) -> np.ndarray:
        """Positive multiplier approximating the Jacobian on each cosine mode."""
        xi = self.grid.wavenumbers[: self.m]
        h, s, g = self.params.h, self.params.sigma, self.params.g
        if self.kind == "sinh":
            return s * xi * np.tanh(h * xi) + 2 * c**2
        grav = np.where(xi > 0, np.tanh(h * xi) / np.where(xi > 0, xi, 1.0), h)
        return s * xi * np.tanh(h * xi) + g * grav + c**2

    def d_dc(self, x, c: float) -> np.ndarray:
        u = coeffs_to_field(self.grid, x)
        if self.kind == "full":
            prof = self._profile(u)
            one = 1.0 + sp.refine(self.grid, prof.value)
            out = sp.coarsen(self.grid, -c * (1.0 - 1.0 / np.abs(one) ** 2))
        else:
            out = -4.0 * c * np.sinh(u)
        return field_to_coeffs(self.grid, out)

    def point(self, x, c: float, iterations: int = 0, certify: bool = False, arclength: float = 0.0) -> BranchPoint:
        x = np.asarray(x, dtype=float).copy()
        p = self.params.with_c(c)
        u = coeffs_to_field(self.grid, x)
        res = sp.l2_norm(self.grid, self.residual_field(x, c))
        if self.kind == "full":
            prof = SteadyProfile.from_real(self.grid, u, p.h, delta=_SMALL_DELTA)
        else:
            prof = exp_log_profile(self.grid, u, p.h, delta=_SMALL_DELTA)
        eta = surface_elevation(self.grid, prof.value, p.h)
        cert = None
        if certify and self.kind == "sinh":
            cert = nonexistence_certificate(self.grid, u, p)
        return BranchPoint(
            kind=self.kind,
            grid=self.grid,
            coeffs=x,
            params=p,
            residual_norm=float(res),
            amplitude=float(np.max(np.abs(eta))),
            overhang=reconstruct_surface(prof).overhang,
            u_sup=float(np.max(np.abs(u))),
            iterations=iterations,
            certificate=cert,
            arclength=arclength,
        )


# --- Newton -----------------------------------------------------------------


def _linear_solve(cfg: NewtonConfig, n: int, dense: Callable, apply: Callable, precond: np.ndarray, rhs):
    mode = cfg.linear_solver
    if mode == "auto":
        mode = "dense" if n <= DENSE_LIMIT else "iterative"
    if mode == "dense":
        a = dense()
        sol = sla.solve(a, rhs, check_finite=True)
    else:
        m = len(rhs)
        op = spla.LinearOperator((m, m), matvec=apply, dtype=float)
        pre = spla.LinearOperator((m, m), matvec=lambda v: v / precond, dtype=float)
        sol, info = spla.gmres(op, rhs, M=pre, rtol=cfg.krylov_tol, atol=0.0, restart=min(m, 100), maxiter=cfg.krylov_maxiter)
        if info != 0 and np.linalg.norm(apply(sol) - rhs) > 1e-6 * np.linalg.norm(rhs):
            raise np.linalg.LinAlgError(f"GMRES did not converge (info={info})")
    if not np.all(np.isfinite(sol)):
        raise np.linalg.LinAlgError("non-finite Newton step")
    return sol


def _newton_core(
    evaluate: Callable,
    solve_step: Callable,
    y0: np.ndarray,
    cfg: NewtonConfig,
    norm_scale: float = 1.0,
) -> NewtonResult:
    """Damped Newton with backtracking on ``||residual||``.

    ``evaluate(y)`` returns ``(vector, norm)``; ``solve_step(y, vector)``
    returns the Newton increment.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        return _newton_loop(evaluate, solve_step, y0, cfg, norm_scale)


def _newton_loop(evaluate, solve_step, y0, cfg, norm_scale):
    y = np.asarray(y0, dtype=float).copy()
    try:
        r, nrm = evaluate(y)
    except DegeneracyError as exc:
        raise NewtonFailure("degenerate-profile", str(exc), iterate=y) from exc
    except (MagnitudeError, FloatingPointError, OverflowError) as exc:
        raise NewtonFailure("diverged", str(exc), iterate=y) from exc
    nrm0 = max(nrm, 1e-300)
    history = [(nrm, 0.0)]
    for it in range(cfg.max_iters + 1):
        if nrm <= cfg.abs_tol:
            return NewtonResult(y, nrm, it, tuple(history))
        if it == cfg.max_iters:
            break
        try:
            dy = solve_step(y, r)
        except (np.linalg.LinAlgError, ValueError, DegeneracyError) as exc:
            raise NewtonFailure("stagnated", f"linear solve failed: {exc}", iterate=y, residual_norm=nrm, history=history) from exc
        t = cfg.damping
        accepted = False
        degenerate = False
        while t >= cfg.min_damping:
            cand = y + t * dy
            try:
                r_new, n_new = evaluate(cand)
            except DegeneracyError:
                degenerate = True
                t *= 0.5
                continue
            except (MagnitudeError, FloatingPointError, OverflowError):
                t *= 0.5
                continue
            if np.isfinite(n_new) and (n_new < (1 - 1e-4 * t) * nrm or n_new <= cfg.abs_tol):
                accepted = True
                break
            t *= 0.5
        if not accepted:
            reason = "degenerate-profile" if degenerate else "stagnated"
            raise NewtonFailure(reason, "no descent along the Newton direction", iterate=y, residual_norm=nrm, history=history)
        step = float(np.linalg.norm(t * dy))
        y, r, nrm = cand, r_new, n_new
        history.append((nrm, step))
        if nrm > cfg.divergence_factor * max(1.0, nrm0):
            raise NewtonFailure("diverged", "residual blew up", iterate=y, residual_norm=nrm, history=history)
        if step <= cfg.rel_tol * max(norm_scale, float(np.linalg.norm(y))):
            break
    kind = "diverged" if not np.isfinite(nrm) else "stagnated"
    raise NewtonFailure(kind, f"residual {nrm:.3e} above tolerance after {len(history) - 1} steps", iterate=y, residual_norm=nrm, history=history)


def _as_coeffs(grid: PeriodicGrid, guess) -> np.ndarray:
    g = np.asarray(guess, dtype=float)
    if g.shape == (grid.n_points,):
        return field_to_coeffs(grid, g)
    if g.shape == (n_modes(grid),):
        return g.copy()
    raise UsageError("guess must be a grid field or a cosine coefficient vector")


def newton_solve(
    kind: str,
    grid: PeriodicGrid,
    guess,
    params: WaveParameters,
    cfg: NewtonConfig = NewtonConfig(),
    fix_mode: Optional[tuple] = None,
    delta: float = DEFAULT_DELTA,
    certify: bool = False,
) -> BranchPoint:
    """Solve ``residual = 0`` for an even profile.

    ``guess`` is a field (``Re W_alpha`` or ``U``) or cosine coefficients;
    its odd part is discarded.  By default ``c`` is held fixed.  With
    ``fix_mode=(m, value)`` the speed becomes an unknown and the cosine
    coefficient ``m`` is pinned to ``value`` (amplitude-parameterized solve,
    needed next to bifurcation points where the fixed-``c`` Jacobian is
    singular).

    Raises :class:`~holowave.errors.NewtonFailure` with reason
    ``diverged``, ``stagnated`` or ``degenerate-profile``.
    """
    prob = _Problem(kind, grid, params, delta)
    x0 = _as_coeffs(grid, guess)
    m = prob.m
    field_norm = lambda f: sp.l2_norm(grid, f)  # noqa: E731

    if fix_mode is None:
        c = params.c

        def evaluate(x):
            f = prob.residual_field(x, c)
            return field_to_coeffs(grid, f), field_norm(f)

        def solve_step(x, r):
            return _linear_solve(
                cfg, grid.n_points, lambda: prob.jacobian(x, c), prob.jacobian_apply(x, c), prob.preconditioner(c), -r
            )

        res = _newton_core(evaluate, solve_step, x0, cfg)
        return prob.point(res.y, c, res.iterations, certify)

    mode, value = int(fix_mode[0]), float(fix_mode[1])
    if not 0 < mode < m:
        raise ParameterError("pinned mode must be a resolved non-zero cosine mode")

    def evaluate_aug(y):
        f = prob.residual_field(y[:m], y[m])
        v = np.append(field_to_coeffs(grid, f), y[mode] - value)
        return v, math.hypot(field_norm(f), y[mode] - value)

    def solve_aug(y, r):
        a = np.zeros((m + 1, m + 1))
        a[:m, :m] = prob.jacobian(y[:m], y[m])
        a[:m, m] = prob.d_dc(y[:m], y[m])
        a[m, mode] = 1.0
        return sla.solve(a, -r)

    y0 = np.append(x0, params.c)
    y0[mode] = value
    res = _newton_core(evaluate_aug, solve_aug, y0, cfg)
    return prob.point(res.y[:m], res.y[m], res.iterations, certify)


# --- seeds ------------------------------------------------------------------


def linear_symbol(kind: str, grid: PeriodicGrid, params: WaveParameters) -> np.ndarray:
    """Jacobian at the flat state on cosine modes ``0 .. n/2-1``."""
    xi = grid.wavenumbers[: n_modes(grid)]
    h, s, g, c = params.h, params.sigma, params.g, params.c
    if kind == "sinh":
        return s * xi * np.tanh(h * xi) - 2 * c**2
    grav = np.where(xi > 0, np.tanh(h * xi) / np.where(xi > 0, xi, 1.0), h)
    return s * xi * np.tanh(h * xi) + g * grav - c**2


@dataclass(frozen=True)
class Seed:
    kind: str
    grid: PeriodicGrid
    k: float
    amplitude: float
    params: WaveParameters
    field: np.ndarray

    @property
    def mode(self) -> int:
        return self.grid.mode_index(self.k)


def seed_from_dispersion(
    grid: PeriodicGrid, k: float, a: float, params: WaveParameters, kind: str = "full", order: int = 2
) -> Seed:
    """Small-amplitude periodic guess ``a cos(k alpha) + O(a^2)`` at the linear speed.

    ``c^2`` is taken from the dispersion relation (halved for the sinh
    formulation).  With ``order=2`` the second-order Stokes correction is
    added: the quadratic residual of the linear mode is inverted against the
    flat-state symbol on every non-resonant mode, so the seed residual is
    ``O(a^3)`` instead of ``O(a^2)``.
    """
    from .steady import dispersion_speed

    idx = grid.mode_index(k)
    if order not in (1, 2):
        raise ParameterError("order must be 1 or 2")
    c2 = dispersion_speed(k, params)
    if kind == "sinh":
        c2 = 0.5 * c2
    p = params.with_c(math.sqrt(c2))
    x = np.zeros(n_modes(grid))
    x[idx] = 0.5 * a
    if order == 2 and a != 0:
        prob = _Problem(kind, grid, p, _SMALL_DELTA)
        r = field_to_coeffs(grid, prob.residual_field(x, p.c))
        sym = linear_symbol(kind, grid, p)
        keep = np.ones_like(sym, dtype=bool)
        keep[idx] = False
        keep &= np.abs(sym) > 1e-8 * (1 + np.max(np.abs(sym)))
        x[keep] -= r[keep] / sym[keep]
    return Seed(kind, grid, float(k), float(a), p, coeffs_to_field(grid, x))


def _coeff_of(seed: Seed) -> float:
    return float(field_to_coeffs(seed.grid, seed.field)[seed.mode])


def solve_seed(seed: Seed, cfg: NewtonConfig = NewtonConfig(), certify: bool = False) -> BranchPoint:
    """Converge a dispersion seed with its mode-``k`` coefficient pinned."""
    return newton_solve(seed.kind, seed.grid, seed.field, seed.params, cfg, fix_mode=(seed.mode, _coeff_of(seed)), certify=certify)


# --- continuation -----------------------------------------------------------


def _c_scale(params: WaveParameters) -> float:
    return math.sqrt(params.g * params.h + params.sigma / params.h)


def continue_branch(
    seed: BranchPoint,
    cfg: ContinuationConfig = ContinuationConfig(),
    newton: NewtonConfig = NewtonConfig(),
    tangent: Optional[np.ndarray] = None,
    certify: bool = False,
    seed_meta: Optional[dict] = None,
    callback: Optional[Callable] = None,
) -> Branch:
    """Pseudo-arclength continuation in ``(profile, c)``.

    The arclength metric weights the RMS of the profile field and ``c``
    divided by ``sqrt(g h + sigma / h)`` equally.  The predictor is the secant
    through the last two points (the null vector of the augmented Jacobian
    for the first step, oriented towards growing amplitude).  Each corrector
    solves the residual together with the arclength condition; on failure the
    step is halved down to ``ds_min``.

    Termination reasons: ``max-points``, ``target-amplitude``, ``c-range``,
    ``overhang``, ``folds``, ``degenerate-profile``, ``corrector-failed``,
    ``zero-tangent``.
    """
    grid, kind = seed.grid, seed.kind
    prob = _Problem(kind, grid, seed.params, _SMALL_DELTA)
    m = prob.m
    cs = _c_scale(seed.params)
    wts = np.append(cosine_weights(grid), 1.0 / cs**2)

    def wdot(a, b):
        return float(np.sum(wts * a * b))

    def wnorm(a):
        return math.sqrt(wdot(a, a))

    branch = Branch(points=[seed], seed=dict(seed_meta or {}))
    y_prev = None
    y = np.append(seed.coeffs, seed.params.c)

    if tangent is None:
        aug = np.zeros((m, m + 1))
        aug[:, :m] = prob.jacobian(y[:m], y[m])
        aug[:, m] = prob.d_dc(y[:m], y[m])
        t = sla.null_space(aug, rcond=1e-10)
        t = t[:, -1] if t.size else np.linalg.svd(aug)[2][-1]
    else:
        t = np.asarray(tangent, dtype=float)
    if np.linalg.norm(t[:m]) * math.sqrt(m) <= 1e-12 * max(1.0, np.linalg.norm(t)) or seed.u_sup == 0 and tangent is None:
        branch.termination = "zero-tangent"
        return branch
    t = t / wnorm(t)
    orient = float(np.sum(wts[:m] * t[:m] * y[:m]))
    if orient < 0 or (orient == 0 and t[m] < 0):
        t = -t

    ds = cfg.ds
    s_total = seed.arclength
    last_dc = t[m]
    while True:
        if len(branch.points) >= cfg.max_points:
            branch.termination = "max-points"
            break
        if y_prev is not None:
            sec = y - y_prev
            t = sec / wnorm(sec)
        pred = y + ds * t

        def evaluate(z, _pred=pred, _t=t):
            f = prob.residual_field(z[:m], z[m])
            arc = wdot(_t, z - _pred)
            return np.append(field_to_coeffs(grid, f), arc), math.hypot(sp.l2_norm(grid, f), arc)

        def solve_step(z, r, _t=t):
            a = np.zeros((m + 1, m + 1))
            a[:m, :m] = prob.jacobian(z[:m], z[m])
            a[:m, m] = prob.d_dc(z[:m], z[m])
            a[m] = wts * _t
            return sla.solve(a, -r)

        try:
            res = _newton_core(evaluate, solve_step, pred, replace(newton, max_iters=min(newton.max_iters, 12)))
        except NewtonFailure as exc:
            if exc.reason == "degenerate-profile" and ds <= cfg.ds_min:
                branch.termination = "degenerate-profile"
                break
            ds *= 0.5
            if ds < cfg.ds_min:
                branch.termination = "degenerate-profile" if exc.reason == "degenerate-profile" else "corrector-failed"
                break
            continue
        z = res.y
        step = wnorm(z - y)
        s_total += step
        try:
            pt = prob.point(z[:m], z[m], res.iterations, certify, arclength=s_total)
        except DegeneracyError:
            branch.termination = "degenerate-profile"
            break
        if pt.residual_norm > newton.abs_tol:
            ds *= 0.5
            if ds < cfg.ds_min:
                branch.termination = "corrector-failed"
                break
            continue
        y_prev, y = y, z
        branch.points.append(pt)
        if callback is not None:
            callback(pt)
        dc = z[m] - y_prev[m]
        if cfg.detect_folds and dc * last_dc < 0:
            branch.folds += 1
        if dc != 0:
            last_dc = dc
        if res.iterations <= cfg.fast_iters:
            ds = min(cfg.ds_max, ds * 1.5)
        elif res.iterations > 8:
            ds = max(cfg.ds_min, ds * 0.5)

        if cfg.stop_on_overhang and pt.overhang:
            branch.termination = "overhang"
            break
        if cfg.target_amplitude is not None and pt.amplitude >= cfg.target_amplitude:
            branch.termination = "target-amplitude"
            break
        if (cfg.c_min is not None and z[m] < cfg.c_min) or (cfg.c_max is not None and z[m] > cfg.c_max):
            branch.termination = "c-range"
            break
        if cfg.detect_folds and branch.folds > cfg.max_folds:
            branch.termination = "folds"
            break
    return branch


# --- solitary search --------------------------------------------------------

OUTCOMES = ("collapsed-to-zero", "diverged", "stagnated", "degenerate-profile", "converged-nonzero")


@dataclass(frozen=True)
class SeedSpec:
    """Localized guess ``amplitude * exp(-alpha^2 / (2 width^2))`` (optionally modulated)."""

    amplitude: float
    width: float
    wavenumber: float = 0.0

    def sample(self, grid: PeriodicGrid) -> np.ndarray:
        a = grid.centered_nodes
        env = self.amplitude * np.exp(-0.5 * (a / self.width) ** 2)
        return env * np.cos(self.wavenumber * a)


def random_seeds(rng: np.random.Generator, count: int) -> list:
    """Deterministic family of localized guesses."""
    out = []
    for _ in range(count):
        amp = float(rng.uniform(0.05, 0.6) * rng.choice([-1.0, 1.0]))
        width = float(rng.uniform(1.0, 5.0))
        wave = float(rng.choice([0.0, rng.uniform(0.5, 2.0)]))
        out.append(SeedSpec(amp, width, wave))
    return out


@dataclass(frozen=True)
class SearchCell:
    length: float
    n_points: int
    seed_index: int
    seed: SeedSpec
    outcome: str
    u_sup: float
    residual_norm: float
    iterations: int
    certificate: Optional[CertificateReport] = None
    full_residual_norm: Optional[float] = None
    coeffs: Optional[np.ndarray] = None
    localized: bool = False


@dataclass(frozen=True)
class SearchReport:
    params: WaveParameters
    lengths: tuple
    cells: tuple
    max_nonzero_amplitude: dict
    max_localized_amplitude: dict
    persistent_nonzero: int
    monotone: bool
    uncertified_stagnations: int
    consistent_with_nonexistence: bool


def _cell(
    length: float,
    n: int,
    idx: int,
    seed: SeedSpec,
    params: WaveParameters,
    cfg: NewtonConfig,
    collapse_tol: float,
    seam_tol: float,
) -> SearchCell:
    grid = PeriodicGrid(n, length)
    guess = seed.sample(grid)
    try:
        pt = newton_solve("sinh", grid, guess, params, cfg)
    except NewtonFailure as exc:
        u = coeffs_to_field(grid, exc.iterate[: n_modes(grid)]) if exc.iterate is not None else guess
        sup = float(np.max(np.abs(u)))
        cert = None
        if exc.reason == "stagnated" and sup > collapse_tol and np.all(np.isfinite(u)) and sup < 700:
            cert = nonexistence_certificate(grid, u, params, seam_tol=seam_tol)
        local = cert is not None and cert.seam_fraction <= seam_tol
        return SearchCell(
            length, n, idx, seed, exc.reason, sup, float(exc.residual_norm), len(exc.history) - 1, cert,
            coeffs=field_to_coeffs(grid, u), localized=local,
        )
    if pt.u_sup < collapse_tol:
        return SearchCell(length, n, idx, seed, "collapsed-to-zero", pt.u_sup, pt.residual_norm, pt.iterations, coeffs=pt.coeffs)
    cert = nonexistence_certificate(grid, pt.field, params, seam_tol=seam_tol)
    full = sp.l2_norm(grid, residual_full(pt.steady_profile(), pt.full_params()))
    return SearchCell(
        length, n, idx, seed, "converged-nonzero", pt.u_sup, pt.residual_norm, pt.iterations, cert, float(full),
        pt.coeffs, localized=cert.seam_fraction <= seam_tol,
    )


def solitary_search(
    params: WaveParameters,
    lengths: Sequence[float],
    seeds: Sequence[SeedSpec],
    cfg: NewtonConfig = NewtonConfig(),
    points_per_length: float = 4.0,
    collapse_tol: float = COLLAPSE_TOL,
    monotone_tol: float = 0.1,
    seam_tol: float = SEAM_TOL,
    workers: int = 1,
) -> SearchReport:
    """Newton runs of the pure-capillary sinh equation from localized guesses.

    Each ``(L, seed)`` cell is classified as ``collapsed-to-zero`` (converged
    with ``sup|U| < collapse_tol``), ``converged-nonzero``, ``diverged``,
    ``stagnated`` or ``degenerate-profile``.  Non-trivial converged or
    stagnated profiles receive a non-existence certificate, and are marked
    ``localized`` when their mass next to the seam is below ``seam_tol``.
    Non-localized converged states are periodic waves of the torus (the
    linear symbol vanishes near some grid mode for every ``c``): they are
    reported but are not solitary candidates.

    The aggregate is consistent with non-existence when the largest localized
    converged ``sup|U|`` does not grow (within ``monotone_tol``) as ``L``
    doubles, no seed yields a localized state of non-decreasing amplitude at
    every ``L``, and every non-trivial stagnated profile is certified
    ``inconsistent-with-solution``.
    """
    if params.g != 0 or not params.sigma > 0:
        raise UsageError("solitary_search is the pure-capillary problem: g = 0, sigma > 0")
    lengths = [float(v) for v in lengths]
    if not lengths or any(b <= a for a, b in zip(lengths, lengths[1:])):
        raise UsageError("lengths must be non-empty and strictly increasing")
    jobs = []
    for L in lengths:
        n = int(2 * math.ceil(points_per_length * L / 2))
        for i, s in enumerate(seeds):
            jobs.append((L, n, i, s))

    def run(j):
        return _cell(*j, params, cfg, collapse_tol, seam_tol)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as ex:
            cells = list(ex.map(run, jobs))
    else:
        cells = [run(j) for j in jobs]

    def max_by_length(pred):
        out = {}
        for L in lengths:
            amps = [c.u_sup for c in cells if c.length == L and c.outcome == "converged-nonzero" and pred(c)]
            out[L] = max(amps) if amps else 0.0
        return out

    max_all = max_by_length(lambda c: True)
    max_loc = max_by_length(lambda c: c.localized)
    monotone = all(max_loc[b] <= (1 + monotone_tol) * max_loc[a] for a, b in zip(lengths, lengths[1:]))
    persistent = 0
    for i in range(len(seeds)):
        amps = [c.u_sup if c.outcome == "converged-nonzero" and c.localized else 0.0 for c in cells if c.seed_index == i]
        if len(amps) > 1 and all(a > 0 for a in amps) and all(b >= (1 - monotone_tol) * a for a, b in zip(amps, amps[1:])):
            persistent += 1
    uncertified = sum(
        1
        for c in cells
        if c.outcome == "stagnated"
        and c.u_sup > collapse_tol
        and (c.certificate is None or c.certificate.verdict != "inconsistent-with-solution")
    )
    consistent = monotone and persistent == 0 and uncertified == 0
    return SearchReport(params, tuple(lengths), tuple(cells), max_all, max_loc, persistent, monotone, uncertified, consistent)
