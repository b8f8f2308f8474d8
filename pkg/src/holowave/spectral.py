"""Fourier machinery on a uniform periodic grid.

Fields are plain float (or complex) numpy arrays sampled at the nodes of a
:class:`PeriodicGrid`.  Every operator here is a Fourier multiplier applied
through ``numpy.fft.rfft``; complex inputs are handled by linearity on their
real and imaginary parts, which is how the real-preserving operators of the
holomorphic calculus act on complex boundary traces.

Conventions
-----------
* Nodes are ``alpha_j = j L / n``; :attr:`PeriodicGrid.centered_nodes` wraps
  them into ``[-L/2, L/2)`` so that ``alpha = +-L/2`` is the torus edge.
* Wavenumbers are ``xi_m = 2 pi m / L`` for ``m`` in ``-n/2+1 .. n/2``.
* Spectral coefficients are ``fft(u) / n``, so that
  ``integrate(u * v) == L * sum(conj(u_hat) * v_hat)`` (Parseval).
* Odd symbols (``-i tanh``, ``i xi``, ...) annihilate the Nyquist mode:
  the real field ``cos(n/2 * 2 pi alpha / L)`` has no real odd image on the
  grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Union

import numpy as np

from .errors import ParameterError, SymbolDomainError, ZeroModeError

Symbol = Union[Callable[[np.ndarray], np.ndarray], np.ndarray]

ZERO_MEAN_TOL = 1e-10


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform discretization of a torus of circumference ``length``."""

    n_points: int
    length: float

    def __post_init__(self):
        n = self.n_points
        if int(n) != n or n < 8 or n % 2:
            raise ParameterError(f"n_points must be an even integer >= 8, got {n!r}")
        if not (np.isfinite(self.length) and self.length > 0):
            raise ParameterError(f"length must be positive, got {self.length!r}")
        object.__setattr__(self, "n_points", int(n))
        object.__setattr__(self, "length", float(self.length))

    @property
    def dx(self) -> float:
        return self.length / self.n_points

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n_points) * self.dx

    @cached_property
    def centered_nodes(self) -> np.ndarray:
        a = self.nodes.copy()
        a[self.n_points // 2:] -= self.length
        return a

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Non-negative wavenumbers of the rfft layout, ``m = 0 .. n/2``."""
        return 2 * np.pi * np.arange(self.n_points // 2 + 1) / self.length

    @cached_property
    def full_wavenumbers(self) -> np.ndarray:
        """Wavenumbers in numpy fft order with the Nyquist mode taken as ``+n/2``."""
        m = np.fft.fftfreq(self.n_points, 1.0 / self.n_points)
        m[self.n_points // 2] = self.n_points // 2
        return 2 * np.pi * m / self.length

    def refined(self, factor: int = 2) -> "PeriodicGrid":
        return PeriodicGrid(self.n_points * factor, self.length)

    def mode_index(self, k: float) -> int:
        """Return ``m`` with ``xi_m == k``; raise if ``k`` is not a grid wavenumber."""
        m = k * self.length / (2 * np.pi)
        mi = int(round(m))
        if abs(m - mi) > 1e-9 * max(1.0, abs(m)) or not 0 < mi < self.n_points // 2:
            raise ParameterError(f"k={k!r} is not a resolvable grid wavenumber")
        return mi


@dataclass(frozen=True)
class SpectralField:
    grid: PeriodicGrid
    coefficients: np.ndarray

    @property
    def wavenumbers(self) -> np.ndarray:
        return self.grid.full_wavenumbers


def to_spectral(grid: PeriodicGrid, u) -> SpectralField:
    u = check_field(grid, u, allow_complex=True)
    return SpectralField(grid, np.fft.fft(u) / grid.n_points)


def from_spectral(field: SpectralField) -> np.ndarray:
    return np.fft.ifft(field.coefficients * field.grid.n_points)


def check_field(grid: PeriodicGrid, u, allow_complex: bool = False) -> np.ndarray:
    u = np.asarray(u)
    if u.shape[-1:] != (grid.n_points,):
        raise ParameterError(f"field has shape {u.shape}, grid expects {grid.n_points} samples")
    if np.iscomplexobj(u) and not allow_complex:
        raise ParameterError("expected a real field")
    if not np.all(np.isfinite(u)):
        raise ParameterError("field contains non-finite samples")
    return u if np.iscomplexobj(u) else u.astype(float, copy=False)


def _multiplier_array(grid: PeriodicGrid, symbol: Symbol) -> np.ndarray:
    xi = grid.wavenumbers
    if callable(symbol):
        with np.errstate(all="ignore"):
            m = np.asarray(symbol(xi), dtype=complex) * np.ones_like(xi)
            m_neg = np.asarray(symbol(-xi), dtype=complex) * np.ones_like(xi)
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(m_neg))):
            raise SymbolDomainError("symbol is not finite at every grid wavenumber")
        # Nyquist excluded: +-n/2 are the same grid mode
        scale = np.max(np.abs(m)) + 1.0
        if np.max(np.abs(m_neg[:-1] - np.conj(m[:-1]))) > 1e-12 * scale:
            raise SymbolDomainError("symbol does not preserve real-valuedness (m(-xi) != conj m(xi))")
    else:
        m = np.asarray(symbol, dtype=complex)
        if m.shape != xi.shape:
            raise SymbolDomainError(f"symbol array must have {xi.size} entries (rfft layout)")
        if not np.all(np.isfinite(m)):
            raise SymbolDomainError("symbol is not finite at every grid wavenumber")
    m = m.copy()
    m[0] = m[0].real
    m[-1] = m[-1].real
    return m


def _apply(grid: PeriodicGrid, u: np.ndarray, mult: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(u):
        return _apply(grid, u.real, mult) + 1j * _apply(grid, u.imag, mult)
    return np.fft.irfft(np.fft.rfft(u, axis=-1) * mult, n=grid.n_points, axis=-1)


def apply_multiplier(grid: PeriodicGrid, u, symbol: Symbol) -> np.ndarray:
    """Return the field with Fourier coefficients ``m(xi) * u_hat(xi)``.

    ``symbol`` is either a callable evaluated at the grid wavenumbers or an
    array in rfft layout (``m = 0 .. n/2``).
    """
    u = check_field(grid, u, allow_complex=True)
    return _apply(grid, u, _multiplier_array(grid, symbol))


def _check_depth(h: float) -> float:
    if not (np.isfinite(h) and h > 0):
        raise ParameterError(f"depth must be positive, got {h!r}")
    return float(h)


def tilbert_symbol(grid: PeriodicGrid, h: float) -> np.ndarray:
    h = _check_depth(h)
    m = -1j * np.tanh(h * grid.wavenumbers)
    m[-1] = 0.0
    return m


def tilbert(grid: PeriodicGrid, u, h: float) -> np.ndarray:
    """Finite-depth Hilbert transform, symbol ``-i tanh(h xi)``."""
    u = check_field(grid, u, allow_complex=True)
    return _apply(grid, u, tilbert_symbol(grid, h))


def mean(grid: PeriodicGrid, u) -> float:
    return np.mean(u, axis=-1)


def _check_zero_mean(grid: PeriodicGrid, u: np.ndarray, tol: float) -> None:
    mu = np.mean(u)
    if abs(mu) * np.sqrt(grid.length) > tol * l2_norm(grid, u):
        raise ZeroModeError(
            f"field mean {mu:.3e} is not negligible; the inverse Tilbert transform is undefined on constants"
        )


def tilbert_inverse(grid: PeriodicGrid, u, h: float, tol: float = ZERO_MEAN_TOL) -> np.ndarray:
    """Inverse on zero-mean fields: symbol ``i coth(h xi)``, zero mode sent to zero."""
    h = _check_depth(h)
    u = check_field(grid, u, allow_complex=True)
    for part in (u.real, u.imag) if np.iscomplexobj(u) else (u,):
        _check_zero_mean(grid, part, tol)
    xi = grid.wavenumbers
    m = np.zeros_like(xi, dtype=complex)
    m[1:-1] = 1j / np.tanh(h * xi[1:-1])
    return _apply(grid, u, m)


def hilbert(grid: PeriodicGrid, u) -> np.ndarray:
    """Infinite-depth limit of :func:`tilbert`, symbol ``-i sgn(xi)``."""
    u = check_field(grid, u, allow_complex=True)
    m = -1j * np.sign(grid.wavenumbers).astype(complex)
    m[-1] = 0.0
    return _apply(grid, u, m)


def derivative_symbol(grid: PeriodicGrid) -> np.ndarray:
    m = 1j * grid.wavenumbers.astype(complex)
    m[-1] = 0.0
    return m


def derivative(grid: PeriodicGrid, u) -> np.ndarray:
    u = check_field(grid, u, allow_complex=True)
    return _apply(grid, u, derivative_symbol(grid))


def antiderivative(grid: PeriodicGrid, u) -> np.ndarray:
    """Zero-mean primitive of ``u - mean(u)``; the mean of ``u`` is discarded."""
    u = check_field(grid, u, allow_complex=True)
    xi = grid.wavenumbers
    m = np.zeros_like(xi, dtype=complex)
    m[1:-1] = 1.0 / (1j * xi[1:-1])
    return _apply(grid, u, m)


def tanh_minus_linear(x):
    """``tanh(x) - x`` without cancellation for small ``|x|``."""
    x = np.asarray(x, dtype=float)
    out = np.tanh(x) - x
    small = np.abs(x) < 0.05
    xs = x[small]
    x2 = xs * xs
    # tanh series through x^11; truncation error < 1e-17 relative for |x| < 0.05
    out[small] = xs * x2 * (-1 / 3 + x2 * (2 / 15 + x2 * (-17 / 315 + x2 * (62 / 2835 + x2 * (-1382 / 155925)))))
    return out


# --- quadrature -------------------------------------------------------------


def integrate(grid: PeriodicGrid, u) -> float:
    """Rectangle rule ``L/n * sum(u)``, exact for band-limited integrands."""
    return grid.dx * np.sum(u, axis=-1)


def inner(grid: PeriodicGrid, u, v) -> float:
    return integrate(grid, np.real(np.conj(u) * v))


def l2_norm(grid: PeriodicGrid, u) -> float:
    return float(np.sqrt(grid.dx * np.sum(np.abs(u) ** 2)))


# --- anti-aliasing ----------------------------------------------------------


def refine(grid: PeriodicGrid, u, factor: int = 2) -> np.ndarray:
    """Trigonometric interpolation onto ``grid.refined(factor)`` (Nyquist mode dropped)."""
    if np.iscomplexobj(u):
        return refine(grid, np.real(u), factor) + 1j * refine(grid, np.imag(u), factor)
    n = grid.n_points
    c = np.fft.rfft(u, axis=-1)
    c[..., -1] = 0.0
    pad = np.zeros(c.shape[:-1] + (n * factor // 2 + 1,), dtype=complex)
    pad[..., : n // 2 + 1] = c
    return np.fft.irfft(pad * factor, n=n * factor, axis=-1)


def coarsen(grid: PeriodicGrid, u_fine, factor: int = 2) -> np.ndarray:
    """Spectral truncation of a field on ``grid.refined(factor)`` back to ``grid``."""
    if np.iscomplexobj(u_fine):
        return coarsen(grid, np.real(u_fine), factor) + 1j * coarsen(grid, np.imag(u_fine), factor)
    n = grid.n_points
    c = np.fft.rfft(u_fine, axis=-1)[..., : n // 2 + 1] / factor
    c[..., -1] = 0.0
    return np.fft.irfft(c, n=n, axis=-1)


def dealiased_product(grid: PeriodicGrid, u, v) -> np.ndarray:
    """Pointwise product evaluated on the 2x grid, truncated back to ``grid``."""
    return coarsen(grid, refine(grid, u) * refine(grid, v))


# --- Littlewood-Paley -------------------------------------------------------


def _smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return a / (a + b)


def lp_bump(xi):
    """Low-pass profile: 1 on ``|xi| <= 1``, 0 on ``|xi| >= 2``."""
    return 1.0 - _smooth_step(np.abs(xi) - 1.0)


def lp_top_block(grid: PeriodicGrid) -> int:
    """Smallest ``K`` with ``2**K >= max grid wavenumber`` (at least 1)."""
    return max(1, int(np.ceil(np.log2(grid.wavenumbers[-1]))))


def lp_symbol(grid: PeriodicGrid, k: int) -> np.ndarray:
    """``k = 0`` gives ``P_{<=0}``; ``k >= 1`` gives ``phi(xi/2^k) - phi(xi/2^(k-1))``."""
    if int(k) != k or k < 0:
        raise ParameterError(f"block index must be a non-negative integer, got {k!r}")
    xi = grid.wavenumbers
    if k == 0:
        return lp_bump(xi)
    return lp_bump(xi / 2.0**k) - lp_bump(xi / 2.0 ** (k - 1))


def lp_project(grid: PeriodicGrid, u, k: int) -> np.ndarray:
    u = check_field(grid, u, allow_complex=True)
    return _apply(grid, u, lp_symbol(grid, k).astype(complex))


def lp_blocks(grid: PeriodicGrid, u) -> list[np.ndarray]:
    """All blocks ``P_{<=0} u, P_1 u, ..., P_K u``; they sum to ``u``."""
    return [lp_project(grid, u, k) for k in range(lp_top_block(grid) + 1)]


def besov_norm(grid: PeriodicGrid, u, s: float) -> float:
    """Discrete ``B^s_{2,1}`` norm for ``s`` in ``{1/2, 3/2}``."""
    if s not in (0.5, 1.5):
        raise ParameterError(f"unsupported Besov index s={s!r}; use 0.5 or 1.5")
    u = check_field(grid, u, allow_complex=True)
    c = np.fft.rfft(u.real) if not np.iscomplexobj(u) else None
    total = 0.0
    for k in range(lp_top_block(grid) + 1):
        if c is not None:
            # Parseval on the rfft layout: interior modes count twice
            b = c * lp_symbol(grid, k)
            w = np.full(b.shape, 2.0)
            w[0] = 1.0
            w[-1] = 1.0
            norm = np.sqrt(grid.length * np.sum(w * np.abs(b) ** 2)) / grid.n_points
        else:
            norm = l2_norm(grid, lp_project(grid, u, k))
        total += (2.0 ** (k * s) if k > 0 else 1.0) * norm
    return float(total)
