"""Boundary traces of strip-holomorphic functions and the projection onto them.

A complex boundary function ``u`` is *holomorphic* (in the finite-depth sense)
when ``Im u = -T_h Re u``: it is the trace on the top of the strip
``R x (-h, 0)`` of a holomorphic function that is real on the bottom.  This
class is closed under real-linear combinations and products but not under
multiplication by ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spectral as sp
from .spectral import PeriodicGrid


@dataclass(frozen=True)
class HolomorphicBoundaryFunction:
    grid: PeriodicGrid
    re: np.ndarray
    im: np.ndarray
    h: float

    @property
    def value(self) -> np.ndarray:
        return self.re + 1j * self.im

    def defect(self) -> float:
        return holomorphy_defect(self.grid, self.value, self.h)

    def is_holomorphic(self, tol: float = 1e-10) -> bool:
        return self.defect() <= tol * (1.0 + sp.l2_norm(self.grid, self.re))


def make_holomorphic(grid: PeriodicGrid, re, h: float) -> HolomorphicBoundaryFunction:
    """Complete a real field to the holomorphic function ``re - i T_h re``."""
    re = sp.check_field(grid, re)
    return HolomorphicBoundaryFunction(grid, re, -sp.tilbert(grid, re, h), float(h))


def project_Ph(grid: PeriodicGrid, u, h: float, tol: float = sp.ZERO_MEAN_TOL) -> HolomorphicBoundaryFunction:
    """Projection onto holomorphic functions.

    Non-constant modes follow ``P_h u = 1/2 [(1 - i T_h) Re u + i (1 + i T_h^-1) Im u]``.
    The mean of ``Re u`` is passed through unchanged, so real constants are
    fixed and the map is idempotent on the torus.  ``Im u`` must have
    negligible mean, otherwise :class:`~holowave.errors.ZeroModeError` is raised.
    """
    u = sp.check_field(grid, u, allow_complex=True)
    p, q = np.real(u), np.imag(u)
    tinv_q = sp.tilbert_inverse(grid, q, h, tol=tol)
    p_mean = np.mean(p)
    re = 0.5 * (p - p_mean - tinv_q) + p_mean
    im = 0.5 * (q - sp.tilbert(grid, p, h))
    return HolomorphicBoundaryFunction(grid, re, im, float(h))


def im_part_of_projection(grid: PeriodicGrid, u, h: float) -> np.ndarray:
    """``Im(P_h u) = 1/2 [Im u - T_h Re u]``; needs no inverse Tilbert transform."""
    u = sp.check_field(grid, u, allow_complex=True)
    return 0.5 * (np.imag(u) - sp.tilbert(grid, np.real(u), h))


def holomorphy_defect(grid: PeriodicGrid, u, h: float) -> float:
    u = sp.check_field(grid, u, allow_complex=True)
    return sp.l2_norm(grid, np.imag(u) + sp.tilbert(grid, np.real(u), h))


def holomorphic_product(grid: PeriodicGrid, f, g) -> np.ndarray:
    """Anti-aliased pointwise product of two complex boundary functions."""
    return sp.dealiased_product(grid, f, g)


def tilbert_product_defect(grid: PeriodicGrid, u, v, h: float) -> float:
    """L2 norm of ``u T[v] + T[u] v - T[uv - T[u] T[v]]``.

    Every product and transform is taken on the 2x grid, so the identity is
    exact (to rounding) for inputs without Nyquist content.
    """
    u = sp.check_field(grid, u)
    v = sp.check_field(grid, v)
    fine = grid.refined(2)
    uf, vf = sp.refine(grid, u), sp.refine(grid, v)
    tu, tv = sp.tilbert(fine, uf, h), sp.tilbert(fine, vf, h)
    lhs = uf * tv + tu * vf
    rhs = sp.tilbert(fine, uf * vf - tu * tv, h)
    return sp.l2_norm(fine, lhs - rhs)
