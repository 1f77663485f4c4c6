"""Forcing families indexed by the slab length ``T``."""
from __future__ import annotations

from typing import Callable

import numpy as np

from ..cutoffs import build_bump
from ..grid import GridSpec, SpaceTimeField, SpectralField, inverse_transform

__all__ = ["scaled_forcing", "dilated_spectral_forcing"]


def scaled_forcing(grid: GridSpec, xi_base: int = 1, modulation: float = 6.0,
                   inner: float = 0.25, outer: float = 0.75) -> Callable[[float], SpaceTimeField]:
    """``T -> psi(t/T - 1/2) exp(i (xi_base + modulation) t/T) exp(i xi_base x/T)``.

    ``psi`` is a bump, so the profile sits on ``[0, T]`` up to a margin.
    ``xi_base / T`` must be a lattice frequency, i.e. ``xi_base Lx / (2 pi T)``
    an integer.
    """
    psi = build_bump(inner, outer)

    def family(T: float) -> SpaceTimeField:
        k = xi_base * grid.Lx / (2 * np.pi * T)
        if abs(k - round(k)) > 1e-9:
            raise ValueError(f"xi_base/T = {xi_base / T:g} is not a lattice frequency for Lx={grid.Lx:g}")
        if (xi_base / T) > np.abs(grid.xi).max():
            raise ValueError(f"xi_base/T = {xi_base / T:g} exceeds the spatial band")
        phase = lambda t, x: np.exp(1j * ((xi_base + modulation) * t + xi_base * x) / T)
        return SpaceTimeField.from_function(grid, lambda t, *x: psi(t / T - 0.5) * phase(t, x[0]))

    return family


def dilated_spectral_forcing(grid: GridSpec, tau_center: float, xi_center: float,
                             inner: float = 0.2, outer: float = 0.5) -> Callable[[float], SpaceTimeField]:
    """``T -> F_T`` with ``F_T_hat(tau, xi) = b(T tau - tau_center) b(T|xi| - xi_center)``.

    Sampling one smooth profile at the dilated coordinates keeps lattice sums
    close to the scaled continuum integrals as long as the support is resolved.
    """
    b = build_bump(inner, outer)

    def family(T: float) -> SpaceTimeField:
        prof = b(T * grid.tau_mesh() - tau_center) * b(T * grid.xi_abs() - xi_center)
        if np.count_nonzero(np.broadcast_to(prof, grid.shape)) == 0:
            raise ValueError("dilated profile misses every lattice frequency")
        return inverse_transform(SpectralField(grid, np.broadcast_to(prof, grid.shape).astype(complex)))

    return family
