"""Sobolev, wave-Sobolev and restriction norms as lattice quadratures.

Every L^2 sum carries the cell volume, so values approximate the continuum
integrals and are comparable across grids. Spectral-side functionals use the
continuum-scaled transform :meth:`SpectralField.continuum`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .cutoffs import slab_cutoff
from .grid import (
    GridSpec,
    SpaceTimeField,
    SpatialField,
    forward_transform,
    lambda_minus_symbol,
    lambda_plus_symbol,
    lambda_symbol,
    spatial_forward,
)

__all__ = [
    "NormParams",
    "hs_norm",
    "hstheta_norm",
    "calligraphic_norm",
    "calligraphic_forms",
    "CalligraphicForms",
    "mixed_linf_norm",
    "data_norm",
    "restriction_norm_upper",
    "slab_restrict",
]


@dataclass(frozen=True)
class NormParams:
    """Regularity ``s``, modulation exponent ``theta`` and the exponent ``gamma``
    of the ``L^2_xi L^inf_tau`` bound.

    With ``strict=True`` the standing assumptions ``theta > 1/2`` and
    ``gamma < 2`` are enforced.
    """

    s: float = 1.0
    theta: float = 0.6
    gamma: float = 1.0
    strict: bool = False

    def __post_init__(self):
        if self.strict:
            if not self.theta > 0.5:
                raise ValueError(f"theta must exceed 1/2, got {self.theta}")
            if not self.gamma < 2:
                raise ValueError(f"gamma must be below 2, got {self.gamma}")


def _weighted_l2(coeffs: np.ndarray, weight: np.ndarray, volume: float) -> float:
    return float(np.sqrt(volume * np.sum(np.abs(weight * coeffs) ** 2)))


def hs_norm(f: SpatialField, s: float) -> float:
    """``||Lambda^s f||_{L^2}`` on the spatial lattice."""
    w = lambda_symbol(s).on_spatial_grid(f.grid)
    return _weighted_l2(spatial_forward(f), w, f.grid.spatial_cell_volume)


def hstheta_norm(u: SpaceTimeField, s: float, theta: float) -> float:
    """``||Lambda^s Lambda_-^theta u||_{L^2}`` on the space-time lattice."""
    grid = u.grid
    w = (lambda_symbol(s) * lambda_minus_symbol(theta)).on_grid(grid)
    return _weighted_l2(forward_transform(u).coeffs, w, grid.cell_volume)


class CalligraphicForms(NamedTuple):
    sum_form: float
    single_form: float


def calligraphic_forms(u: SpaceTimeField, s: float, theta: float) -> CalligraphicForms:
    """Both expressions for the ``H^{s,theta}``-plus-time-derivative norm:
    ``||u||_{s,theta} + ||d_t u||_{s-1,theta}`` and ``||Lambda^{s-1} Lambda_+ Lambda_-^theta u||``."""
    grid = u.grid
    coeffs = forward_transform(u).coeffs
    base = lambda_minus_symbol(theta).on_grid(grid)
    w0 = lambda_symbol(s).on_grid(grid) * base
    w1 = lambda_symbol(s - 1).on_grid(grid) * base * np.abs(grid.tau_mesh())
    vol = grid.cell_volume
    sum_form = _weighted_l2(coeffs, w0, vol) + _weighted_l2(coeffs, w1, vol)
    single = (lambda_symbol(s - 1) * lambda_plus_symbol(1) * lambda_minus_symbol(theta)).on_grid(grid)
    return CalligraphicForms(sum_form, _weighted_l2(coeffs, single, vol))


def calligraphic_norm(u: SpaceTimeField, s: float, theta: float) -> float:
    """``||u||_{H^{s,theta}} + ||d_t u||_{H^{s-1,theta}}`` with ``d_t`` spectral."""
    return calligraphic_forms(u, s, theta).sum_form


def mixed_linf_norm(u: SpaceTimeField, s: float, gamma: float) -> float:
    """``( sum_xi max_tau |F Lambda^{s-1} Lambda_+ Lambda_-^gamma u|^2 dxi^n )^(1/2)``."""
    grid = u.grid
    sym = (lambda_symbol(s - 1) * lambda_plus_symbol(1) * lambda_minus_symbol(gamma)).on_grid(grid)
    vals = np.abs(sym * forward_transform(u).continuum())
    tau_axis = vals.ndim - 1 - grid.n
    sup_tau = vals.max(axis=tau_axis)
    return float(np.sqrt(np.sum(sup_tau**2) * grid.dxi**grid.n))


def data_norm(f: SpatialField, g: SpatialField, s: float) -> float:
    return hs_norm(f, s) + hs_norm(g, s - 1)


def slab_restrict(u: SpaceTimeField, T: float) -> SpaceTimeField:
    """``chi_T(t) u`` with ``chi_T = 1`` on ``[0, T]`` and support in ``[-T, 2T]``."""
    grid = u.grid
    if not 0 < T < grid.Lt / 4:
        raise ValueError(f"need 0 < T < Lt/4 = {grid.Lt / 4:g}, got {T}")
    chi = slab_cutoff(T)(grid.t)
    return u * grid._axis_view(chi, 0, 1 + grid.n)


def restriction_norm_upper(u: SpaceTimeField, T: float,
                           normfn: Callable[[SpaceTimeField], float]) -> float:
    """Upper bound for the ``[0, T]`` restriction norm: the norm of the single
    admissible extension ``chi_T u``. Not the infimum."""
    return normfn(slab_restrict(u, T))
