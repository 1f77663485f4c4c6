"""Smooth cutoffs, the temporal weight ``D^gamma`` and the propagator shift identity.

Bumps are built from the classical gluing ``B(r) / (B(r) + B(1 - r))`` with
``B(r) = exp(-1/r)``; they are exactly 1 on the plateau and exactly 0 off the
support, so spectral supports of cut-off fields are sharp on the lattice.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .grid import (
    GridSpec,
    SpaceTimeField,
    SpatialField,
    SpectralField,
    estimate_comparability_constant,
    forward_transform,
    spatial_forward,
    spatial_inverse_st,
)

__all__ = [
    "CutoffProfile",
    "ConsistencyError",
    "build_bump",
    "standard_chi",
    "standard_phi",
    "sample_time_cutoff",
    "slab_cutoff",
    "time_transform",
    "d_gamma_sup",
    "verify_scaling_estimate",
    "modulated_shift_spectrum",
]


class ConsistencyError(RuntimeError):
    """Two independent evaluations of the same quantity disagree."""


def _ramp(r: np.ndarray, derivative: int = 0) -> np.ndarray:
    """Smooth step: 0 for r <= 0, 1 for r >= 1 (and its first two derivatives)."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inside = (r > 0) & (r < 1)
    if derivative == 0:
        out[r >= 1] = 1.0
    ri = r[inside]
    # B(1-r)/B(r) = exp(h) with h = 1/r - 1/(1-r)
    h = 1.0 / ri - 1.0 / (1.0 - ri)
    val = expit(-h)
    if derivative == 0:
        out[inside] = val
        return out
    s = val * (1.0 - val)
    g = 1.0 / ri**2 + 1.0 / (1.0 - ri) ** 2
    if derivative == 1:
        out[inside] = s * g
        return out
    if derivative == 2:
        dg = -2.0 / ri**3 + 2.0 / (1.0 - ri) ** 3
        out[inside] = (1.0 - 2.0 * val) * s * g * g + s * dg
        return out
    raise ValueError("only derivatives up to order 2 are available")


@dataclass(frozen=True)
class CutoffProfile:
    """Even C^inf bump: 1 on ``[-inner, inner]``, 0 outside ``[-outer, outer]``."""

    inner: float
    outer: float

    def __post_init__(self):
        if not (0 < self.inner < self.outer):
            raise ValueError(f"need 0 < inner < outer, got inner={self.inner}, outer={self.outer}")

    def __call__(self, t, derivative: int = 0) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        width = self.outer - self.inner
        r = (self.outer - np.abs(t)) / width
        val = _ramp(r, derivative)
        if derivative == 1:
            val = val * (-np.sign(t) / width)
        elif derivative == 2:
            val = val / width**2
        return val

    def evaluator(self, t) -> np.ndarray:
        return self(t)


def build_bump(inner: float, outer: float) -> CutoffProfile:
    return CutoffProfile(float(inner), float(outer))


def standard_chi() -> CutoffProfile:
    """``chi``: 1 on ``[-2, 2]``, supported in ``[-4, 4]``."""
    return build_bump(2.0, 4.0)


def standard_phi(grid: GridSpec) -> CutoffProfile:
    """``phi``: 1 on ``[-2c, 2c]``, supported in ``[-4c, 4c]``, c from the lattice."""
    c = estimate_comparability_constant(grid)
    return build_bump(2.0 * c, 4.0 * c)


def _check_wrap(extent: float, grid: GridSpec):
    if extent >= grid.Lt / 2:
        raise ValueError(f"cutoff support radius {extent:g} wraps around the time period {grid.Lt:g}")


def sample_time_cutoff(p: CutoffProfile, T: float, grid: GridSpec, derivative: int = 0) -> SpaceTimeField:
    """Samples of ``t -> p(t/T)`` (or its ``derivative``-th t-derivative), constant in x."""
    if T <= 0:
        raise ValueError("T must be positive")
    _check_wrap(p.outer * T, grid)
    vals = p(grid.t / T, derivative) / T**derivative
    return SpaceTimeField(grid, np.broadcast_to(grid._axis_view(vals, 0, 1 + grid.n), grid.shape))


def slab_cutoff(T: float):
    """Callable ``t -> chi_T(t)`` equal to 1 on ``[0, T]`` and supported in ``[-T, 2T]``."""
    p = build_bump(T / 2, 3 * T / 2)
    return lambda t, derivative=0: p(np.asarray(t) - T / 2, derivative)


def time_transform(w: np.ndarray, grid: GridSpec, omega: np.ndarray | None = None) -> np.ndarray:
    """Quadrature ``dt * sum_j w(t_j) exp(-i omega t_j)`` of a time signal.

    ``omega`` defaults to the lattice frequencies (FFT path); arbitrary
    frequencies are summed directly.
    """
    w = np.asarray(w, dtype=complex)
    if omega is None:
        return np.fft.fftshift(np.fft.fft(np.fft.ifftshift(w))) * grid.dt
    omega = np.asarray(omega, dtype=float)
    phase = np.exp(-1j * np.multiply.outer(omega, grid.t))
    return phase @ w * grid.dt


def d_gamma_sup(w: np.ndarray, gamma: float, grid: GridSpec, oversample: int = 1) -> float:
    """``sup_tau |(1 + tau^2)^(gamma/2) w_hat(tau)|`` over the time lattice.

    ``oversample > 1`` refines the frequency lattice by zero padding, which
    only evaluates the same quadrature at more frequencies.
    """
    w = np.asarray(w, dtype=complex)
    if oversample == 1:
        what = time_transform(w, grid)
        tau = grid.tau
    else:
        nt = grid.Nt
        padded = np.zeros(nt * oversample, dtype=complex)
        padded[(nt * oversample - nt) // 2:(nt * oversample + nt) // 2] = w
        what = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(padded))) * grid.dt
        tau = (np.arange(nt * oversample) - nt * oversample // 2) * (2 * np.pi / (grid.Lt * oversample))
    return float(np.max(np.abs((1 + tau**2) ** (gamma / 2) * what)))


def verify_scaling_estimate(p: CutoffProfile, r: float, j: int, T: float, grid: GridSpec,
                            oversample: int = 4) -> tuple[float, float]:
    """Return both sides of ``||F D^r {t^j p(t/T)}||_inf <= T^(1-r+j) ||F D^r (t^j p)||_inf``."""
    if r < 0 or j < 0:
        raise ValueError("need r >= 0 and j >= 0")
    if not 0 < T < 1:
        raise ValueError("need 0 < T < 1")
    _check_wrap(p.outer, grid)
    t = grid.t
    lhs = d_gamma_sup(t**j * p(t / T), r, grid, oversample)
    rhs = T ** (1 - r + j) * d_gamma_sup(t**j * p(t), r, grid, oversample)
    return lhs, rhs


def modulated_shift_spectrum(p: CutoffProfile, rho: float, f: SpatialField, grid: GridSpec,
                             rtol: float = 1e-8) -> SpectralField:
    """Spectrum of ``p(t) exp(i rho t sqrt(-Delta)) f``, cross-checked against
    the closed form ``p_hat(tau - rho|xi|) f_hat(xi)``.

    Raises :class:`ConsistencyError` when the two disagree by more than ``rtol``.
    """
    if not -1 <= rho <= 1:
        raise ValueError("rho must lie in [-1, 1]")
    _check_wrap(p.outer, grid)
    nd = 1 + grid.n
    fhat = spatial_forward(f)
    xi_abs = grid.xi_abs(spatial_only=True)
    t = grid._axis_view(grid.t, 0, nd)
    chi_t = p(t)
    fhat_t = np.expand_dims(fhat, -nd)
    modes = chi_t * np.exp(1j * rho * t * xi_abs[None, ...]) * fhat_t
    field = SpaceTimeField(grid, spatial_inverse_st(modes, grid))
    spec = forward_transform(field)

    # closed form: direct quadrature of p_hat at the shifted, generally off-lattice frequencies
    omega = grid.full(grid.tau_mesh()) - rho * grid.full(grid.xi_abs())
    phat = time_transform(p(grid.t), grid, omega.ravel()).reshape(grid.shape) / grid.dt
    closed = phat * fhat_t / np.sqrt(grid.Nt)
    scale = max(np.abs(closed).max(), np.finfo(float).tiny)
    err = np.abs(spec.coeffs - closed).max() / scale
    if np.abs(closed).max() > 0 and err > rtol:
        raise ConsistencyError(f"shift identity mismatch {err:.3e} > {rtol:g}")
    return spec
