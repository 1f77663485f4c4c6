"""Deterministic band-limited random fields.

The stream is Philox-4x64 keyed by the 64-bit seed with a zero counter
(numpy's ``Philox(key=seed)``). Raw 64-bit words become uniforms as
``(w >> 11) * 2**-53`` and pairs of uniforms become normals by Box-Muller,
so the samples depend only on the Philox word stream, not on numpy's
normal sampler. Coefficients are filled in C order over the centered
spectral lattice, real part then imaginary part per coefficient.
"""
from __future__ import annotations

import numpy as np

from .grid import (
    GridSpec,
    SpaceTimeField,
    SpatialField,
    SpectralField,
    inverse_transform,
    spatial_inverse,
)

__all__ = ["philox_normals", "random_spacetime_field", "random_spatial_field"]

_U64 = (1 << 64) - 1


def philox_normals(seed: int, count: int, stream: int = 0) -> np.ndarray:
    """``count`` standard normals from the Philox stream keyed by ``(seed, stream)``."""
    if not 0 <= seed <= _U64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    bitgen = np.random.Philox(key=np.array([seed, stream], dtype=np.uint64))
    m = (count + 1) // 2
    raw = bitgen.random_raw(2 * m).astype(np.uint64)
    u = (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53
    u1, u2 = u[0::2], u[1::2]
    r = np.sqrt(-2.0 * np.log1p(-u1))  # 1 - u1 lies in (0, 1]
    z = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])
    # interleave so the first `count` values do not depend on `count`
    out = np.empty(2 * m)
    out[0::2], out[1::2] = z[:m], z[m:]
    return out[:count]


def _complex_gaussian(seed: int, shape: tuple[int, ...], stream: int) -> np.ndarray:
    z = philox_normals(seed, 2 * int(np.prod(shape)), stream)
    return (z[0::2] + 1j * z[1::2]).reshape(shape) / np.sqrt(2)


def random_spacetime_field(grid: GridSpec, seed: int, tau_max: float = 4.0, xi_max: float = 4.0,
                           decay: float = 2.0, amplitude: float = 1.0, real: bool = False,
                           components: tuple[int, ...] = (), stream: int = 0) -> SpaceTimeField:
    """Complex Gaussian spectrum with ``|c| ~ (1 + tau^2 + |xi|^2)^-decay`` on
    ``|tau| <= tau_max``, ``|xi| <= xi_max``; normalized to unit max modulus times ``amplitude``."""
    tau = grid.tau_mesh()
    xi = grid.xi_abs()
    envelope = (1.0 + tau**2 + xi**2) ** (-decay) * ((np.abs(tau) <= tau_max) & (xi <= xi_max))
    coeffs = _complex_gaussian(seed, components + grid.shape, stream) * envelope
    samples = inverse_transform(SpectralField(grid, coeffs)).samples
    if real:
        samples = samples.real
    peak = np.abs(samples).max()
    if peak == 0:
        raise ValueError("band limits leave no lattice frequencies")
    return SpaceTimeField(grid, amplitude * samples / peak)


def random_spatial_field(grid: GridSpec, seed: int, xi_max: float = 4.0, decay: float = 2.0,
                         amplitude: float = 1.0, real: bool = True,
                         components: tuple[int, ...] = (), stream: int = 0) -> SpatialField:
    """Spatial analogue of :func:`random_spacetime_field`."""
    xi = grid.xi_abs(spatial_only=True)
    envelope = (1.0 + xi**2) ** (-decay) * (xi <= xi_max)
    coeffs = _complex_gaussian(seed, components + grid.spatial_shape, stream) * envelope
    samples = spatial_inverse(grid, coeffs).samples
    if real:
        samples = samples.real
    peak = np.abs(samples).max()
    if peak == 0:
        raise ValueError("band limits leave no lattice frequencies")
    return SpatialField(grid, amplitude * samples / peak)
