"""Periodic space-time lattices, unitary FFTs and Fourier multipliers.

The continuum ``R^{1+n}`` is replaced by the torus ``[-Lt/2, Lt/2) x [-Lx/2, Lx/2)^n``.
Samples and spectra are both stored in *centered* order: sample index ``j``
sits at ``t_j = (j - Nt/2) * dt`` and coefficient index ``k`` at
``tau_k = 2*pi*(k - Nt/2)/Lt`` (the Nyquist row lands on the negative side).
With this layout the forward transform is

    c(tau_k, xi_m) = N**-0.5 * sum_j u(t_j, x_j) exp(-i (tau_k t_j + xi_m . x_j))

with ``N = Nt * Nx**n``, i.e. numpy's ``norm="ortho"`` FFT between
``ifftshift``/``fftshift``. It is unitary, so Plancherel is exact.

Fields may carry leading component axes (vector-valued maps such as the
S^1 wave map); every transform acts on the trailing ``1 + n`` axes only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "GridSpec",
    "SpaceTimeField",
    "SpectralField",
    "SpatialField",
    "MultiplierSymbol",
    "forward_transform",
    "inverse_transform",
    "spatial_forward",
    "spatial_inverse",
    "apply_multiplier",
    "apply_spatial_multiplier",
    "lambda_symbol",
    "lambda_plus_symbol",
    "lambda_minus_symbol",
    "time_derivative",
    "spatial_gradient",
    "laplacian",
    "comparability_constant",
    "estimate_comparability_constant",
]


def _is_pow2(k: int) -> bool:
    return k > 0 and (k & (k - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic lattice in ``(t, x)``.

    Parameters
    ----------
    n : int
        Spatial dimension, 1 or 2.
    Nt, Nx : int
        Points in time and per spatial axis; powers of two, at least 8.
    Lt, Lx : float
        Time and spatial periods. ``Lt >= 16`` so that ``chi(t)``, supported
        in ``[-4, 4]``, never wraps around.
    """

    n: int = 1
    Nt: int = 64
    Nx: int = 64
    Lt: float = 16.0
    Lx: float = 16.0

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"spatial dimension must be 1 or 2, got {self.n}")
        for name in ("Nt", "Nx"):
            val = getattr(self, name)
            if not _is_pow2(int(val)) or val < 8:
                raise ValueError(f"{name} must be a power of two >= 8, got {val}")
        if not self.Lt >= 16.0:
            raise ValueError(f"Lt must be >= 16, got {self.Lt}")
        if not self.Lx > 0:
            raise ValueError(f"Lx must be positive, got {self.Lx}")

    # -- geometry -----------------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return (self.Nt,) + (self.Nx,) * self.n

    @property
    def spatial_shape(self) -> tuple[int, ...]:
        return (self.Nx,) * self.n

    @property
    def size(self) -> int:
        return self.Nt * self.Nx**self.n

    @property
    def dt(self) -> float:
        return self.Lt / self.Nt

    @property
    def dx(self) -> float:
        return self.Lx / self.Nx

    @property
    def dtau(self) -> float:
        return 2 * np.pi / self.Lt

    @property
    def dxi(self) -> float:
        return 2 * np.pi / self.Lx

    @property
    def cell_volume(self) -> float:
        return self.dt * self.dx**self.n

    @property
    def spatial_cell_volume(self) -> float:
        return self.dx**self.n

    @cached_property
    def t(self) -> np.ndarray:
        return (np.arange(self.Nt) - self.Nt // 2) * self.dt

    @cached_property
    def x(self) -> np.ndarray:
        return (np.arange(self.Nx) - self.Nx // 2) * self.dx

    @cached_property
    def tau(self) -> np.ndarray:
        return (np.arange(self.Nt) - self.Nt // 2) * self.dtau

    @cached_property
    def xi(self) -> np.ndarray:
        return (np.arange(self.Nx) - self.Nx // 2) * self.dxi

    @property
    def t_index_zero(self) -> int:
        return self.Nt // 2

    # -- broadcastable meshes -------------------------------------------------
    def _axis_view(self, arr: np.ndarray, axis: int, ndim: int) -> np.ndarray:
        shape = [1] * ndim
        shape[axis] = arr.size
        return arr.reshape(shape)

    def t_mesh(self) -> np.ndarray:
        """``t`` shaped to broadcast against a space-time array."""
        return self._axis_view(self.t, 0, 1 + self.n)

    def x_mesh(self) -> list[np.ndarray]:
        """Spatial coordinates, one broadcastable array per axis (space-time layout)."""
        return [self._axis_view(self.x, 1 + i, 1 + self.n) for i in range(self.n)]

    def tau_mesh(self) -> np.ndarray:
        return self._axis_view(self.tau, 0, 1 + self.n)

    def xi_mesh(self, spatial_only: bool = False) -> list[np.ndarray]:
        """Frequency components; space-time layout unless ``spatial_only``."""
        if spatial_only:
            return [self._axis_view(self.xi, i, self.n) for i in range(self.n)]
        return [self._axis_view(self.xi, 1 + i, 1 + self.n) for i in range(self.n)]

    def xi_abs(self, spatial_only: bool = False) -> np.ndarray:
        comps = self.xi_mesh(spatial_only)
        return np.sqrt(sum(c**2 for c in comps))

    def full(self, arr: np.ndarray) -> np.ndarray:
        """Broadcast a mesh to the full space-time shape."""
        return np.broadcast_to(arr, self.shape)


def _st_axes(grid: GridSpec) -> tuple[int, ...]:
    return tuple(range(-(1 + grid.n), 0))


def _sp_axes(grid: GridSpec) -> tuple[int, ...]:
    return tuple(range(-grid.n, 0))


def _check_trailing(samples: np.ndarray, shape: tuple[int, ...], what: str):
    if samples.shape[samples.ndim - len(shape):] != shape or samples.ndim < len(shape):
        raise ValueError(f"{what}: trailing shape {samples.shape} does not match grid {shape}")


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Complex samples on the space-time lattice (possibly with leading component axes)."""

    grid: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=complex)
        _check_trailing(arr, self.grid.shape, "SpaceTimeField")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def components(self) -> tuple[int, ...]:
        return self.samples.shape[: self.samples.ndim - 1 - self.grid.n]

    def _same(self, other: "SpaceTimeField"):
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")

    def __add__(self, other):
        if isinstance(other, SpaceTimeField):
            self._same(other)
            return SpaceTimeField(self.grid, self.samples + other.samples)
        return SpaceTimeField(self.grid, self.samples + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, SpaceTimeField):
            self._same(other)
            return SpaceTimeField(self.grid, self.samples - other.samples)
        return SpaceTimeField(self.grid, self.samples - other)

    def __neg__(self):
        return SpaceTimeField(self.grid, -self.samples)

    def __mul__(self, other):
        if isinstance(other, SpaceTimeField):
            self._same(other)
            return SpaceTimeField(self.grid, self.samples * other.samples)
        return SpaceTimeField(self.grid, self.samples * other)

    __rmul__ = __mul__

    @classmethod
    def zeros(cls, grid: GridSpec, components: tuple[int, ...] = ()) -> "SpaceTimeField":
        return cls(grid, np.zeros(components + grid.shape, dtype=complex))

    @classmethod
    def from_function(cls, grid: GridSpec, fn: Callable) -> "SpaceTimeField":
        """Sample ``fn(t, *x)`` on the lattice."""
        vals = fn(grid.t_mesh(), *grid.x_mesh())
        return cls(grid, np.broadcast_to(vals, grid.shape).copy())

    def time_slice(self, index: int) -> "SpatialField":
        return SpatialField(self.grid, self.samples[..., index, :] if self.grid.n == 1
                            else self.samples[..., index, :, :])

    def l2(self) -> float:
        """Plain (unweighted) l2 norm of the samples."""
        return float(np.linalg.norm(self.samples.ravel()))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Unitary DFT coefficients on the ``(tau, xi)`` lattice, centered order."""

    grid: GridSpec
    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=complex)
        _check_trailing(arr, self.grid.shape, "SpectralField")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def continuum(self) -> np.ndarray:
        """Coefficients rescaled to approximate the continuum transform
        ``int u exp(-i(t tau + x.xi)) dt dx``."""
        return self.coeffs * (self.grid.cell_volume * np.sqrt(self.grid.size))

    def l2(self) -> float:
        return float(np.linalg.norm(self.coeffs.ravel()))


@dataclass(frozen=True, eq=False)
class SpatialField:
    """Complex samples on the spatial lattice only (data ``f``, ``g``, ``f_j``...)."""

    grid: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=complex)
        _check_trailing(arr, self.grid.spatial_shape, "SpatialField")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def components(self) -> tuple[int, ...]:
        return self.samples.shape[: self.samples.ndim - self.grid.n]

    def __add__(self, other):
        if isinstance(other, SpatialField):
            return SpatialField(self.grid, self.samples + other.samples)
        return SpatialField(self.grid, self.samples + other)

    def __sub__(self, other):
        if isinstance(other, SpatialField):
            return SpatialField(self.grid, self.samples - other.samples)
        return SpatialField(self.grid, self.samples - other)

    def __mul__(self, other):
        return SpatialField(self.grid, self.samples * other)

    __rmul__ = __mul__

    @classmethod
    def zeros(cls, grid: GridSpec, components: tuple[int, ...] = ()) -> "SpatialField":
        return cls(grid, np.zeros(components + grid.spatial_shape, dtype=complex))

    @classmethod
    def from_function(cls, grid: GridSpec, fn: Callable) -> "SpatialField":
        mesh = [grid._axis_view(grid.x, i, grid.n) for i in range(grid.n)]
        vals = fn(*mesh)
        return cls(grid, np.broadcast_to(vals, grid.spatial_shape).copy())


# -- transforms ----------------------------------------------------------------

def _fwd(arr: np.ndarray, axes) -> np.ndarray:
    return np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(arr, axes=axes), axes=axes, norm="ortho"),
                           axes=axes)


def _inv(arr: np.ndarray, axes) -> np.ndarray:
    return np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(arr, axes=axes), axes=axes, norm="ortho"),
                           axes=axes)


def forward_transform(field: SpaceTimeField) -> SpectralField:
    return SpectralField(field.grid, _fwd(field.samples, _st_axes(field.grid)))


def inverse_transform(spec: SpectralField) -> SpaceTimeField:
    return SpaceTimeField(spec.grid, _inv(spec.coeffs, _st_axes(spec.grid)))


def spatial_forward(f: SpatialField) -> np.ndarray:
    """Unitary spatial DFT of a :class:`SpatialField` (centered order)."""
    return _fwd(f.samples, _sp_axes(f.grid))


def spatial_inverse(grid: GridSpec, coeffs: np.ndarray) -> SpatialField:
    return SpatialField(grid, _inv(coeffs, _sp_axes(grid)))


def spatial_forward_st(arr: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Spatial-only unitary DFT of a space-time sample array (time axis untouched)."""
    return _fwd(arr, _sp_axes(grid))


def spatial_inverse_st(arr: np.ndarray, grid: GridSpec) -> np.ndarray:
    return _inv(arr, _sp_axes(grid))


def time_coefficients(arr: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Coefficients ``a_k`` of the time trigonometric interpolant,
    ``u(t_j) = sum_k a_k exp(i tau_k t_j)``, along the time axis."""
    ax = -(1 + grid.n)
    return np.fft.fftshift(np.fft.fft(np.fft.ifftshift(arr, axes=ax), axis=ax), axes=ax) / grid.Nt


def time_trig_sum(coefs: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Evaluate ``sum_k coefs_k exp(i tau_k t_j)`` at the lattice times."""
    ax = -(1 + grid.n)
    return np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(coefs, axes=ax), axis=ax), axes=ax) * grid.Nt


# -- multiplier symbols ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MultiplierSymbol:
    """Real, nonnegative Fourier symbol ``m(tau, xi)``.

    ``evaluator(tau, xi)`` receives ``tau`` and a list of ``n`` frequency
    component arrays, all mutually broadcastable.
    """

    evaluator: Callable[[np.ndarray, Sequence[np.ndarray]], np.ndarray]
    description: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __call__(self, tau, xi) -> np.ndarray:
        xi_list = [np.asarray(c, dtype=float) for c in (xi if isinstance(xi, (list, tuple)) else [xi])]
        return np.asarray(self.evaluator(np.asarray(tau, dtype=float), xi_list), dtype=float)

    def on_grid(self, grid: GridSpec) -> np.ndarray:
        """Symbol sampled on the full space-time lattice (cached per grid)."""
        if grid not in self._cache:
            vals = np.broadcast_to(self(grid.tau_mesh(), grid.xi_mesh()), grid.shape).copy()
            if not np.all(np.isfinite(vals)) or np.any(vals < 0):
                raise ValueError(f"symbol {self.description!r} is not finite and nonnegative on the lattice")
            vals.setflags(write=False)
            self._cache[grid] = vals
        return self._cache[grid]

    def on_spatial_grid(self, grid: GridSpec) -> np.ndarray:
        key = ("spatial", grid)
        if key not in self._cache:
            vals = np.broadcast_to(self(0.0, grid.xi_mesh(spatial_only=True)), grid.spatial_shape).copy()
            vals.setflags(write=False)
            self._cache[key] = vals
        return self._cache[key]

    def __mul__(self, other: "MultiplierSymbol") -> "MultiplierSymbol":
        a, b = self.evaluator, other.evaluator
        return MultiplierSymbol(lambda tau, xi: a(tau, xi) * b(tau, xi),
                                f"({self.description})*({other.description})")


def _xi2(xi: Sequence[np.ndarray]) -> np.ndarray:
    return sum(c**2 for c in xi)


@lru_cache(maxsize=256)
def lambda_symbol(alpha: float) -> MultiplierSymbol:
    """``(1 + |xi|^2)^(alpha/2)``, independent of ``tau``."""
    return MultiplierSymbol(lambda tau, xi: (1.0 + _xi2(xi)) ** (alpha / 2) + 0.0 * tau,
                            f"Lambda^{alpha:g}")


@lru_cache(maxsize=256)
def lambda_plus_symbol(alpha: float) -> MultiplierSymbol:
    """``(1 + tau^2 + |xi|^2)^(alpha/2)``."""
    return MultiplierSymbol(lambda tau, xi: (1.0 + tau**2 + _xi2(xi)) ** (alpha / 2),
                            f"Lambda_+^{alpha:g}")


def _lambda_minus_base(tau, xi2):
    return 1.0 + (tau**2 - xi2) ** 2 / (1.0 + tau**2 + xi2)


@lru_cache(maxsize=256)
def lambda_minus_symbol(alpha: float) -> MultiplierSymbol:
    """``(1 + (tau^2 - |xi|^2)^2 / (1 + tau^2 + |xi|^2))^(alpha/2)``; equals 1 on the cone."""
    return MultiplierSymbol(lambda tau, xi: _lambda_minus_base(tau, _xi2(xi)) ** (alpha / 2),
                            f"Lambda_-^{alpha:g}")


def apply_multiplier(u: SpaceTimeField, m: MultiplierSymbol | np.ndarray) -> SpaceTimeField:
    vals = m.on_grid(u.grid) if isinstance(m, MultiplierSymbol) else m
    return inverse_transform(SpectralField(u.grid, forward_transform(u).coeffs * vals))


def apply_spatial_multiplier(f: SpatialField, m: MultiplierSymbol | np.ndarray) -> SpatialField:
    vals = m.on_spatial_grid(f.grid) if isinstance(m, MultiplierSymbol) else m
    return spatial_inverse(f.grid, spatial_forward(f) * vals)


# -- spectral derivatives ---------------------------------------------------------

def _odd_nyquist_mask(freqs: np.ndarray, order: int) -> np.ndarray:
    # the Nyquist row has no conjugate partner; odd derivatives drop it to keep real fields real
    if order % 2 == 1:
        freqs = freqs.copy()
        freqs[0] = 0.0
    return freqs


def time_derivative(u: SpaceTimeField, order: int = 1) -> SpaceTimeField:
    grid = u.grid
    tau = grid._axis_view(_odd_nyquist_mask(grid.tau, order), 0, 1 + grid.n)
    return apply_multiplier(u, (1j * tau) ** order)


def spatial_gradient(u: SpaceTimeField) -> list[SpaceTimeField]:
    grid = u.grid
    xi = _odd_nyquist_mask(grid.xi, 1)
    return [apply_multiplier(u, 1j * grid._axis_view(xi, 1 + i, 1 + grid.n)) for i in range(grid.n)]


def laplacian(u: SpaceTimeField) -> SpaceTimeField:
    return apply_multiplier(u, -grid_xi2(u.grid))


def grid_xi2(grid: GridSpec) -> np.ndarray:
    return _xi2(grid.xi_mesh())


# -- symbol comparability --------------------------------------------------------

def comparability_constant(tau: np.ndarray, xi_abs: np.ndarray) -> float:
    """Smallest ``c >= 1`` with ``c^-1 (1+w) <= Lambda_-^1 <= c (1+w)`` at the given points,
    where ``w = ||tau| - |xi||``."""
    tau = np.asarray(tau, dtype=float)
    xi_abs = np.asarray(xi_abs, dtype=float)
    sym = np.sqrt(_lambda_minus_base(tau, xi_abs**2))
    weight = 1.0 + np.abs(np.abs(tau) - xi_abs)
    ratio = sym / weight
    return float(max(1.0, ratio.max(), (1.0 / ratio).max()))


@lru_cache(maxsize=64)
def estimate_comparability_constant(grid: GridSpec) -> float:
    """Exhaustive lattice maximum of the two-sided ratio between the
    modulation symbol and ``1 + ||tau| - |xi||``."""
    tau = grid.full(grid.tau_mesh())
    return comparability_constant(tau, grid.full(grid.xi_abs()))
