"""Solution operator for ``box u = F`` with ``box = -d_t^2 + Delta``.

The forcing is split by modulation, ``F = phi(T^a Lambda_-) F + (I - phi(T^a Lambda_-)) F``,
and the solution is assembled from three pieces: the free wave ``u0`` carrying
the data, the Duhamel integral ``u1`` of the near-cone forcing, and the
symbol inversion ``u2`` of the far-cone forcing.

All time dependence is handled mode by mode in closed form. Duhamel's
integral is taken exactly over the trigonometric interpolant of ``F1`` on the
time lattice, so every piece (and its first two time derivatives) is exact at
the lattice times and residuals measure only rounding.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .cutoffs import standard_chi, standard_phi, time_transform
from .fitting import SlopeFit, fit_slope
from .grid import (
    GridSpec,
    SpaceTimeField,
    SpatialField,
    SpectralField,
    estimate_comparability_constant,
    forward_transform,
    grid_xi2,
    inverse_transform,
    lambda_minus_symbol,
    lambda_symbol,
    spatial_forward,
    spatial_forward_st,
    spatial_inverse,
    spatial_inverse_st,
    time_coefficients,
    time_trig_sum,
)
from .norms import NormParams, calligraphic_norm, hs_norm, hstheta_norm, restriction_norm_upper

__all__ = [
    "SplitResult",
    "SolutionBundle",
    "U1SeriesReport",
    "GainMeasurement",
    "split_inhomogeneity",
    "support_violations",
    "split_frequency",
    "homogeneous_solution",
    "duhamel_u1",
    "invert_wave_symbol",
    "assemble",
    "inhomogeneous_solution",
    "compute_gj",
    "compute_fj",
    "verify_u1_series",
    "gain_exponent",
    "delta_exponent",
    "measure_inhomogeneous_gain",
]


def _modulation(grid: GridSpec) -> np.ndarray:
    return np.abs(np.abs(grid.tau_mesh()) - grid.xi_abs())


def _wave_symbol(grid: GridSpec) -> np.ndarray:
    """``tau^2 - |xi|^2``, the symbol of ``box`` for the ``exp(i(t tau + x.xi))`` convention."""
    return grid.tau_mesh() ** 2 - grid_xi2(grid)


def _check_T_alpha(T: float, alpha: float):
    if not 0 < T < 1:
        raise ValueError(f"need 0 < T < 1, got {T}")
    if not 0 <= alpha <= 1:
        raise ValueError(f"need 0 <= alpha <= 1, got {alpha}")


# -- splitting ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SplitResult:
    F1: SpaceTimeField
    F2: SpaceTimeField
    T: float
    alpha: float
    c: float


def split_inhomogeneity(F: SpaceTimeField, T: float, alpha: float) -> SplitResult:
    """Near-cone / far-cone split of ``F`` through the multiplier ``phi(T^alpha Lambda_-)``."""
    _check_T_alpha(T, alpha)
    grid = F.grid
    c = estimate_comparability_constant(grid)
    phi = standard_phi(grid)
    weight = phi(T**alpha * lambda_minus_symbol(1.0).on_grid(grid))
    Fhat = forward_transform(F).coeffs
    F1 = inverse_transform(SpectralField(grid, weight * Fhat))
    F2 = inverse_transform(SpectralField(grid, (1.0 - weight) * Fhat))
    return SplitResult(F1, F2, T, alpha, c)


def support_violations(split: SplitResult) -> tuple[int, int]:
    """Count nonzero coefficients of ``F1`` with modulation above ``4 c^2 T^-alpha``
    and of ``F2`` with modulation below ``T^-alpha``."""
    grid = split.F1.grid
    mod = np.broadcast_to(_modulation(grid), grid.shape)
    scale = split.T ** (-split.alpha)
    # rebuild the exact spectral weights instead of re-transforming, so zeros stay exact
    weight = standard_phi(grid)(split.T**split.alpha * lambda_minus_symbol(1.0).on_grid(grid))
    F1hat = forward_transform(split.F1).coeffs
    F2hat = forward_transform(split.F2).coeffs
    nz1 = (weight > 0) & np.any(np.abs(F1hat) > 0, axis=tuple(range(F1hat.ndim - grid.n - 1)))
    nz2 = (weight < 1) & np.any(np.abs(F2hat) > 0, axis=tuple(range(F2hat.ndim - grid.n - 1)))
    bad1 = int(np.count_nonzero(nz1 & (mod > 4 * split.c**2 * scale)))
    bad2 = int(np.count_nonzero(nz2 & (mod < scale)))
    return bad1, bad2


def split_frequency(F1: SpaceTimeField, T: float, alpha: float) -> tuple[SpaceTimeField, SpaceTimeField]:
    """Sharp spatial-frequency split of ``F1`` at ``|xi| = T^-alpha`` into ``(F11, F12)``."""
    grid = F1.grid
    low = grid.xi_abs(spatial_only=True) <= T ** (-alpha)
    coeffs = spatial_forward_st(F1.samples, grid)
    F11 = SpaceTimeField(grid, spatial_inverse_st(coeffs * low, grid))
    F12 = SpaceTimeField(grid, spatial_inverse_st(coeffs * ~low, grid))
    return F11, F12


# -- the three pieces --------------------------------------------------------------

def _sinc_t(t: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """``sin(t|xi|)/|xi|`` with the ``xi -> 0`` limit ``t``."""
    return t * np.sinc(t * xi / np.pi)


def _free_modes(fhat: np.ndarray, ghat: np.ndarray, grid: GridSpec, derivative: int) -> np.ndarray:
    t = grid.t_mesh()
    xi = grid.xi_abs()
    fh = np.expand_dims(fhat, -(1 + grid.n))
    gh = np.expand_dims(ghat, -(1 + grid.n))
    cos, S = np.cos(t * xi), _sinc_t(t, xi)
    if derivative == 0:
        return cos * fh + S * gh
    if derivative == 1:
        return -(xi**2) * S * fh + cos * gh
    if derivative == 2:
        return -(xi**2) * (cos * fh + S * gh)
    raise ValueError("derivative order must be 0, 1 or 2")


def homogeneous_solution(f: SpatialField, g: SpatialField, grid: GridSpec | None = None,
                         derivative: int = 0) -> SpaceTimeField:
    """Free wave ``cos(t sqrt(-Delta)) f + sin(t sqrt(-Delta))/sqrt(-Delta) g``
    (or its ``derivative``-th time derivative) at the lattice times."""
    grid = grid or f.grid
    modes = _free_modes(spatial_forward(f), spatial_forward(g), grid, derivative)
    return SpaceTimeField(grid, spatial_inverse_st(modes, grid))


def _duhamel_modes(a: np.ndarray, grid: GridSpec, derivative: int) -> np.ndarray:
    """Per-mode ``-int_0^t W(t-s) F(s) ds`` for ``F(t) = sum_k a_k exp(i tau_k t)``.

    Non-resonant modes use ``[e^{i tau t} - cos(|xi| t) - i tau sin(|xi| t)/|xi|] / (tau^2 - xi^2)``;
    modes on the cone use the secular solution ``(i / 2 tau) [t e^{i tau t} - sin(|xi| t)/|xi|]``.
    """
    if derivative not in (0, 1, 2):
        raise ValueError("derivative order must be 0, 1 or 2")
    tax = -(1 + grid.n)
    tau = grid.tau_mesh()
    xi = grid.xi_abs()
    t = grid.t_mesh()
    D = tau**2 - xi**2
    resonant = np.abs(D) <= 1e-9 * (1.0 + tau**2)
    resonant = np.broadcast_to(resonant, grid.shape)
    Dsafe = np.where(resonant, 1.0, D)
    cos, S = np.cos(t * xi), _sinc_t(t, xi)
    cos_d = (cos, -(xi**2) * S, -(xi**2) * cos)[derivative]
    S_d = (S, cos, -(xi**2) * S)[derivative]

    b = np.where(resonant, 0.0, a / Dsafe)
    out = time_trig_sum(b * (1j * tau) ** derivative, grid)
    C0 = np.expand_dims(b.sum(axis=tax), tax)
    C1 = np.expand_dims((1j * tau * b).sum(axis=tax), tax)
    out = out - C0 * cos_d - C1 * S_d

    on_cone = resonant & np.broadcast_to(xi > 0, grid.shape)
    if np.any(on_cone):
        tau_safe = np.where(tau == 0, 1.0, tau)
        r = np.where(on_cone, a * (1j / (2 * tau_safe)), 0.0)
        Q = [time_trig_sum(r * (1j * tau) ** d, grid) for d in range(derivative + 1)]
        tQ = (t * Q[0], Q[0] + t * Q[1] if derivative >= 1 else None,
              2 * Q[1] + t * Q[2] if derivative == 2 else None)[derivative]
        R = np.expand_dims(r.sum(axis=tax), tax)
        out = out + tQ - R * S_d

    origin = resonant & np.broadcast_to(xi == 0, grid.shape)
    if np.any(origin):
        a0 = np.expand_dims(np.where(origin, a, 0.0).sum(axis=tax), tax)
        poly = (-(t**2) / 2, -t, -np.ones_like(t))[derivative]
        out = out + poly * a0
    return out


def duhamel_u1(F1: SpaceTimeField, derivative: int = 0) -> SpaceTimeField:
    """``u1 = -int_0^t W(t - t') F1(t') dt'`` at the lattice times (or a time derivative)."""
    grid = F1.grid
    a = time_coefficients(spatial_forward_st(F1.samples, grid), grid)
    return SpaceTimeField(grid, spatial_inverse_st(_duhamel_modes(a, grid, derivative), grid))


def invert_wave_symbol(F2: SpaceTimeField, floor: float, derivative: int = 0) -> SpaceTimeField:
    """``u2_hat = F2_hat / (tau^2 - |xi|^2)``; raises if ``F2`` has energy where the
    symbol is below ``floor`` (which means the split is broken)."""
    grid = F2.grid
    D = np.broadcast_to(_wave_symbol(grid), grid.shape)
    coeffs = forward_transform(F2).coeffs
    small = np.abs(D) < floor
    scale = np.abs(coeffs).max() if coeffs.size else 0.0
    if scale > 0 and np.any(np.abs(coeffs[..., small]) > 1e-13 * scale):
        raise ValueError(f"far-cone forcing has energy where |tau^2 - xi^2| < {floor:g}")
    out = np.where(small, 0.0, coeffs / np.where(small, 1.0, D))
    if derivative:
        out = out * (1j * grid.tau_mesh()) ** derivative
    return inverse_transform(SpectralField(grid, out))


# -- assembly -----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SolutionBundle:
    """``u = chi(t) (u0 - w2) + chi(t/T) u1 + u2``.

    ``w2`` is the free wave carrying ``(u2, d_t u2)(0)``; it is zero when the
    data correction is switched off, giving the bare three-piece combination.
    """

    u0: SpaceTimeField
    u1: SpaceTimeField
    u2: SpaceTimeField
    w2: SpaceTimeField
    u: SpaceTimeField
    T: float
    alpha: float
    split: SplitResult
    f: SpatialField
    g: SpatialField
    F: SpaceTimeField
    w2_data: tuple[SpatialField, SpatialField]
    floor: float
    _cache: dict = field(default_factory=dict, repr=False)

    def _piece_derivative(self, name: str, d: int) -> SpaceTimeField:
        key = (name, d)
        if key not in self._cache:
            grid = self.u.grid
            if name == "u0":
                val = homogeneous_solution(self.f, self.g, grid, d)
            elif name == "w2":
                val = homogeneous_solution(*self.w2_data, grid, d)
            elif name == "u1":
                val = duhamel_u1(self.split.F1, d)
            else:
                val = invert_wave_symbol(self.split.F2, self.floor, d)
            self._cache[key] = val
        return self._cache[key]

    def time_derivative(self, order: int) -> SpaceTimeField:
        """Exact ``d_t^order u`` at the lattice times, via the product rule on each piece."""
        grid = self.u.grid
        chi = standard_chi()
        nd = 1 + grid.n
        t = grid.t

        def cut(scale, k):
            return grid._axis_view(chi(t / scale, k) / scale**k, 0, nd)

        binom = {0: (1,), 1: (1, 1), 2: (1, 2, 1)}[order]
        total = self._piece_derivative("u2", order).samples.copy()
        for scale, names in ((1.0, ("u0", "w2")), (self.T, ("u1",))):
            for k, coef in enumerate(binom):
                c = cut(scale, k)
                if not np.any(c):
                    continue
                for name in names:
                    sign = -1.0 if name == "w2" else 1.0
                    total = total + sign * coef * c * self._piece_derivative(name, order - k).samples
        return SpaceTimeField(grid, total)

    def wave_residual(self) -> SpaceTimeField:
        """``box u - F`` at every lattice point, ``box = -d_t^2 + Delta``."""
        grid = self.u.grid
        utt = self.time_derivative(2)
        lap = spatial_inverse_st(-grid_xi2(grid) * spatial_forward_st(self.u.samples, grid), grid)
        return SpaceTimeField(grid, -utt.samples + lap - self.F.samples)

    def slab_mask(self, margin: int = 0) -> np.ndarray:
        """Lattice times in ``[margin dt, T - margin dt]``."""
        t = self.u.grid.t
        dt = self.u.grid.dt
        mask = (t >= margin * dt - 1e-12) & (t <= self.T - margin * dt + 1e-12)
        if not np.any(mask):
            raise ValueError(f"no lattice times inside the slab for T={self.T:g}, dt={dt:g}")
        return mask

    def slab_residual(self, margin: int = 0) -> float:
        """``||box u - F||_2 / ||F||_2`` over the lattice times of ``[0, T]``."""
        m = self.slab_mask(margin)
        sl = (Ellipsis, m) + (slice(None),) * self.u.grid.n
        res = self.wave_residual().samples[sl]
        denom = np.linalg.norm(self.F.samples[sl].ravel())
        num = np.linalg.norm(res.ravel())
        return float(num / denom) if denom > 0 else float(num)

    def data_mismatch(self) -> tuple[float, float]:
        """Relative mismatch of ``(u, d_t u)(0)`` against ``(f, g)``."""
        j0 = self.u.grid.t_index_zero
        u0 = self.u.time_slice(j0).samples
        ut0 = self.time_derivative(1).time_slice(j0).samples
        out = []
        for got, want in ((u0, self.f.samples), (ut0, self.g.samples)):
            denom = max(np.linalg.norm(want.ravel()), np.linalg.norm(got.ravel()), 1e-300)
            out.append(float(np.linalg.norm((got - want).ravel()) / denom)
                       if np.any(want) or np.any(got) else 0.0)
        return out[0], out[1]


def assemble(f: SpatialField, g: SpatialField, F: SpaceTimeField, T: float, alpha: float,
             correct_data: bool = True) -> SolutionBundle:
    """Solve ``box u = F`` on ``[0, T] x R^n`` with ``(u, d_t u)(0) = (f, g)``."""
    _check_T_alpha(T, alpha)
    grid = F.grid
    chi = standard_chi()
    if chi.outer >= grid.Lt / 2:
        raise ValueError("time period too short for chi")
    split = split_inhomogeneity(F, T, alpha)
    floor = T ** (-2 * alpha) / 2
    u0 = homogeneous_solution(f, g, grid)
    u1 = duhamel_u1(split.F1)
    u2 = invert_wave_symbol(split.F2, floor)
    j0 = grid.t_index_zero
    if correct_data:
        u2t = invert_wave_symbol(split.F2, floor, derivative=1)
        w2_data = (u2.time_slice(j0), u2t.time_slice(j0))
    else:
        comps = F.components
        w2_data = (SpatialField.zeros(grid, comps), SpatialField.zeros(grid, comps))
    w2 = homogeneous_solution(*w2_data, grid)
    nd = 1 + grid.n
    chi_t = grid._axis_view(chi(grid.t), 0, nd)
    chi_T = grid._axis_view(chi(grid.t / T), 0, nd)
    u = SpaceTimeField(grid, chi_t * (u0.samples - w2.samples) + chi_T * u1.samples + u2.samples)
    return SolutionBundle(u0, u1, u2, w2, u, T, alpha, split, f, g, F, w2_data, floor)


def inhomogeneous_solution(F: SpaceTimeField, T: float, alpha: float) -> SpaceTimeField:
    """``W_T F``: the zero-data solution of ``box u = F`` on ``[0, T]``."""
    comps = F.components
    zero = SpatialField.zeros(F.grid, comps)
    return assemble(zero, zero, F, T, alpha).u


# -- series characterisation of u1 ---------------------------------------------------

def _lattice_tau_coeffs(F: SpaceTimeField) -> np.ndarray:
    """Time-trig coefficients per spatial mode; ``int h(tau) F_hat dtau = 2 pi sum_k h(tau_k) a_k``."""
    return time_coefficients(spatial_forward_st(F.samples, F.grid), F.grid)


def _gj_modes(a: np.ndarray, grid: GridSpec, j: int, rho) -> np.ndarray:
    tax = -(1 + grid.n)
    tau = grid.tau_mesh()
    xi = grid.xi_abs()
    k_hat = 2 * np.pi * np.sum((tau - (2 * rho - 1) * xi) ** (j - 1) * a, axis=tax)
    return (1j ** (j + 1)) / (2 * np.pi * (j + 1)) * k_hat


def compute_gj(F11: SpaceTimeField, j: int, rho: float) -> SpatialField:
    """``g_j(rho)`` built from the ``tau``-moments of the low-frequency forcing."""
    if j < 1:
        raise ValueError("j must be >= 1")
    if not 0 <= rho <= 1:
        raise ValueError("rho must lie in [0, 1]")
    return spatial_inverse(F11.grid, _gj_modes(_lattice_tau_coeffs(F11), F11.grid, j, rho))


def _fj_modes(a: np.ndarray, grid: GridSpec, j: int, sign: int) -> np.ndarray:
    tax = -(1 + grid.n)
    tau = grid.tau_mesh()
    xi = grid.xi_abs()
    xi_sp = grid.xi_abs(spatial_only=True)
    xi_safe = np.where(xi_sp == 0, 1.0, xi_sp)
    if sign > 0:
        w = np.where(tau >= 0, (1j**j) * (np.abs(tau) - xi) ** (j - 1), 0.0)
        pref = 1.0
    else:
        w = np.where(tau < 0, (1j**j) * (xi - np.abs(tau)) ** (j - 1), 0.0)
        pref = -1.0
    integral = 2 * np.pi * np.sum(w * a, axis=tax)
    return np.where(xi_sp == 0, 0.0, pref * integral / (4 * np.pi * xi_safe))


def compute_fj(F12: SpaceTimeField, j: int, sign: int) -> SpatialField:
    """``f_j^+`` (``sign=+1``, ``tau >= 0`` half-line) or ``f_j^-`` (``sign=-1``)."""
    if j < 1:
        raise ValueError("j must be >= 1")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    grid = F12.grid
    a = _lattice_tau_coeffs(F12)
    zero_mode = np.broadcast_to(grid.xi_abs() == 0, grid.shape)
    scale = np.abs(a).max()
    if scale > 0 and np.abs(a[..., zero_mode]).max(initial=0.0) > 1e-13 * scale:
        raise ValueError("high-frequency forcing must vanish at xi = 0")
    return spatial_inverse(grid, _fj_modes(a, grid, j, sign))


def _E_modes(a: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Closed-form remainder ``E = E_+ + E_-`` of the ``u12`` expansion, per spatial mode."""
    tax = -(1 + grid.n)
    tau = grid.tau_mesh()
    xi = grid.xi_abs()
    t = grid.t_mesh()
    xi_safe = np.where(xi == 0, 1.0, xi)
    pref = np.where(xi == 0, 0.0, -1.0 / (2 * xi_safe))  # -(2 pi)/(4 pi |xi|)
    denom = np.abs(tau) + xi_safe
    neg = np.where(tau < 0, a / denom, 0.0)
    pos = np.where(tau >= 0, a / denom, 0.0)
    e_plus = time_trig_sum(neg, grid) - np.exp(1j * xi * t) * np.expand_dims(neg.sum(axis=tax), tax)
    e_minus = time_trig_sum(pos, grid) - np.exp(-1j * xi * t) * np.expand_dims(pos.sum(axis=tax), tax)
    return pref * (e_plus + e_minus)


@dataclass(frozen=True)
class U1SeriesReport:
    """Outcome of the truncated-series check.

    ``relative_error_u11`` compares ``Sigma_1`` (``J`` terms) with the Duhamel
    ``u11`` on the window ``|t| <= 4T``; ``relative_error_u12`` does the same
    for ``Sigma_2 + E``. ``E_lhs``/``E_rhs`` are the per-``xi`` sides of the
    remainder bound, ``E_ratio`` their largest quotient.
    """

    relative_error_u11: float
    relative_error_u12: float
    term_norms_u11: tuple[float, ...]
    term_norms_u12: tuple[float, ...]
    series_converged: bool
    E_lhs: np.ndarray
    E_rhs: np.ndarray
    E_ratio: float
    window: float


def _window_rel(a: np.ndarray, b: np.ndarray, mask: np.ndarray, grid: GridSpec,
                floor: float = 0.0) -> float:
    """Relative window error; ``floor`` guards pieces that are pure rounding."""
    sl = (Ellipsis, mask) + (slice(None),) * grid.n
    diff = np.linalg.norm((a - b)[sl].ravel())
    ref = max(np.linalg.norm(b[sl].ravel()), floor)
    if ref == 0:
        return float(diff)
    return float(diff / ref)


def verify_u1_series(F1: SpaceTimeField, J: int, T: float, alpha: float,
                     s: float = 1.0, gamma: float = 1.0, nodes: int = 16) -> U1SeriesReport:
    """Check ``u11 = Sigma_1`` and ``u12 = Sigma_2 + E`` (truncated at ``J``) against the
    Duhamel integral, and tabulate both sides of the remainder estimate for ``chi E``."""
    if J < 1:
        raise ValueError("J must be >= 1")
    _check_T_alpha(T, alpha)
    grid = F1.grid
    F11, F12 = split_frequency(F1, T, alpha)
    t = grid.t_mesh()
    xi = grid.xi_abs()
    window = 4 * T
    mask = np.abs(grid.t) <= window + 1e-12

    # Sigma_1 with Gauss-Legendre in rho on [0, 1]
    a11 = _lattice_tau_coeffs(F11)
    x, w = leggauss(nodes)
    rhos, weights = (x + 1) / 2, w / 2
    sigma1 = np.zeros(a11.shape, dtype=complex)
    terms11 = []
    fact = 1.0
    for j in range(1, J + 1):
        fact *= j
        acc = np.zeros_like(sigma1)
        for rho, wt in zip(rhos, weights):
            g = np.expand_dims(_gj_modes(a11, grid, j, rho), -(1 + grid.n))
            acc = acc + wt * np.exp(1j * t * (2 * rho - 1) * xi) * g
        term = t ** (j + 1) / fact * acc
        terms11.append(float(np.linalg.norm(term[(Ellipsis, mask) + (slice(None),) * grid.n].ravel())))
        sigma1 = sigma1 + term
    u11 = _duhamel_modes(a11, grid, 0)

    # Sigma_2 + E against u12
    a12 = _lattice_tau_coeffs(F12)
    sigma2 = np.zeros(a12.shape, dtype=complex)
    terms12 = []
    fact = 1.0
    for j in range(1, J + 1):
        fact *= j
        fp = np.expand_dims(_fj_modes(a12, grid, j, 1), -(1 + grid.n))
        fm = np.expand_dims(_fj_modes(a12, grid, j, -1), -(1 + grid.n))
        term = t**j / fact * (np.exp(1j * t * xi) * fp + np.exp(-1j * t * xi) * fm)
        terms12.append(float(np.linalg.norm(term[(Ellipsis, mask) + (slice(None),) * grid.n].ravel())))
        sigma2 = sigma2 + term
    E = _E_modes(a12, grid)
    u12 = _duhamel_modes(a12, grid, 0)
    sl = (Ellipsis, mask) + (slice(None),) * grid.n
    floor = 1e-10 * np.linalg.norm((u11 + u12)[sl].ravel())
    err11 = _window_rel(sigma1, u11, mask, grid, floor)
    err12 = _window_rel(sigma2 + E, u12, mask, grid, floor)

    # terms at rounding level carry no convergence information
    converged = True
    for terms in (terms11, terms12):
        if len(terms) >= 2 and terms[-1] > max(terms[-2], floor):
            converged = False

    # remainder bound: sup_tau |F Lambda^s Lambda_-^gamma (chi E)| vs int |F Lambda^{s-1} F12| dlambda
    chi = standard_chi()
    chiE = SpaceTimeField(grid, spatial_inverse_st(grid._axis_view(chi(grid.t), 0, 1 + grid.n) * E, grid))
    sym = (lambda_symbol(s) * lambda_minus_symbol(gamma)).on_grid(grid)
    lhs_full = np.abs(sym * forward_transform(chiE).continuum())
    tax = lhs_full.ndim - 1 - grid.n
    lhs = lhs_full.max(axis=tax)
    rhs_full = np.abs(lambda_symbol(s - 1).on_grid(grid) * forward_transform(F12).continuum())
    rhs = rhs_full.sum(axis=tax) * grid.dtau
    active = rhs > 1e-12 * max(rhs.max(), 1e-300)
    ratio = float((lhs[active] / rhs[active]).max()) if np.any(active) else 0.0
    return U1SeriesReport(err11, err12, tuple(terms11), tuple(terms12), converged,
                          lhs, rhs, ratio, window)


# -- decay of the inhomogeneous constant ---------------------------------------------

def delta_exponent(gamma: float, alpha: float, theta: float, eps: float) -> float:
    """``2 - gamma - alpha/2 + min(0, alpha (theta + eps - 1))``."""
    return 2.0 - gamma - alpha / 2 + min(0.0, alpha * (theta + eps - 1.0))


def gain_exponent(gamma: float, alpha: float, theta: float, eps: float) -> float:
    """Predicted decay exponent ``min(alpha eps, delta)`` of the inhomogeneous constant."""
    return min(alpha * eps, delta_exponent(gamma, alpha, theta, eps))


@dataclass(frozen=True)
class GainMeasurement:
    T: tuple[float, ...]
    solution_norm: tuple[float, ...]
    source_norm: tuple[float, ...]
    ratio: tuple[float, ...]
    fit: SlopeFit | None
    predicted: float
    note: str = ""


def measure_inhomogeneous_gain(F: SpaceTimeField | Callable[[float], SpaceTimeField],
                               params: NormParams, eps: float, alpha: float,
                               T_list: Sequence[float]) -> GainMeasurement:
    """Fit the decay of ``||W_T F||_{X_T} / ||F||_Y`` in ``T``.

    ``F`` is either one forcing or a family ``T -> F_T``. The solution norm is
    the restriction upper bound in the ``H^{s,theta}`` + time-derivative norm;
    the source norm is ``||F||_{H^{s-1, theta+eps-1}}``.
    """
    T_list = [float(T) for T in T_list]
    if len(T_list) < 4 or any(not 0 < T < 1 for T in T_list):
        raise ValueError("T_list needs at least 4 values in (0, 1)")
    if eps < 0:
        raise ValueError("eps must be >= 0")
    sol, src, ratio = [], [], []
    for T in T_list:
        FT = F(T) if callable(F) else F
        u = inhomogeneous_solution(FT, T, alpha)
        num = restriction_norm_upper(u, T, lambda v: calligraphic_norm(v, params.s, params.theta))
        den = hstheta_norm(FT, params.s - 1, params.theta + eps - 1)
        sol.append(num)
        src.append(den)
        ratio.append(num / den if den > 0 else np.nan)
    valid = [(T, r) for T, r in zip(T_list, ratio) if np.isfinite(r) and r > 0]
    fit, note = None, ""
    if len(valid) >= 3:
        fit = fit_slope(valid)
    else:
        note = f"degenerate fit: only {len(valid)} valid points"
    return GainMeasurement(tuple(T_list), tuple(sol), tuple(src), tuple(ratio), fit,
                           gain_exponent(params.gamma, alpha, params.theta, eps), note)
