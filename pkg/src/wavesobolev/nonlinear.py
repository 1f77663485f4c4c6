"""Null-form nonlinearities, the Picard iteration and empirical probes.

The iteration is ``u_j = chi(t) u0 + W_T N(u_{j-1})`` where ``u0`` is the free
wave with the given data and ``W_T`` the zero-data solution operator on
``[0, T]``. Differences are measured in the restriction upper bound of the
``H^{s,theta}``-plus-time-derivative norm.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .cutoffs import standard_chi
from .grid import (
    GridSpec,
    SpaceTimeField,
    SpatialField,
    grid_xi2,
    spatial_forward_st,
    spatial_gradient,
    spatial_inverse_st,
    time_derivative,
)
from .norms import NormParams, calligraphic_norm, data_norm, hs_norm, restriction_norm_upper
from .randomfields import random_spacetime_field
from .solution import homogeneous_solution, inhomogeneous_solution

__all__ = [
    "Nonlinearity",
    "IterationReport",
    "PicardError",
    "PersistenceTrace",
    "q0",
    "zero_nonlinearity",
    "gamma_q0_nonlinearity",
    "wavemap_nonlinearity",
    "wave_operator",
    "picard_solve",
    "wavemap_oracle",
    "persistence_probe",
    "lipschitz_probe",
    "lipschitz_profile",
]


@dataclass(frozen=True)
class Nonlinearity:
    """A map ``u -> N(u)`` of space-time fields with ``N(0) = 0``.

    ``components`` is the leading component shape it expects (``()`` for
    scalars, ``(2,)`` for the circle-valued wave map); ``degree`` is the
    lowest homogeneity, used only for reporting.
    """

    label: str
    apply: Callable[[SpaceTimeField], SpaceTimeField]
    components: tuple[int, ...] = ()
    degree: int = 2
    lipschitz_hint: Callable[[float], float] | None = None

    def __call__(self, u: SpaceTimeField) -> SpaceTimeField:
        if u.components != self.components:
            raise ValueError(f"{self.label} expects components {self.components}, got {u.components}")
        return self.apply(u)


class PicardError(RuntimeError):
    """Raised on blow-up or when no admissible ``T`` is found; carries the trace."""

    def __init__(self, message: str, report: "IterationReport"):
        super().__init__(message)
        self.report = report


@dataclass
class IterationReport:
    """Trace of a Picard run. Norm lists belong to the final (accepted) ``T``;
    ``attempts`` keeps ``(T, diff_norms)`` for every restart."""

    T: float
    iterate_norms: list[float] = field(default_factory=list)
    diff_norms: list[float] = field(default_factory=list)
    contraction_ratios: list[float] = field(default_factory=list)
    converged: bool = False
    halvings: int = 0
    attempts: list[tuple[float, list[float]]] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.diff_norms)


# -- nonlinearities -------------------------------------------------------------------

def q0(u: SpaceTimeField, v: SpaceTimeField) -> SpaceTimeField:
    """``-d_t u d_t v + grad u . grad v`` with spectral derivatives, pointwise product."""
    if u.grid != v.grid:
        raise ValueError("fields live on different grids")
    out = -time_derivative(u).samples * time_derivative(v).samples
    for du, dv in zip(spatial_gradient(u), spatial_gradient(v)):
        out = out + du.samples * dv.samples
    return SpaceTimeField(u.grid, out)


def zero_nonlinearity(components: tuple[int, ...] = ()) -> Nonlinearity:
    return Nonlinearity("zero", lambda u: SpaceTimeField.zeros(u.grid, u.components),
                        components, degree=0, lipschitz_hint=lambda R: 0.0)


def gamma_q0_nonlinearity(Gamma: Callable[[np.ndarray], np.ndarray], label: str = "gamma*Q0") -> Nonlinearity:
    """``N(u) = Gamma(u) Q0(u, u)`` with ``Gamma`` evaluated at the samples."""
    def apply(u: SpaceTimeField) -> SpaceTimeField:
        gam = np.broadcast_to(np.asarray(Gamma(u.samples)), u.samples.shape)
        return SpaceTimeField(u.grid, gam * q0(u, u).samples)
    return Nonlinearity(label, apply)


def _minkowski_dot(u: SpaceTimeField) -> np.ndarray:
    """``d_mu u . d^mu u = -|d_t u|^2 + sum_i |d_i u|^2`` contracted over components (Euclidean)."""
    ut = time_derivative(u).samples
    dot = -np.sum(ut * ut, axis=0)
    for du in spatial_gradient(u):
        dot = dot + np.sum(du.samples * du.samples, axis=0)
    return dot


def wavemap_nonlinearity() -> Nonlinearity:
    """Circle-valued wave map: ``box u = -u (d_mu u . d^mu u)``."""
    def apply(u: SpaceTimeField) -> SpaceTimeField:
        return SpaceTimeField(u.grid, -u.samples * _minkowski_dot(u)[None])
    return Nonlinearity("wavemap", apply, components=(2,), degree=3)


def wave_operator(u: SpaceTimeField) -> SpaceTimeField:
    """``box u = -d_t^2 u + Delta u`` with spectral derivatives (Nyquist kept)."""
    grid = u.grid
    coeffs = spatial_forward_st(u.samples, grid)
    lap = spatial_inverse_st(-grid_xi2(grid) * coeffs, grid)
    return SpaceTimeField(grid, -time_derivative(u, 2).samples + lap)


# -- Picard iteration ----------------------------------------------------------------

def _chi_times(u: SpaceTimeField) -> SpaceTimeField:
    grid = u.grid
    return u * grid._axis_view(standard_chi()(grid.t), 0, 1 + grid.n)


def picard_solve(f: SpatialField, g: SpatialField, N: Nonlinearity, params: NormParams,
                 eps: float = 0.5, T0: float = 0.5, max_iter: int = 40, alpha: float = 1.0,
                 grid: GridSpec | None = None, max_halvings: int = 6, rel_tol: float = 1e-8,
                 abs_tol: float = 1e-10, keep_iterates: bool = False
                 ) -> tuple[SpaceTimeField, IterationReport] | tuple[SpaceTimeField, IterationReport, list]:
    """Iterate ``u_j = chi(t) u0 + W_T N(u_{j-1})`` from ``u_0 = chi(t) u0``.

    ``T`` is halved whenever three consecutive contraction ratios exceed 1/2.
    ``eps`` is recorded for the caller; the iteration itself does not use it.
    Returns ``(u, report)`` or ``(u, report, iterates)`` with ``keep_iterates``.
    """
    if not 0 < T0 < 1:
        raise ValueError("T0 must lie in (0, 1)")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    grid = grid or f.grid
    base = _chi_times(homogeneous_solution(f, g, grid))
    scale = data_norm(f, g, params.s)
    norm = lambda w, T: restriction_norm_upper(w, T, lambda v: calligraphic_norm(v, params.s, params.theta))

    T = T0
    report = IterationReport(T=T)
    for halving in range(max_halvings + 1):
        report.T, report.halvings = T, halving
        report.iterate_norms, report.diff_norms, report.contraction_ratios = [], [], []
        iterates = [base]
        u = base
        report.iterate_norms.append(norm(u, T))
        restart = False
        streak = 0
        for _ in range(max_iter):
            u_new = base + inhomogeneous_solution(N(u), T, alpha)
            d = norm(u_new - u, T)
            report.diff_norms.append(d)
            report.iterate_norms.append(norm(u_new, T))
            if keep_iterates:
                iterates.append(u_new)
            u = u_new
            if report.iterate_norms[-1] > 1e6 * max(scale, 1e-300):
                report.attempts.append((T, list(report.diff_norms)))
                raise PicardError(f"blow-up at T={T:g}", report)
            if len(report.diff_norms) >= 2 and report.diff_norms[-2] > 0:
                r = d / report.diff_norms[-2]
                report.contraction_ratios.append(r)
                streak = streak + 1 if r > 0.5 else 0
            if d <= rel_tol * report.diff_norms[0] or d <= abs_tol:
                report.converged = True
                break
            if streak >= 3:
                restart = True
                break
        report.attempts.append((T, list(report.diff_norms)))
        if report.converged:
            return (u, report, iterates) if keep_iterates else (u, report)
        if not restart:
            break
        T /= 2
    raise PicardError(f"no convergence after {report.halvings} halvings (last T={T:g})", report)


# -- wave-map oracle ------------------------------------------------------------------

def wavemap_oracle(g: SpatialField, grid: GridSpec | None = None) -> SpaceTimeField:
    """``u = (cos v, sin v)`` with ``v`` the free wave of data ``(0, g)``."""
    grid = grid or g.grid
    if np.iscomplexobj(g.samples) and np.any(g.samples.imag != 0):
        raise ValueError("g must be real-valued")
    v = homogeneous_solution(SpatialField.zeros(grid), g, grid).samples.real
    return SpaceTimeField(grid, np.stack([np.cos(v), np.sin(v)]))


# -- persistence ----------------------------------------------------------------------

@dataclass(frozen=True)
class PersistenceTrace:
    """``sup_j`` of the sigma-level norms of the iterates and the slab trace of the solution."""

    sigma: float
    T: float
    iterate_sup: float
    base_iterate_sup: float
    trace_max: float
    base_trace_max: float
    data_norm_sigma: float
    trace: tuple[float, ...]


def persistence_probe(f: SpatialField, g: SpatialField, sigma: float, N: Nonlinearity,
                      params: NormParams, **picard_kwargs) -> PersistenceTrace:
    """Re-run the converged iteration and measure every iterate at regularity ``sigma``."""
    if sigma < params.s:
        raise ValueError("sigma must be >= s")
    u, report, iterates = picard_solve(f, g, N, params, keep_iterates=True, **picard_kwargs)
    T = report.T
    grid = u.grid

    def sup_norm(level: float) -> float:
        return max(restriction_norm_upper(w, T, lambda v: calligraphic_norm(v, level, params.theta))
                   for w in iterates)

    slab = np.flatnonzero((grid.t >= -1e-12) & (grid.t <= T + 1e-12))
    trace = tuple(hs_norm(u.time_slice(j), sigma) for j in slab)
    base_trace = tuple(hs_norm(u.time_slice(j), params.s) for j in slab)
    return PersistenceTrace(sigma, T, sup_norm(sigma), sup_norm(params.s), max(trace),
                            max(base_trace), data_norm(f, g, sigma), trace)


# -- Lipschitz probe ------------------------------------------------------------------

def _probe_directions(grid: GridSpec, components: tuple[int, ...], samples: int, seed: int,
                      T: float, params: NormParams, band: float):
    out = []
    norm = lambda w: restriction_norm_upper(w, T, lambda v: calligraphic_norm(v, params.s, params.theta))
    weights = np.linspace(1.0, 0.5, samples)
    for k in range(samples):
        pair = []
        for which in (0, 1):
            w = random_spacetime_field(grid, seed, band, band, real=True, components=components,
                                       stream=2 * k + which)
            w = w * (1.0 / norm(w))
            pair.append(w * (weights[k] if which else 1.0))
        out.append(tuple(pair))
    return out


def lipschitz_probe(N: Nonlinearity, R: float, samples: int, params: NormParams, T: float,
                    grid: GridSpec, seed: int = 0, alpha: float = 1.0, band: float = 3.0) -> float:
    """Empirical ``sup ||W_T (N u - N v)|| / ||u - v||`` over fixed random pairs of norm ``<= R``.

    The pair directions depend only on ``(seed, samples)``, so probes at
    different ``R`` or ``T`` see the same shapes.
    """
    if R <= 0 or samples < 1:
        raise ValueError("need R > 0 and samples >= 1")
    norm = lambda w: restriction_norm_upper(w, T, lambda v: calligraphic_norm(v, params.s, params.theta))
    best = 0.0
    for du, dv in _probe_directions(grid, N.components, samples, seed, T, params, band):
        u, v = du * R, dv * R
        num = norm(inhomogeneous_solution(N(u) - N(v), T, alpha))
        den = norm(u - v)
        if den > 0:
            best = max(best, num / den)
    return best


def lipschitz_profile(N: Nonlinearity, radii: Sequence[float], samples: int, params: NormParams,
                      T: float, grid: GridSpec, seed: int = 0, alpha: float = 1.0) -> list[float]:
    """Probe values over increasing radii, made nondecreasing by a running maximum."""
    raw = [lipschitz_probe(N, R, samples, params, T, grid, seed, alpha) for R in sorted(radii)]
    return list(np.maximum.accumulate(raw)) if raw else []
