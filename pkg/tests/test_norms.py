import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wavesobolev.cutoffs import build_bump
from wavesobolev.grid import (
    GridSpec,
    SpaceTimeField,
    SpatialField,
    forward_transform,
    lambda_minus_symbol,
    lambda_plus_symbol,
    lambda_symbol,
    spatial_forward,
)
from wavesobolev.norms import (
    NormParams,
    calligraphic_forms,
    calligraphic_norm,
    data_norm,
    hs_norm,
    hstheta_norm,
    mixed_linf_norm,
    restriction_norm_upper,
    slab_restrict,
)
from wavesobolev.randomfields import random_spacetime_field, random_spatial_field

G = GridSpec(n=1, Nt=64, Nx=32, Lt=16.0, Lx=16.0)


def field(seed):
    return random_spacetime_field(G, seed, tau_max=6, xi_max=6, decay=1)


class TestParams:
    def test_strict(self):
        NormParams(theta=0.6, gamma=1.9, strict=True)
        with pytest.raises(ValueError):
            NormParams(theta=0.5, strict=True)
        with pytest.raises(ValueError):
            NormParams(gamma=2.0, strict=True)
        NormParams(theta=0.4, gamma=3.0)


class TestHs:
    @pytest.mark.parametrize("m,s", [(0, 0.0), (3, 1.0), (-5, 2.5), (7, -1.0)])
    def test_pure_mode(self, m, s):
        xi = G.xi[G.Nx // 2 + m]
        f = SpatialField.from_function(G, lambda x: np.exp(1j * xi * x))
        assert hs_norm(f, s) == pytest.approx(np.sqrt(G.Lx) * (1 + xi**2) ** (s / 2), rel=1e-12)

    def test_s0_is_l2(self):
        f = random_spatial_field(G, 3)
        assert hs_norm(f, 0.0) == pytest.approx(np.sqrt(G.dx) * np.linalg.norm(f.samples), rel=1e-12)

    def test_data_norm_additive(self):
        f, g = random_spatial_field(G, 1), random_spatial_field(G, 2, stream=1)
        assert data_norm(f, g, 1.3) == pytest.approx(hs_norm(f, 1.3) + hs_norm(g, 0.3))


class TestSpaceTimeNorms:
    def test_plancherel(self):
        u = field(0)
        assert hstheta_norm(u, 0.0, 0.0) == pytest.approx(np.sqrt(G.cell_volume) * u.l2(), rel=1e-12)

    def test_pure_mode(self):
        tau, xi = G.tau[G.Nt // 2 + 5], G.xi[G.Nx // 2 + 2]
        u = SpaceTimeField.from_function(G, lambda t, x: np.exp(1j * (tau * t + xi * x)))
        w = lambda_symbol(1.0)(tau, [xi]) * lambda_minus_symbol(0.6)(tau, [xi])
        assert hstheta_norm(u, 1.0, 0.6) == pytest.approx(np.sqrt(G.Lt * G.Lx) * w, rel=1e-12)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 10**6), s=st.floats(-1, 2), theta=st.floats(0, 1.5),
           ds=st.floats(0, 1), dth=st.floats(0, 1))
    def test_monotone(self, seed, s, theta, ds, dth):
        u = field(seed)
        tol = 1 + 1e-12
        assert hstheta_norm(u, s, theta) <= hstheta_norm(u, s + ds, theta + dth) * tol
        assert calligraphic_norm(u, s, theta) <= calligraphic_norm(u, s + ds, theta + dth) * tol
        a, b = calligraphic_forms(u, s, theta), calligraphic_forms(u, s + ds, theta + dth)
        assert a.single_form <= b.single_form * tol
        assert mixed_linf_norm(u, s, theta) <= mixed_linf_norm(u, s + ds, theta + dth) * tol

    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize("s,theta", [(1.0, 0.6), (0.0, 0.8), (2.0, 1.0)])
    def test_calligraphic_bracket(self, seed, s, theta):
        single, total = calligraphic_forms(field(seed), s, theta)[::-1]
        assert single <= total * (1 + 1e-12)
        assert total <= np.sqrt(2) * single * (1 + 1e-12)

    def test_calligraphic_time_independent_field(self):
        u = SpaceTimeField.from_function(G, lambda t, x: np.exp(-x**2) + 0 * t)
        total, single = calligraphic_forms(u, 1.0, 0.7)
        assert total == pytest.approx(hstheta_norm(u, 1.0, 0.7), rel=1e-12)
        assert single == pytest.approx(total, rel=1e-12)


class TestMixedLinf:
    @pytest.mark.parametrize("seed", range(4))
    @pytest.mark.parametrize("theta,gamma", [(0.6, 0.6), (0.6, 1.0), (0.8, 1.5)])
    def test_embedding(self, seed, theta, gamma):
        u = field(seed)
        factor = np.sqrt(G.Nt * G.dtau / (2 * np.pi) ** (G.n + 1))
        assert hstheta_norm(u, 1.0, theta) <= mixed_linf_norm(u, 1.0, gamma) * factor * (1 + 1e-12)

    @pytest.mark.parametrize("seed", range(4))
    def test_slices(self, seed):
        u, s, gamma = field(seed), 1.0, 1.0
        W = (lambda_symbol(s - 1) * lambda_plus_symbol(1) * lambda_minus_symbol(gamma)).on_grid(G)
        S = np.sum(1.0 / W, axis=0)
        lam = lambda_symbol(s).on_spatial_grid(G)
        K = np.sqrt(G.dx / (G.Nt * G.cell_volume**2 * G.size * G.dxi)) * np.max(lam * S)
        bound = K * mixed_linf_norm(u, s, gamma)
        worst = max(hs_norm(u.time_slice(i), s) for i in range(G.Nt))
        assert worst <= bound * (1 + 1e-12)

    def test_single_mode_value(self):
        tau, xi = G.tau[G.Nt // 2 + 1], G.xi[G.Nx // 2 + 1]
        u = SpaceTimeField.from_function(G, lambda t, x: np.exp(1j * (tau * t + xi * x)))
        w = (lambda_symbol(0.0) * lambda_plus_symbol(1) * lambda_minus_symbol(1.0))(tau, [xi])
        expected = w * G.Lt * G.Lx * np.sqrt(G.dxi)
        assert mixed_linf_norm(u, 1.0, 1.0) == pytest.approx(expected, rel=1e-12)


class TestRestriction:
    def test_restrict_identity_on_slab(self):
        u = field(7)
        v = slab_restrict(u, 0.5)
        on = (G.t >= 0) & (G.t <= 0.5)
        np.testing.assert_allclose(v.samples[on], u.samples[on])
        assert np.all(v.samples[(G.t < -0.5) | (G.t > 1.0)] == 0)

    @pytest.mark.parametrize("T", [-0.5, 0.0, 4.0, 8.0])
    def test_rejects_bad_T(self, T):
        with pytest.raises(ValueError):
            slab_restrict(field(0), T)

    @pytest.mark.parametrize("seed", range(3))
    @pytest.mark.parametrize("T", [0.5, 1.0, 2.0])
    def test_extensions_dominate_slab_l2(self, seed, T):
        u = field(seed)
        on = (G.t >= 0) & (G.t <= T)
        slab_l2 = np.sqrt(G.cell_volume * np.sum(np.abs(u.samples[on]) ** 2))
        nrm = lambda v: hstheta_norm(v, 0.0, 0.6)
        assert restriction_norm_upper(u, T, nrm) >= slab_l2
        wide = build_bump(T, 2 * T)
        candidates = [u, u * wide(G.t - T / 2)[:, None]]
        for v in candidates:
            assert nrm(v) >= slab_l2
