import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import wavemap_rhs_fd
from wavesobolev.grid import GridSpec, SpaceTimeField, SpatialField
from wavesobolev.lab.config import default_config
from wavesobolev.lab.experiments import wavemap_data, wavemap_oracle_residual
from wavesobolev.nonlinear import (
    IterationReport,
    Nonlinearity,
    PicardError,
    gamma_q0_nonlinearity,
    lipschitz_probe,
    lipschitz_profile,
    persistence_probe,
    picard_solve,
    q0,
    wave_operator,
    wavemap_nonlinearity,
    wavemap_oracle,
    zero_nonlinearity,
)
from wavesobolev.norms import NormParams
from wavesobolev.randomfields import random_spacetime_field, random_spatial_field
from wavesobolev.solution import homogeneous_solution

G = GridSpec(n=1, Nt=256, Nx=64, Lt=16.0, Lx=16.0)
GP = GridSpec(n=1, Nt=64, Nx=32, Lt=8 * np.pi, Lx=8 * np.pi)  # frequency 1 is on the lattice
GW = GridSpec(n=1, Nt=256, Nx=64, Lt=16.0, Lx=8.0)
PARAMS = NormParams(1.0, 0.6, 1.0)
Q0 = gamma_q0_nonlinearity(lambda u: 1.0, "Q0")


def vector_field(grid, fn):
    t, x = grid.t_mesh(), grid.x_mesh()[0]
    comps = [np.broadcast_to(c, grid.shape) for c in fn(t, x)]
    return SpaceTimeField(grid, np.stack(comps))


def small_data(amp=1e-3, seed=11, grid=G):
    return (random_spatial_field(grid, seed, amplitude=amp, stream=0),
            random_spatial_field(grid, seed, amplitude=amp, stream=1))


class TestQ0:
    @pytest.mark.parametrize("sign", [1, -1])
    def test_null_plane_wave(self, sign):
        u = SpaceTimeField.from_function(GP, lambda t, x: np.exp(1j * (t + sign * x)))
        assert np.abs(q0(u, u).samples).max() <= 1e-10

    def test_time_only_wave(self):
        u = SpaceTimeField.from_function(GP, lambda t, x: np.exp(1j * t) + 0 * x)
        np.testing.assert_allclose(q0(u, u).samples, np.exp(2j * GP.t)[:, None] * np.ones(GP.Nx), atol=1e-12)

    def test_bilinear(self):
        u, v, w = (random_spacetime_field(G, 1, stream=k) for k in range(3))
        a, b = 0.7 + 0.2j, -1.3
        lhs = q0(u * a + w * b, v).samples
        rhs = a * q0(u, v).samples + b * q0(w, v).samples
        assert np.abs(lhs - rhs).max() <= 1e-10 * np.abs(rhs).max()
        np.testing.assert_allclose(q0(u, v).samples, q0(v, u).samples, atol=1e-13)

    def test_grid_mismatch(self):
        with pytest.raises(ValueError):
            q0(SpaceTimeField.zeros(G), SpaceTimeField.zeros(GP))


class TestNonlinearities:
    @pytest.mark.parametrize("N", [Q0, gamma_q0_nonlinearity(lambda u: 1 + u**2), zero_nonlinearity(),
                                   wavemap_nonlinearity()], ids=lambda n: n.label)
    def test_zero_to_zero(self, N):
        z = SpaceTimeField.zeros(G, N.components)
        assert np.all(N(z).samples == 0)

    @pytest.mark.parametrize("N", [Q0, gamma_q0_nonlinearity(np.cos, "cos*Q0"), wavemap_nonlinearity()],
                             ids=lambda n: n.label)
    @pytest.mark.parametrize("shift", [1, 17])
    def test_time_translation(self, N, shift):
        u = random_spacetime_field(G, 4, real=True, components=N.components)
        a = N(SpaceTimeField(G, np.roll(u.samples, shift, axis=-2))).samples
        b = np.roll(N(u).samples, shift, axis=-2)
        np.testing.assert_allclose(a, b, atol=1e-12)

    def test_gamma_one_is_q0(self):
        u = random_spacetime_field(G, 2)
        np.testing.assert_allclose(Q0(u).samples, q0(u, u).samples)

    def test_component_check(self):
        with pytest.raises(ValueError):
            wavemap_nonlinearity()(SpaceTimeField.zeros(G))

    def test_wavemap_constant(self):
        u = SpaceTimeField(G, np.stack([np.full(G.shape, 0.6), np.full(G.shape, 0.8)]))
        assert np.abs(wavemap_nonlinearity()(u).samples).max() == 0

    def test_wavemap_null_phase(self):
        u = vector_field(GP, lambda t, x: (np.cos(t - x), np.sin(t - x)))
        assert np.abs(wavemap_nonlinearity()(u).samples).max() <= 1e-10

    def test_wavemap_vs_finite_differences(self):
        k, w = 2 * np.pi / GW.Lx, 2 * np.pi / GW.Lt

        def fn(t, x):
            v = 0.4 * np.sin(k * x) * np.cos(3 * w * t) + 0.2 * np.cos(2 * k * x + w * t)
            return np.stack([np.cos(v), np.sin(v)])

        u = vector_field(GW, fn)
        out = wavemap_nonlinearity()(u).samples
        for it, ix in [(128, 5), (140, 40), (100, 17), (200, 63)]:
            ref = wavemap_rhs_fd(fn, GW.t[it], GW.x[ix])
            np.testing.assert_allclose(out[:, it, ix], ref, atol=1e-4)


class TestPicard:
    def test_zero_nonlinearity(self):
        f, g = small_data()
        u, rep = picard_solve(f, g, zero_nonlinearity(), PARAMS)
        assert rep.converged and rep.iterations == 1 and rep.contraction_ratios == []
        assert rep.diff_norms == [0.0]
        on = np.abs(G.t) <= 2
        np.testing.assert_array_equal(u.samples[on], homogeneous_solution(f, g).samples[on])

    def test_small_data_q0(self):
        f, g = small_data()
        u, rep = picard_solve(f, g, Q0, PARAMS, T0=0.5)
        assert rep.converged and rep.T == 0.5 and rep.halvings == 0
        assert rep.iterations <= 8
        assert all(r <= 0.5 for r in rep.contraction_ratios)

    def test_tight_convergence(self):
        f, g = small_data()
        _, rep = picard_solve(f, g, Q0, PARAMS, max_iter=20, abs_tol=0.0)
        assert rep.converged
        assert rep.diff_norms[-1] <= 1e-8 * rep.diff_norms[0]
        assert max(rep.contraction_ratios) <= 0.55

    def test_two_runs_agree(self):
        f, g = small_data()
        u1, _ = picard_solve(f, g, Q0, PARAMS)
        u2, _ = picard_solve(f, g, Q0, PARAMS)
        np.testing.assert_array_equal(u1.samples, u2.samples)

    def test_halving_then_failure(self):
        f, g = small_data(amp=50.0)
        with pytest.raises(PicardError) as err:
            picard_solve(f, g, gamma_q0_nonlinearity(lambda u: 1.0), PARAMS, max_iter=6, max_halvings=1)
        rep = err.value.report
        assert isinstance(rep, IterationReport) and not rep.converged
        assert len(rep.attempts) >= 1

    @pytest.mark.parametrize("kw", [dict(T0=1.0), dict(T0=0.0), dict(max_iter=0)])
    def test_rejects(self, kw):
        f, g = small_data()
        with pytest.raises(ValueError):
            picard_solve(f, g, Q0, PARAMS, **kw)


class TestWaveMap:
    def cfg(self):
        return default_config("wavemap")

    def test_oracle_trivial(self):
        o = wavemap_oracle(SpatialField.zeros(GW))
        np.testing.assert_array_equal(o.samples[0], 1.0)
        np.testing.assert_array_equal(o.samples[1], 0.0)

    def test_oracle_rejects_complex(self):
        with pytest.raises(ValueError):
            wavemap_oracle(SpatialField(GW, 1j * np.ones(GW.Nx)))

    @settings(max_examples=10, deadline=None)
    @given(seed=st.integers(0, 2**63), amp=st.floats(0.01, 3.0))
    def test_oracle_unit_modulus(self, seed, amp):
        g = random_spatial_field(GW, seed, amplitude=amp)
        o = wavemap_oracle(g)
        assert np.abs(np.sum(o.samples**2, axis=0) - 1).max() <= 1e-14

    def test_oracle_data_and_residual(self):
        _, _, G_ = wavemap_data(self.cfg())
        o = wavemap_oracle(G_, GW)
        j0 = GW.t_index_zero
        np.testing.assert_allclose(o.samples[:, j0], np.stack([np.ones(GW.Nx), np.zeros(GW.Nx)]), atol=1e-15)
        assert wavemap_oracle_residual(o) <= 1e-4

    def test_solver_matches_oracle(self):
        f, g, G_ = wavemap_data(self.cfg())
        u, rep = picard_solve(f, g, wavemap_nonlinearity(), PARAMS, T0=0.5)
        assert rep.converged
        o = wavemap_oracle(G_, GW)
        on = (GW.t >= 0) & (GW.t <= rep.T)
        err = np.linalg.norm(u.samples[:, on] - o.samples[:, on]) / np.linalg.norm(o.samples[:, on])
        assert err <= 1e-3
        assert np.abs(np.sum(np.abs(u.samples[:, on]) ** 2, axis=0) - 1).max() <= 1e-3

    def test_wave_operator_on_free_wave(self):
        # zero-mean data keeps the free wave periodic in t
        g = random_spatial_field(GW, 3)
        g = SpatialField(GW, g.samples - g.samples.mean())
        v = homogeneous_solution(SpatialField.zeros(GW), g)
        assert np.abs(wave_operator(v).samples).max() <= 1e-10


class TestPersistence:
    def test_within_twice_data(self):
        f, g = small_data()
        tr = persistence_probe(f, g, 2.0, Q0, PARAMS, T0=0.5)
        assert np.isfinite(tr.iterate_sup)
        assert tr.trace_max <= 2 * tr.data_norm_sigma

    def test_sigma_equals_s(self):
        f, g = small_data()
        tr = persistence_probe(f, g, 1.0, Q0, PARAMS)
        assert tr.trace_max == tr.base_trace_max
        assert tr.iterate_sup == tr.base_iterate_sup

    def test_weight_factor(self):
        xi = G.xi[G.Nx // 2 + 5]
        f = SpatialField.from_function(G, lambda x: 1e-3 * np.exp(1j * xi * x))
        tr = persistence_probe(f, SpatialField.zeros(G), 2.0, zero_nonlinearity(), PARAMS)
        assert tr.trace_max / tr.base_trace_max == pytest.approx((1 + xi**2) ** 0.5, rel=1e-12)

    def test_rejects_low_sigma(self):
        f, g = small_data()
        with pytest.raises(ValueError):
            persistence_probe(f, g, 0.5, Q0, PARAMS)


class TestLipschitz:
    grid = GridSpec(n=1, Nt=128, Nx=32, Lt=16.0, Lx=16.0)

    def test_zero(self):
        assert lipschitz_probe(zero_nonlinearity(), 1.0, 3, PARAMS, 0.5, self.grid) == 0.0

    def test_bilinear_scaling(self):
        a = lipschitz_probe(Q0, 1e-2, 4, PARAMS, 0.5, self.grid)
        b = lipschitz_probe(Q0, 2e-2, 4, PARAMS, 0.5, self.grid)
        assert 1.5 <= b / a <= 2.5

    def test_shorter_slab(self):
        a = lipschitz_probe(Q0, 1e-2, 4, PARAMS, 0.5, self.grid)
        b = lipschitz_probe(Q0, 1e-2, 4, PARAMS, 0.25, self.grid)
        assert b <= a * 1.05

    def test_profile_monotone(self):
        prof = lipschitz_profile(Q0, [4e-2, 1e-2, 2e-2], 3, PARAMS, 0.5, self.grid)
        assert prof == sorted(prof)

    def test_rejects(self):
        with pytest.raises(ValueError):
            lipschitz_probe(Q0, 0.0, 3, PARAMS, 0.5, self.grid)


def test_custom_nonlinearity_dataclass():
    N = Nonlinearity("cubic", lambda u: u * u * u, degree=3)
    u = random_spacetime_field(G, 0)
    np.testing.assert_allclose(N(u).samples, u.samples**3)
