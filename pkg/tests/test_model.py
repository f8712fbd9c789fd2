import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nemflow import model as m
from nemflow import spectral as sp
from nemflow.errors import ConfigurationError
from nemflow.initdata import InitSpec, initial_state, taylor_green
from nemflow.model import ANGLE, FlowState, Params


def angle_state(grid, theta, u_hat=None, params=Params()):
    u_hat = np.zeros((2,) + grid.shape, complex) if u_hat is None else u_hat
    return FlowState(grid, 0.0, u_hat, theta_hat=sp.to_spectral(theta), params=params)


def smooth_theta(grid, seed, amp=0.5):
    from nemflow.initdata import director_bump
    return director_bump(grid, 0.1, amp, seed)


class TestParams:
    def test_defaults_are_unit(self):
        assert Params() == Params(1.0, 1.0, 1.0)

    @pytest.mark.parametrize("kw", [{"nu": 0.0}, {"lam": -1.0}, {"gamma": float("nan")}])
    def test_rejects_nonpositive(self, kw):
        with pytest.raises(ConfigurationError):
            Params(**kw)


class TestFlowState:
    def test_rejects_divergent_velocity(self):
        g = sp.make_grid(16, 1.0)
        u = np.zeros((2,) + g.shape, complex)
        u[0][g.index_of(1, 0)] = u[0][g.index_of(-1, 0)] = 0.5
        with pytest.raises(ConfigurationError, match="divergence"):
            FlowState(g, 0.0, u, theta_hat=np.zeros(g.shape))

    def test_rejects_non_unit_director(self):
        g = sp.make_grid(8, 1.0)
        d = np.zeros((2,) + g.shape)
        d[0] = 1.01
        with pytest.raises(ConfigurationError, match="unit"):
            FlowState(g, 0.0, np.zeros((2,) + g.shape), d=d)

    def test_exactly_one_director(self):
        g = sp.make_grid(8, 1.0)
        with pytest.raises(ConfigurationError):
            FlowState(g, 0.0, np.zeros((2,) + g.shape))

    def test_negative_time(self):
        g = sp.make_grid(8, 1.0)
        with pytest.raises(ConfigurationError):
            FlowState(g, -1.0, np.zeros((2,) + g.shape), theta_hat=np.zeros(g.shape))

    def test_arrays_are_immutable_copies(self):
        g = sp.make_grid(8, 1.0)
        u = np.zeros((2,) + g.shape, complex)
        s = FlowState(g, 0.0, u, theta_hat=np.zeros(g.shape))
        u[0, 0, 0] = 5.0
        assert s.u_hat[0, 0, 0] == 0
        with pytest.raises(ValueError):
            s.u_hat[0, 0, 0] = 1.0

    def test_vector_conversion_preserves_director(self, small_state):
        v = m.to_vector_mode(small_state)
        assert v.mode == m.VECTOR
        assert np.allclose(v.director(), small_state.director(), atol=1e-15)


class TestDirectorFromAngle:
    def test_vertical(self):
        d = m.director_from_angle(np.full((4, 4), math.pi / 2))
        assert np.allclose(d[0], 0.0, atol=1e-16) and np.all(d[1] == 1.0)

    def test_horizontal(self):
        d = m.director_from_angle(np.zeros((4, 4)))
        assert np.all(d[0] == 1.0) and np.all(d[1] == 0.0)

    @given(st.integers(0, 2 ** 32))
    def test_unit_length(self, seed):
        th = np.random.default_rng(seed).uniform(-10, 10, (8, 8))
        d = m.director_from_angle(th)
        assert np.max(np.abs(np.hypot(d[0], d[1]) - 1)) <= 2e-16

    def test_tension_identity(self):
        # ||Lap d + |grad d|^2 d||^2 from d equals ||Lap theta||^2 from theta
        g = sp.make_grid(64, 2 * math.pi)
        x, _ = g.coords()
        theta = math.pi / 2 + 0.3 * np.sin(x)
        s = angle_state(g, theta)
        from_d = m.vector_director_functionals(g, s.director())["director_dissipation"]
        from_theta = m.angle_director_functionals(g, s.theta_hat)["director_dissipation"]
        assert from_d == pytest.approx(from_theta, rel=1e-8)


class TestElasticStress:
    def test_constant_director(self):
        g = sp.make_grid(8, 1.0)
        s = angle_state(g, np.full(g.shape, 0.3))
        assert np.all(m.elastic_stress(s) == 0)

    def test_one_dimensional_angle(self):
        g = sp.make_grid(32, 2 * math.pi)
        x, _ = g.coords()
        s = angle_state(g, 0.2 * np.sin(x))
        t = m.elastic_stress(s)
        assert np.allclose(t[0, 0], (0.2 * np.cos(x)) ** 2, atol=1e-14)
        assert np.max(np.abs(t[0, 1])) < 1e-14 and np.max(np.abs(t[1, 1])) < 1e-14

    def test_angle_and_vector_agree(self):
        g = sp.make_grid(64, 16.0)
        s = angle_state(g, smooth_theta(g, 4))
        ta = m.elastic_stress(s)
        tv = m.elastic_stress(m.to_vector_mode(s))
        assert np.max(np.abs(ta - tv)) <= 1e-8 * max(1.0, np.max(np.abs(ta)))

    def test_symmetric(self, small_state):
        t = m.elastic_stress(m.to_vector_mode(small_state))
        assert np.array_equal(t[0, 1], t[1, 0])


class TestVelocityRhs:
    def test_rest_state(self):
        g = sp.make_grid(16, 1.0)
        s = angle_state(g, np.full(g.shape, 1.0))
        assert np.all(m.velocity_rhs(s) == 0)

    def test_taylor_green_is_steady_for_nonlinearity(self):
        s = taylor_green(sp.make_grid(32, 2 * math.pi), 1.0)
        assert np.max(np.abs(m.velocity_rhs(s))) < 1e-15

    def test_divergence_free(self, small_state):
        r = m.velocity_rhs(small_state)
        mag = np.sqrt(np.sum(np.abs(r) ** 2, axis=0))
        div = np.abs(small_state.grid.xi[0] * r[0] + small_state.grid.xi[1] * r[1])
        assert np.all(div <= 1e-12 * np.max(mag) * np.max(np.sqrt(small_state.grid.xi2)))

    def test_elastic_forcing_sign(self, small_state):
        # the velocity tendency must drain director energy into kinetic energy
        # exactly as the energy law requires: d/dt ||u||^2 contribution
        # 2 <u, -lam P div S> cancels the advective gain 2 lam <grad d, grad(u.grad d)>
        g = small_state.grid
        p = small_state.params
        zero_u = np.zeros_like(small_state.u_hat)
        du_el, _ = m.tendencies(g, p, zero_u, small_state.theta_hat, ANGLE)
        u = small_state.u_hat
        kin_rate = 2 * g.length ** 2 * np.sum(np.real(np.conj(u) * du_el))
        _, dth = m.tendencies(g, p, u, small_state.theta_hat, ANGLE)
        el_rate = 2 * p.lam * g.length ** 2 * np.sum(g.xi2 * np.real(np.conj(small_state.theta_hat) * dth))
        assert kin_rate + el_rate == pytest.approx(0.0, abs=1e-6 * abs(kin_rate))


class TestDirectorRhs:
    def test_no_flow_angle_mode(self, small_state):
        s = small_state.replace(u_hat=np.zeros_like(small_state.u_hat))
        assert np.all(m.director_rhs(s) == 0)

    def test_no_flow_vector_mode_cubic_term(self):
        g = sp.make_grid(64, 2 * math.pi)
        x, _ = g.coords()
        eps = 0.01
        s = m.to_vector_mode(angle_state(g, math.pi / 2 + eps * np.sin(x)))
        rhs = sp.to_physical(m.director_rhs(s))
        d = s.director()
        expected = (eps * np.cos(x)) ** 2 * d
        assert np.max(np.abs(rhs - expected)) <= 1e-10
        assert np.max(np.abs(rhs)) == pytest.approx(eps ** 2, rel=1e-3)

    def test_uniform_advection(self):
        L, c = 2.0, 0.7
        g = sp.make_grid(32, L)
        x, _ = g.coords()
        u = np.zeros((2,) + g.shape, complex)
        u[0, 0, 0] = c
        s = angle_state(g, np.sin(2 * math.pi * x / L), u_hat=u)
        rhs = sp.to_physical(m.director_rhs(s))
        assert np.allclose(rhs, -c * (2 * math.pi / L) * np.cos(2 * math.pi * x / L), atol=1e-13)

    def test_constant_angle_is_inert(self, small_state):
        s = small_state.replace(theta_hat=sp.to_spectral(np.full(small_state.grid.shape, 0.4)))
        assert np.max(np.abs(m.director_rhs(s))) == 0


class TestEnergyReport:
    def test_zero_state(self):
        g = sp.make_grid(8, 1.0)
        r = m.energy_report(angle_state(g, np.zeros(g.shape)))
        assert all(v == 0 for v in vars(r).values())

    def test_taylor_green_values(self):
        r = m.energy_report(taylor_green(sp.make_grid(32, 2 * math.pi), 1.0))
        assert r.kinetic == pytest.approx(2 * math.pi ** 2, rel=1e-14)
        assert r.viscous_dissipation == pytest.approx(4 * math.pi ** 2, rel=1e-14)

    def test_taylor_green_quadrature(self):
        g = sp.make_grid(32, 2 * math.pi)
        u = taylor_green(g, 1.0).velocity()
        assert np.sum(u ** 2) * g.dx ** 2 == pytest.approx(2 * math.pi ** 2, rel=1e-12)

    def test_angle_dissipation_is_laplacian_of_theta(self):
        g = sp.make_grid(64, 16.0)
        s = angle_state(g, smooth_theta(g, 8))
        lap = sp.to_physical(sp.laplacian(g, s.theta_hat))
        assert m.energy_report(s).director_dissipation == pytest.approx(np.sum(lap ** 2) * g.dx ** 2, rel=1e-8)

    def test_dual_formulation_consistency(self):
        g = sp.make_grid(128, 32.0)
        s = initial_state(g, Params(), InitSpec(amplitude=5.0, seed=2, director_amplitude=1.0))
        ra = m.energy_report(s)
        rv = m.energy_report(m.to_vector_mode(s))
        for name in ("kinetic", "elastic", "viscous_dissipation", "director_dissipation",
                     "lap_l2_sq", "grad_l4_fourth"):
            assert getattr(rv, name) == pytest.approx(getattr(ra, name), rel=1e-6), name

    def test_nonnegative(self, small_state):
        assert all(v >= 0 for v in vars(m.energy_report(small_state)).values())

    def test_energy_and_rate_use_parameters(self):
        r = m.EnergyReport(1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
        p = Params(0.5, 2.0, 3.0)
        assert r.energy(p) == 5.0
        assert r.dissipation_rate(p) == 2 * (0.5 * 3.0 + 6.0 * 4.0)


class TestNavierStokesReduction:
    def test_constant_director_kills_coupling(self, small_state):
        s = small_state.replace(theta_hat=sp.to_spectral(np.full(small_state.grid.shape, 1.1)))
        g, p = s.grid, s.params
        du, dth = m.tendencies(g, p, s.u_hat, s.theta_hat, ANGLE)
        du_ns, _ = m.tendencies(g, Params(p.nu, 1e-300, p.gamma), s.u_hat, s.theta_hat, ANGLE)
        assert np.max(np.abs(dth)) == 0
        assert np.max(np.abs(du - du_ns)) == 0
        r = m.energy_report(s)
        assert r.elastic == 0 and r.director_dissipation == 0


class TestPressure:
    def test_zero_state(self):
        g = sp.make_grid(8, 1.0)
        assert np.all(m.compute_pressure(angle_state(g, np.zeros(g.shape))) == 0)

    def test_taylor_green_closed_form(self):
        g = sp.make_grid(32, 2 * math.pi)
        x, y = g.coords()
        for a in (1.0, 2.5):
            p = m.compute_pressure(taylor_green(g, a))
            assert np.allclose(p, 0.25 * (np.cos(2 * x) + np.cos(2 * y)) * a ** 2, atol=1e-13)

    def test_taylor_green_poisson_substitution(self):
        # -Lap P = div(u . grad u) checked with physical products
        g = sp.make_grid(32, 2 * math.pi)
        x, y = g.coords()
        u = taylor_green(g, 1.0).velocity()
        p = 0.25 * (np.cos(2 * x) + np.cos(2 * y))
        adv = np.stack([u[0] * np.cos(x) * np.cos(y) + u[1] * (-np.sin(x) * np.sin(y)),
                        u[0] * np.sin(x) * np.sin(y) + u[1] * (-np.cos(x) * np.cos(y))])
        div_adv = sp.to_physical(sp.divergence(g, sp.to_spectral(adv)))
        minus_lap_p = sp.to_physical(-sp.laplacian(g, sp.to_spectral(p)))
        assert np.allclose(minus_lap_p, div_adv, atol=1e-13)

    def test_gradient_cancels_non_solenoidal_part(self, small_state):
        g, s = small_state.grid, small_state
        u = s.velocity()
        tensor = u[:, None] * u[None, :] + s.params.lam * m.elastic_stress(s)
        div_t = np.stack([sum(sp.gradient(g, sp.to_spectral(tensor[i, j]))[j] for j in range(2))
                          for i in range(2)]) * g.dealias_mask
        p_hat = sp.to_spectral(m.compute_pressure(s))
        residual = -div_t - sp.gradient(g, p_hat)
        div = g.xi_deriv[0] * residual[0] + g.xi_deriv[1] * residual[1]
        assert np.max(np.abs(div)) <= 1e-10 * np.max(np.abs(div_t)) * np.max(np.sqrt(g.xi2))

    def test_mean_zero(self, small_state):
        assert abs(np.mean(m.compute_pressure(small_state))) < 1e-12
