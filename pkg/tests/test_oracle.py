import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_real
from nemflow import oracle
from nemflow.errors import ConfigurationError
from nemflow.initdata import taylor_green
from nemflow.model import Params, energy_report
from nemflow.spectral import make_grid


class TestTolerance:
    def test_defaults(self):
        tol = oracle.OracleTolerance()
        assert (tol.abs, tol.rel) == (1e-12, 1e-10)

    def test_rejects_nonpositive(self):
        with pytest.raises(ConfigurationError):
            oracle.OracleTolerance(abs=0.0)

    def test_close(self):
        tol = oracle.OracleTolerance()
        assert tol.close(1.0 + 5e-11, 1.0)
        assert not tol.close(1.0 + 1e-9, 1.0)


class TestBruteforceDFT:
    def test_constant_is_delta(self):
        c = oracle.dft_bruteforce(np.full((8, 8), 3.0))
        assert c[0, 0] == pytest.approx(3.0)
        c[0, 0] = 0
        assert np.max(np.abs(c)) < 1e-14

    def test_single_cosine(self):
        x = np.arange(8)[:, None] * np.ones((1, 8))
        c = oracle.dft_bruteforce(np.cos(2 * math.pi * 2 * x / 8))
        assert c[2, 0] == pytest.approx(0.5) and c[-2, 0] == pytest.approx(0.5)
        c[2, 0] = c[-2, 0] = 0
        assert np.max(np.abs(c)) < 1e-14

    def test_known_values_on_n8(self):
        f = np.zeros((8, 8))
        f[1, 0] = 1.0
        c = oracle.dft_bruteforce(f)
        k = np.arange(8)
        assert np.allclose(c[:, 0], np.exp(-2j * math.pi * k / 8) / 64)

    def test_size_guard(self):
        with pytest.raises(ConfigurationError):
            oracle.dft_bruteforce(np.zeros((32, 32)))

    @given(st.integers(0, 2 ** 31))
    def test_agrees_with_numpy_reference(self, seed):
        f = random_real(8, seed)
        assert np.max(np.abs(oracle.dft_bruteforce(f) - np.fft.fft2(f) / 64)) < 1e-13


class TestHeatEnergy:
    def test_slope_zero_elementary_integral(self):
        # int_0^inf r exp(-2 (t+1) r^2) dr = 1 / (4 (t+1)), times 2 pi
        for t in (0.0, 1.0, 9.0):
            assert oracle.heat_energy_exact(0.0, t) == pytest.approx(2 * math.pi / (4 * (1 + t)))

    def test_slope_one_closed_form(self):
        # int r^3 exp(-2a r^2) dr = 1 / (8 a^2) with a = 1 + t
        for t in (0.0, 3.0):
            assert oracle.heat_energy_exact(1.0, t) == pytest.approx(2 * math.pi / (8 * (1 + t) ** 2))

    @pytest.mark.parametrize("s", [0.0, 0.5, 1.0, 1.7])
    def test_log_slope(self, s):
        t = np.logspace(0, 4, 30)
        slope = np.polyfit(np.log1p(t), np.log(oracle.heat_energy_exact(s, t)), 1)[0]
        assert slope == pytest.approx(-(s + 1), abs=1e-10)

    @pytest.mark.parametrize("s", [0.0, 1.0])
    def test_doubling_ratio(self, s):
        t = 1e6
        ratio = oracle.heat_energy_exact(s, 2 * t + 1) / oracle.heat_energy_exact(s, t)
        assert ratio == pytest.approx(2 ** -(s + 1), rel=1e-12)

    def test_rejects_slope_at_minus_one(self):
        with pytest.raises(ConfigurationError):
            oracle.heat_energy_exact(-1.0, 1.0)

    def test_matches_numerical_quadrature(self):
        from scipy.integrate import quad

        s, t = 0.5, 2.0
        val, _ = quad(lambda r: 2 * math.pi * r ** (2 * s + 1) * math.exp(-2 * (1 + t) * r ** 2), 0, np.inf)
        assert oracle.heat_energy_exact(s, t) == pytest.approx(val, rel=1e-10)


class TestBudgetResidual:
    def test_matches_explicit_trapezoid(self):
        e0, rate, h, steps = 2.0, 3.0, 0.05, 40
        t = np.arange(steps + 1) * h
        diss = rate * e0 * np.exp(-rate * t)
        trap = np.sum(0.5 * h * (diss[1:] + diss[:-1]))
        expected = abs(e0 * np.exp(-rate * t[-1]) + trap - e0)
        assert oracle.heat_mode_budget_residual(e0, rate, h, steps) == pytest.approx(expected, rel=1e-10)

    def test_zero_rate(self):
        assert oracle.heat_mode_budget_residual(1.0, 0.0, 0.1, 10) == 0.0


class TestTaylorGreen:
    def test_initial_matches_initdata(self):
        exact = oracle.taylor_green_exact(1.3, 1.0, 0.0, n=32)
        built = taylor_green(make_grid(32, 2 * math.pi), 1.3)
        assert np.max(np.abs(exact.u_hat - built.u_hat)) < 1e-15
        assert np.max(np.abs(exact.theta_hat - built.theta_hat)) < 1e-15

    def test_energy_decay_factor(self):
        e0 = energy_report(oracle.taylor_green_exact(1.0, 0.7, 0.0, n=16)).kinetic
        e1 = energy_report(oracle.taylor_green_exact(1.0, 0.7, 0.5, n=16)).kinetic
        assert e1 / e0 == pytest.approx(math.exp(-4 * 0.7 * 0.5), rel=1e-14)

    def test_physical_field(self):
        s = oracle.taylor_green_exact(2.0, 1.0, 0.25, n=16)
        x, y = s.grid.coords()
        u = s.velocity()
        a = 2.0 * math.exp(-0.5)
        assert np.allclose(u[0], a * np.sin(x) * np.cos(y), atol=1e-14)
        assert np.allclose(u[1], -a * np.cos(x) * np.sin(y), atol=1e-14)

    def test_params_are_carried(self):
        s = oracle.taylor_green_exact(1.0, 0.3, 0.0, n=8, lam=2.0, gamma=0.5)
        assert s.params == Params(0.3, 2.0, 0.5)
