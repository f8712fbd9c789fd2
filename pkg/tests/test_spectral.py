import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_real
from nemflow import spectral as sp
from nemflow.errors import ConfigurationError, NumericalInputError, SymmetryError
from nemflow.oracle import dft_bruteforce

sizes = st.sampled_from([8, 10, 12, 16, 24, 32])
seeds = st.integers(0, 2 ** 32 - 1)
lengths = st.floats(0.5, 100.0)


class TestMakeGrid:
    def test_two_pi_box_has_integer_wavevectors(self):
        g = sp.make_grid(8, 2 * math.pi)
        assert sorted(set(g.xi[0].ravel().round(12))) == list(range(-4, 4))

    def test_unit_box_first_mode(self):
        g = sp.make_grid(16, 1.0)
        assert np.allclose(g.xi[:, 1, 0], (2 * math.pi, 0.0))

    def test_mean_mode_is_exactly_zero(self):
        g = sp.make_grid(12, 3.7)
        assert g.xi[0, 0, 0] == 0.0 and g.xi[1, 0, 0] == 0.0

    @pytest.mark.parametrize("n,length", [(7, 1.0), (6, 1.0), (0, 1.0), (16, 0.0), (16, -2.0),
                                          (16, float("nan"))])
    def test_rejects_bad_geometry(self, n, length):
        with pytest.raises(ConfigurationError):
            sp.make_grid(n, length)

    @given(sizes, lengths)
    def test_dealias_mask_is_two_thirds_rule(self, n, length):
        g = sp.make_grid(n, length)
        expected = (np.abs(g.k[0]) < n / 3) & (np.abs(g.k[1]) < n / 3)
        assert np.array_equal(g.dealias_mask, expected)

    def test_wavenumber_range(self):
        g = sp.make_grid(10, 1.0)
        assert g.k.min() == -5 and g.k.max() == 4

    def test_grid_arrays_are_read_only(self):
        g = sp.make_grid(8, 1.0)
        with pytest.raises(ValueError):
            g.xi2[0, 0] = 1.0


class TestTransforms:
    def test_constant_field(self):
        g = sp.make_grid(8, 1.0)
        c = sp.forward_transform(g, np.full(g.shape, 2.5))
        assert c[0, 0] == pytest.approx(2.5)
        c[0, 0] = 0
        assert np.max(np.abs(c)) < 1e-15

    def test_cosine_has_two_half_coefficients(self):
        g = sp.make_grid(16, 1.0)
        x, _ = g.coords()
        c = sp.forward_transform(g, np.cos(2 * math.pi * x))
        assert c[g.index_of(1, 0)] == pytest.approx(0.5)
        assert c[g.index_of(-1, 0)] == pytest.approx(0.5)
        c[g.index_of(1, 0)] = c[g.index_of(-1, 0)] = 0
        assert np.max(np.abs(c)) < 1e-15

    def test_matches_bruteforce_oracle(self):
        g = sp.make_grid(8, 2 * math.pi)
        f = random_real(8, 11)
        assert np.max(np.abs(sp.forward_transform(g, f) - dft_bruteforce(f))) <= 1e-12

    def test_rejects_non_finite(self):
        g = sp.make_grid(8, 1.0)
        f = np.zeros(g.shape)
        f[2, 3] = np.inf
        with pytest.raises(NumericalInputError):
            sp.forward_transform(g, f)

    def test_zero_spectrum_inverts_to_zero(self):
        g = sp.make_grid(8, 1.0)
        assert np.all(sp.inverse_transform(g, np.zeros(g.shape, complex)) == 0)

    def test_symmetric_pair_inverts_to_cosine(self):
        g = sp.make_grid(16, 1.0)
        c = np.zeros(g.shape, complex)
        c[g.index_of(1, 0)] = c[g.index_of(-1, 0)] = 0.5
        x, _ = g.coords()
        assert np.allclose(sp.inverse_transform(g, c), np.cos(2 * math.pi * x), atol=1e-14)

    def test_asymmetric_input_raises(self):
        g = sp.make_grid(8, 1.0)
        c = np.zeros(g.shape, complex)
        c[g.index_of(1, 0)] = 1.0
        with pytest.raises(SymmetryError):
            sp.inverse_transform(g, c)

    @given(sizes, seeds)
    def test_round_trip(self, n, seed):
        g = sp.make_grid(n, 2.0)
        f = random_real(n, seed)
        back = sp.inverse_transform(g, sp.forward_transform(g, f))
        assert np.max(np.abs(back - f)) <= 1e-12 * np.max(np.abs(f))
        c = sp.forward_transform(g, f)
        again = sp.forward_transform(g, sp.inverse_transform(g, c))
        assert np.max(np.abs(again - c)) <= 1e-12 * np.max(np.abs(c))

    @given(sizes, seeds)
    def test_real_fields_are_conjugate_symmetric(self, n, seed):
        g = sp.make_grid(n, 1.0)
        assert sp.symmetry_defect(sp.forward_transform(g, random_real(n, seed))) <= 1e-12


class TestDifferentialOperators:
    def test_gradient_of_sine(self):
        g = sp.make_grid(16, 3.0)
        x, _ = g.coords()
        kap = 2 * math.pi / 3.0
        grad = sp.inverse_transform(g, sp.gradient(g, sp.forward_transform(g, np.sin(kap * x))))
        assert np.allclose(grad[0], kap * np.cos(kap * x), atol=1e-13)
        assert np.allclose(grad[1], 0.0, atol=1e-13)

    def test_gradient_of_constant_is_zero(self):
        g = sp.make_grid(8, 1.0)
        assert np.all(sp.gradient(g, sp.forward_transform(g, np.full(g.shape, 4.0))) == 0)

    def test_gradient_against_finite_differences(self):
        n, L = 32, 1.0
        g = sp.make_grid(n, L)
        x, y = g.coords()
        a = 2 * math.pi / L
        f = np.sin(a * x) * np.sin(2 * a * y)
        exact = a * np.cos(a * x) * np.sin(2 * a * y)
        spectral = sp.inverse_transform(g, sp.gradient(g, sp.forward_transform(g, f)))[0]
        assert np.max(np.abs(spectral - exact)) <= 1e-10 * np.max(np.abs(exact))
        fd = (np.roll(f, -1, axis=0) - np.roll(f, 1, axis=0)) / (2 * g.dx)
        err_n = np.max(np.abs(fd - exact))
        g2 = sp.make_grid(2 * n, L)
        x2, y2 = g2.coords()
        f2 = np.sin(a * x2) * np.sin(2 * a * y2)
        fd2 = (np.roll(f2, -1, axis=0) - np.roll(f2, 1, axis=0)) / (2 * g2.dx)
        err_2n = np.max(np.abs(fd2 - a * np.cos(a * x2) * np.sin(2 * a * y2)))
        assert err_n / err_2n == pytest.approx(4.0, rel=0.05)

    def test_nyquist_is_dropped_from_derivatives(self):
        g = sp.make_grid(8, 1.0)
        c = np.zeros(g.shape, complex)
        c[g.index_of(-4, 0)] = 1.0
        assert np.all(sp.gradient(g, c) == 0)

    def test_laplacian_eigenfunction(self):
        g = sp.make_grid(16, 5.0)
        x, _ = g.coords()
        kap = 2 * math.pi / 5.0
        f = np.sin(kap * x)
        lap = sp.inverse_transform(g, sp.laplacian(g, sp.forward_transform(g, f)))
        assert np.allclose(lap, -kap ** 2 * f, atol=1e-13)

    def test_laplacian_of_constant(self):
        g = sp.make_grid(8, 1.0)
        assert np.all(sp.laplacian(g, sp.forward_transform(g, np.ones(g.shape))) == 0)

    @given(seeds)
    def test_divergence_of_gradient_is_laplacian(self, seed):
        g = sp.make_grid(16, 2 * math.pi)
        c = sp.dealias(g, sp.forward_transform(g, random_real(16, seed)))
        lhs = sp.divergence(g, sp.gradient(g, c))
        rhs = sp.laplacian(g, c)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1.0, np.max(np.abs(rhs)))


class TestDealias:
    def test_idempotent_and_noop_on_truncated(self):
        g = sp.make_grid(12, 1.0)
        c = sp.forward_transform(g, random_real(12, 1))
        once = sp.dealias(g, c)
        assert np.array_equal(sp.dealias(g, once), once)

    def test_noise_on_n8(self):
        g = sp.make_grid(8, 1.0)
        c = sp.dealias(g, sp.forward_transform(g, random_real(8, 2)))
        high = (np.abs(g.k[0]) >= 3) | (np.abs(g.k[1]) >= 3)
        assert np.all(c[high] == 0)
        assert np.all(c[~high] != 0)

    @given(sizes, seeds)
    def test_never_increases_energy(self, n, seed):
        g = sp.make_grid(n, 1.0)
        c = sp.forward_transform(g, random_real(n, seed))
        assert sp.parseval_energy(g, sp.dealias(g, c)) <= sp.parseval_energy(g, c)


class TestLeray:
    def test_gradient_field_is_annihilated(self):
        g = sp.make_grid(16, 2.0)
        x, _ = g.coords()
        q = sp.forward_transform(g, np.sin(math.pi * x))
        out = sp.leray_project(g, sp.gradient(g, q))
        assert np.max(np.abs(out)) <= 1e-14

    def test_solenoidal_field_unchanged(self):
        g = sp.make_grid(16, 2 * math.pi)
        psi = sp.dealias(g, sp.forward_transform(g, random_real(16, 5)))
        gp = sp.gradient(g, psi)
        v = np.stack([-gp[1], gp[0]])
        assert np.max(np.abs(sp.leray_project(g, v) - v)) <= 1e-12 * np.max(np.abs(v))

    def test_mean_mode_passes_through(self):
        g = sp.make_grid(8, 1.0)
        v = np.zeros((2,) + g.shape, complex)
        v[:, 0, 0] = (1.5, -0.5)
        assert np.array_equal(sp.leray_project(g, v)[:, 0, 0], v[:, 0, 0])

    @given(sizes, seeds)
    def test_idempotent_and_divergence_free(self, n, seed):
        g = sp.make_grid(n, 3.0)
        v = sp.forward_transform(g, random_real(n, seed, components=2))
        p1 = sp.leray_project(g, v)
        p2 = sp.leray_project(g, p1)
        scale = np.max(np.abs(p1))
        assert np.max(np.abs(p2 - p1)) <= 1e-12 * scale
        mag = np.sqrt(np.sum(np.abs(p1) ** 2, axis=0))
        div = np.abs(g.xi[0] * p1[0] + g.xi[1] * p1[1])
        assert np.all(div <= 1e-12 * mag * np.sqrt(g.xi2) + 1e-300)

    @given(seeds)
    def test_annihilates_gradients(self, seed):
        g = sp.make_grid(16, 1.0)
        q = sp.forward_transform(g, random_real(16, seed))
        assert np.max(np.abs(sp.leray_project(g, sp.gradient(g, q)))) <= 1e-12 * np.max(np.abs(q)) * 16


class TestParseval:
    def test_sine_half_area(self):
        L = 3.0
        g = sp.make_grid(16, L)
        x, _ = g.coords()
        e = sp.parseval_energy(g, sp.forward_transform(g, np.sin(2 * math.pi * x / L)))
        assert e == pytest.approx(L ** 2 / 2, rel=1e-14)

    def test_zero(self):
        g = sp.make_grid(8, 1.0)
        assert sp.parseval_energy(g, np.zeros(g.shape)) == 0.0

    @given(sizes, seeds, lengths)
    def test_matches_physical_quadrature(self, n, seed, length):
        g = sp.make_grid(n, length)
        f = random_real(n, seed)
        quad = np.sum(f ** 2) * g.dx ** 2
        assert sp.parseval_energy(g, sp.forward_transform(g, f)) == pytest.approx(quad, rel=1e-12)

    def test_continuum_factor(self):
        g = sp.make_grid(8, 4.0)
        assert sp.continuum_factor(g) == pytest.approx(16 / (2 * math.pi))


class TestShells:
    def test_shell_sum_preserves_total(self):
        g = sp.make_grid(16, 1.0)
        v = random_real(16, 9)
        assert np.sum(g.shell_sum(v)) == pytest.approx(np.sum(v))

    def test_shell_xi2_matches_modes(self):
        g = sp.make_grid(12, 2.0)
        assert np.allclose(g.shell_xi2[g.shell_index], g.xi2)
