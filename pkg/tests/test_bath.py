import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from floqspin import (BathParams, ConfigError, SingularityError,
                      bessel_j, bose_occupation,
                      floquet_solution, fourier_coefficients,
                      matrix_element_series, rate_prefactor, rates,
                      spectral_density)
from conftest import system


class TestSpectralDensity:
    def test_special_values(self, bath):
        assert spectral_density(0.0, bath) == 0.0
        assert spectral_density(bath.omega_c, bath) == pytest.approx(
            bath.gamma / (2.0 * bath.omega_c), rel=1e-15)
        assert spectral_density(-bath.omega_c, bath) == pytest.approx(
            -bath.gamma / (2.0 * bath.omega_c), rel=1e-15)

    @given(w=st.floats(min_value=1e-6, max_value=1e4))
    def test_odd_extension(self, w):
        bath = BathParams(gamma=0.02, omega_c=7.0, temperature=1.0)
        assert spectral_density(-w, bath) == -spectral_density(w, bath)


class TestBoseOccupation:
    def test_log2_point(self):
        assert bose_occupation(3.0 * math.log(2.0), 3.0) == pytest.approx(
            1.0, rel=1e-12)

    def test_high_frequency_limit(self):
        assert bose_occupation(1e4, 1.0) == pytest.approx(0.0, abs=1e-300)

    def test_zero_frequency_is_singular(self):
        with pytest.raises(SingularityError):
            bose_occupation(0.0, 1.0)
        with pytest.raises(SingularityError):
            bose_occupation(np.array([1.0, 0.0]), 1.0)

    def test_negative_frequency_continuation_identity(self):
        # Gamma(-w)[n_B(-w)+1] = Gamma(w) n_B(w), checked at w=1, T=3
        bath = BathParams(gamma=0.01, omega_c=10.0, temperature=3.0)
        lhs = spectral_density(-1.0, bath) * (bose_occupation(-1.0, 3.0) + 1.0)
        rhs = spectral_density(1.0, bath) * bose_occupation(1.0, 3.0)
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestRatePrefactor:
    def test_zero_frequency_limit(self, bath):
        limit = bath.gamma * bath.temperature / bath.omega_c ** 2
        assert rate_prefactor(0.0, bath) == limit
        for w in (1e-9, -1e-9):
            assert rate_prefactor(w, bath) == pytest.approx(limit, rel=1e-8)

    def test_positive_everywhere(self, bath):
        w = np.linspace(-200.0, 200.0, 4001)
        values = rate_prefactor(w, bath)
        assert np.isfinite(values).all()
        assert (values > 0.0).all()

    def test_no_cancellation_deep_in_the_absorption_tail(self, bath):
        # n_B+1 at w = -60*T is ~exp(-60); the naive 1/expm1(w/T)+1 loses it
        w = -60.0 * bath.temperature
        expected = spectral_density(-w, bath) * math.exp(w / bath.temperature)
        assert rate_prefactor(w, bath) == pytest.approx(expected, rel=1e-10)


class TestFourierCoefficients:
    def test_static_limit_table(self):
        sol = floquet_solution(system(h_z1=0.0), 2048)
        table = fourier_coefficients(sol, math.pi / 2, 3)
        assert table.a(0, 0, 0) == pytest.approx(-1.0, abs=1e-12)
        assert table.a(0, 1, 1) == pytest.approx(1.0, abs=1e-12)
        for n in range(-3, 4):
            for lam in range(2):
                for mu in range(2):
                    if n == 0 and lam == mu:
                        continue
                    assert abs(table.a(n, lam, mu)) < 1e-12

    def test_sideband_coefficients_track_j1_squared(self):
        omega = 40.0
        for z in (0.5, 1.0, 1.8):
            sol = floquet_solution(system(h_z1=z * omega), 2048)
            table = fourier_coefficients(sol, math.pi / 2, 3)
            a2_10 = abs(table.a(-1, 1, 0)) ** 2
            a2_01 = abs(table.a(-1, 0, 1)) ** 2
            assert a2_10 > a2_01  # the inversion mechanism
            j1sq = bessel_j(1, z) ** 2
            assert abs(a2_10 - j1sq) < 0.05
            assert abs(a2_01 - j1sq) < 0.05

    def test_generalized_parity_zero(self):
        omega = 40.0
        for z in (0.3, 1.0, 2.0, 4.0):
            sol = floquet_solution(system(h_z1=z * omega), 2048)
            table = fourier_coefficients(sol, math.pi / 2, 3)
            assert abs(table.a(0, 1, 0)) < 1e-8

    def test_conjugate_symmetry(self):
        sol = floquet_solution(system(h_z1=60.0, h_z0=0.2, theta=1.1), 2048)
        table = fourier_coefficients(sol, 1.1, 4)
        for n in range(-4, 5):
            for lam in range(2):
                for mu in range(2):
                    assert table.a(n, lam, mu) == pytest.approx(
                        np.conj(table.a(-n, mu, lam)), abs=1e-10)

    def test_parseval(self):
        sol = floquet_solution(system(h_z1=90.0, theta=0.7), 2048)
        series = matrix_element_series(sol, 0.7)
        spectrum = np.fft.fft(series, axis=0) / sol.n_steps
        lhs = (np.abs(spectrum) ** 2).sum(axis=0)
        rhs = (np.abs(series) ** 2).mean(axis=0)
        assert np.abs(lhs - rhs).max() <= 1e-10

    def test_theta_linearity(self):
        sol = floquet_solution(system(h_z1=70.0), 2048)
        a_x = fourier_coefficients(sol, math.pi / 2, 3).coefficients
        a_z = fourier_coefficients(sol, 0.0, 3).coefficients
        a_mix = fourier_coefficients(sol, math.pi / 4, 3).coefficients
        assert np.abs(a_mix - (a_x + a_z) / math.sqrt(2.0)).max() <= 1e-10

    def test_window_validation(self):
        sol = floquet_solution(system(h_z1=10.0), 128)
        with pytest.raises(ConfigError):
            fourier_coefficients(sol, 0.0, 33)  # > 128/4
        with pytest.raises(ConfigError):
            fourier_coefficients(sol, 0.0, -1)

    def test_index_bounds(self):
        sol = floquet_solution(system(h_z1=10.0), 256)
        table = fourier_coefficients(sol, 0.0, 2)
        with pytest.raises(ConfigError):
            table.a(3, 0, 0)


class TestRates:
    def test_static_detailed_balance_ratio(self, bath):
        sol = floquet_solution(system(theta=math.pi / 4, h_z1=0.0), 2048)
        table = rates(fourier_coefficients(sol, math.pi / 4, 3), bath, sol)
        ratio = table.rate(0, 0, 1) / table.rate(0, 1, 0)
        assert ratio == pytest.approx(math.exp(1.0 / 3.0), rel=1e-10)

    def test_detailed_balance_random_points(self):
        rng = np.random.default_rng(3)
        for _ in range(8):
            p = system(theta=float(rng.uniform(0.2, 2.9)),
                       h_z1=float(rng.uniform(0.0, 120.0)),
                       h_z0=float(rng.uniform(0.05, 0.4)),
                       omega=float(rng.uniform(10.0, 55.0)))
            bath = BathParams(gamma=0.01,
                              omega_c=float(rng.uniform(2.0, 20.0)),
                              temperature=float(rng.uniform(0.5, 5.0)))
            sol = floquet_solution(p, 2048)
            table = rates(fourier_coefficients(sol, p.theta, 3), bath, sol)
            for n in range(-3, 4):
                for lam in range(2):
                    for mu in range(2):
                        half = table.gap_energy(n, lam, mu) / \
                            (2.0 * bath.temperature)
                        lhs = table.rate(n, lam, mu) * math.exp(-half)
                        rhs = table.rate(-n, mu, lam) * math.exp(half)
                        big = max(lhs, rhs)
                        if big > 0.0:
                            assert abs(lhs - rhs) / big <= 1e-8

    def test_rates_finite_and_nonnegative(self, bath):
        sol = floquet_solution(system(h_z1=90.0, h_z0=0.1, theta=0.9), 2048)
        table = rates(fourier_coefficients(sol, 0.9, 3), bath, sol)
        assert np.isfinite(table.rates).all()
        assert (table.rates >= 0.0).all()

    def test_positive_shift_channels_suppressed(self, bath):
        # omega=40, T=3: n_B(omega) ~ exp(-40/3)
        sol = floquet_solution(system(h_z1=40.0), 2048)
        table = rates(fourier_coefficients(sol, math.pi / 2, 3), bath, sol)
        up = table.rates[table.n_max + 1:].sum()
        assert up / table.rates.sum() < 1e-4

    def test_gamma_linearity_is_exact(self, bath):
        sol = floquet_solution(system(h_z1=50.0, theta=1.0), 2048)
        coeffs = fourier_coefficients(sol, 1.0, 3)
        doubled = bath.replace(gamma=2.0 * bath.gamma)
        assert np.array_equal(2.0 * rates(coeffs, bath, sol).rates,
                              rates(coeffs, doubled, sol).rates)

    def test_solution_mismatch_rejected(self, bath):
        sol_a = floquet_solution(system(h_z1=50.0), 2048)
        sol_b = floquet_solution(system(h_z1=60.0), 2048)
        table = fourier_coefficients(sol_a, 0.5, 3)
        with pytest.raises(ConfigError):
            rates(table, bath, sol_b)

    def test_rate_accessors_require_fill(self, bath):
        sol = floquet_solution(system(h_z1=50.0), 2048)
        table = fourier_coefficients(sol, 0.5, 3)
        assert not table.rates_filled
        with pytest.raises(ConfigError):
            table.rate(0, 0, 1)
        with pytest.raises(ConfigError):
            table.total(0, 1)
        assert rates(table, bath, sol).rates_filled
