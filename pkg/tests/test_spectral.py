import math

import numpy as np
import pytest
from scipy.integrate import quad

from gaussnm import (
    EnvironmentSpec,
    build_coefficients,
    coefficients_from_functions,
    delta_coefficient,
    delta_thermal,
    delta_zero_temperature,
    divisibility_check,
    gamma_coefficient,
    settle_horizon,
    spectral_density,
    write_coefficients_csv,
)

ENV_REF = EnvironmentSpec(omega0=1.0, omega_c=0.2, temperature=0.2)


def brute_force_gamma(t, env, pieces=400):
    """2-d quadrature of the damping integrand, omega truncated at e^-12 decay."""
    wmax = env.omega_c * math.log(1e12)

    def inner(s):
        val, _ = quad(lambda w: w * np.exp(-w / env.omega_c) * np.sin(w * s),
                      0.0, wmax, limit=pieces)
        return val * np.sin(env.omega0 * s)

    val, _ = quad(inner, 0.0, t, limit=pieces)
    return val


def brute_force_delta(t, env, pieces=400):
    wmax = max(env.omega_c, env.temperature) * math.log(1e12) + 10 * max(
        env.omega_c, env.temperature)

    def occupancy(w):
        if env.temperature == 0.0:
            return 0.5
        return 1.0 / math.expm1(w / env.temperature) + 0.5

    def inner(s):
        val, _ = quad(
            lambda w: w * np.exp(-w / env.omega_c) * occupancy(w) * np.cos(w * s),
            0.0, wmax, limit=pieces)
        return val * np.cos(env.omega0 * s)

    val, _ = quad(inner, 0.0, t, limit=pieces)
    return val


class TestSpectralDensity:
    def test_zero_at_origin(self):
        assert spectral_density(0.0, ENV_REF) == 0.0

    def test_maximum_at_cutoff(self):
        env = EnvironmentSpec(omega0=1.0, omega_c=1.0)
        assert spectral_density(1.0, env) == pytest.approx(1.0 / math.e, rel=1e-14)
        grid = np.linspace(0.0, 10.0, 2001)
        vals = spectral_density(grid, env)
        assert grid[np.argmax(vals)] == pytest.approx(1.0, abs=0.01)

    def test_direct_value(self):
        env = EnvironmentSpec(omega0=1.0, omega_c=1.0)
        assert spectral_density(2.0, env) == pytest.approx(2.0 * math.exp(-2.0),
                                                           rel=1e-14)

    def test_negative_frequency_rejected(self):
        with pytest.raises(ValueError):
            spectral_density(-0.1, ENV_REF)


class TestCoefficients:
    def test_zero_time(self):
        assert gamma_coefficient(0.0, ENV_REF) == 0.0
        assert delta_coefficient(0.0, ENV_REF) == 0.0

    def test_gamma_temperature_independent(self):
        env_cold = EnvironmentSpec(omega0=1.0, omega_c=0.2, temperature=0.0)
        env_hot = EnvironmentSpec(omega0=1.0, omega_c=0.2, temperature=10.0)
        for t in (0.5, 2.0, 7.0):
            assert gamma_coefficient(t, env_cold) == gamma_coefficient(t, env_hot)

    def test_gamma_against_brute_force(self):
        env = EnvironmentSpec(omega0=1.0, omega_c=0.2)
        t = 5.0
        semi = gamma_coefficient(t, env)
        brute = brute_force_gamma(t, env)
        assert semi == pytest.approx(brute, rel=1e-6)

    def test_delta_is_zero_point_part_at_t0(self):
        env = EnvironmentSpec(omega0=1.0, omega_c=0.2, temperature=0.0)
        for t in (1.0, 4.0):
            assert delta_thermal(t, env) == 0.0
            assert delta_coefficient(t, env) == delta_zero_temperature(t, env)

    def test_delta_against_brute_force(self):
        t = 4.0
        semi = delta_coefficient(t, ENV_REF)
        brute = brute_force_delta(t, ENV_REF)
        assert semi == pytest.approx(brute, rel=1e-6)

    def test_semi_analytic_vs_brute_force_sample(self):
        # 20-point (t, env) sample across frequency/temperature regimes
        sample = [
            (t, EnvironmentSpec(omega0=w0, omega_c=wc, temperature=tt))
            for t in (1.0, 3.0, 8.0, 15.0)
            for (w0, wc, tt) in [(1.0, 0.2, 0.2), (4.0, 1.0, 0.0),
                                 (1.0, 1.0, 1.0), (6.0, 1.0, 4.0),
                                 (1.0, 0.3, 0.5)]
        ][:20]
        for t, env in sample:
            g = gamma_coefficient(t, env)
            d = delta_coefficient(t, env)
            gb = brute_force_gamma(t, env)
            db = brute_force_delta(t, env)
            scale_g = max(abs(gb), 1e-3)
            scale_d = max(abs(db), 1e-3)
            assert abs(g - gb) / scale_g <= 1e-6
            assert abs(d - db) / scale_d <= 1e-6

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            gamma_coefficient(-1.0, ENV_REF)
        with pytest.raises(ValueError):
            delta_coefficient(-1.0, ENV_REF)

    def test_high_temperature_linearity(self):
        # thermal part doubles with T once k_B T dominates every energy scale
        env1 = EnvironmentSpec(omega0=1.0, omega_c=1.0, temperature=40.0)
        env2 = EnvironmentSpec(omega0=1.0, omega_c=1.0, temperature=80.0)
        for t in (0.8, 1.6, 3.0):
            d1 = delta_thermal(t, env1)
            d2 = delta_thermal(t, env2)
            assert abs(d1) > 1.0  # away from zero crossings
            assert abs(d2 / d1 - 2.0) <= 0.02

    def test_low_temperature_insensitivity(self):
        env0 = EnvironmentSpec(omega0=1.0, omega_c=1.0, temperature=0.0)
        env = EnvironmentSpec(omega0=1.0, omega_c=1.0, temperature=1.0 / 20.0)
        ts = np.linspace(0.2, 8.0, 12)
        d0 = np.array([delta_zero_temperature(t, env0) for t in ts])
        d = np.array([delta_coefficient(t, env) for t in ts])
        assert np.max(np.abs(d - d0)) <= 0.05 * np.max(np.abs(d0))


class TestTables:
    def test_constant_stub_cumulative(self):
        g0 = 0.7
        table = coefficients_from_functions(lambda t: g0, lambda t: 0.0,
                                            alpha=0.3, t_end=5.0, n_steps=500)
        expected = 2.0 * 0.3 * g0 * table.times
        assert np.max(np.abs(table.x - expected)) <= 1e-10
        assert table.x[0] == 0.0 and table.y[0] == 0.0

    def test_smooth_stub_richardson(self):
        # halving the step changes the cumulative integral below 1e-8 relative
        table1 = coefficients_from_functions(np.sin, np.cos, alpha=0.5,
                                             t_end=10.0, n_steps=2000)
        table2 = coefficients_from_functions(np.sin, np.cos, alpha=0.5,
                                             t_end=10.0, n_steps=4000)
        rel = abs(table1.x[-1] - table2.x[-1]) / abs(table2.x[-1])
        assert rel <= 1e-8

    def test_build_coefficients_matches_point_evaluations(self):
        table = build_coefficients(ENV_REF, alpha=0.05, t_end=10.0, n_steps=500)
        for idx in (50, 200, 450):
            t = table.times[idx]
            assert table.gamma[idx] == pytest.approx(
                gamma_coefficient(t, ENV_REF), abs=1e-8)
            assert table.delta[idx] == pytest.approx(
                delta_coefficient(t, ENV_REF), abs=1e-8)

    def test_continuity(self):
        # adjacent-sample differences shrink like O(h): halving the step
        # halves the largest jump (no quadrature-induced discontinuities)
        coarse = build_coefficients(ENV_REF, alpha=0.05, t_end=20.0, n_steps=500)
        fine = build_coefficients(ENV_REF, alpha=0.05, t_end=20.0, n_steps=1000)
        for arr_c, arr_f in ((coarse.gamma, fine.gamma),
                             (coarse.delta, fine.delta)):
            ratio = np.max(np.abs(np.diff(arr_f))) / np.max(np.abs(np.diff(arr_c)))
            assert 0.3 <= ratio <= 0.7

    def test_invalid_grid_rejected(self):
        with pytest.raises(ValueError):
            build_coefficients(ENV_REF, alpha=0.05, t_end=-1.0, n_steps=100)
        with pytest.raises(ValueError):
            build_coefficients(ENV_REF, alpha=0.05, t_end=1.0, n_steps=1)

    def test_csv_export(self, tmp_path):
        table = coefficients_from_functions(lambda t: 1.0, lambda t: 0.5,
                                            alpha=0.1, t_end=1.0, n_steps=4)
        path = tmp_path / "coeffs.csv"
        write_coefficients_csv(table, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,gamma,delta,x,y"
        assert len(lines) == 6
        first = lines[1].split(",")
        assert float(first[0]) == 0.0 and float(first[3]) == 0.0


class TestDivisibility:
    def test_pure_diffusion_is_divisible(self):
        table = coefficients_from_functions(lambda t: 0.0, lambda t: 1.0,
                                            alpha=0.1, t_end=5.0, n_steps=100)
        assert divisibility_check(table) == []

    def test_pure_damping_violates_everywhere(self):
        table = coefficients_from_functions(lambda t: 1.0, lambda t: 0.0,
                                            alpha=0.1, t_end=5.0, n_steps=100)
        intervals = divisibility_check(table)
        assert len(intervals) == 1
        lo, hi = intervals[0]
        assert lo == 0.0 and hi == 5.0

    def test_reference_environment_not_divisible(self):
        table = build_coefficients(ENV_REF, alpha=0.05, t_end=20.0, n_steps=800)
        assert divisibility_check(table) != []
        assert table.delta.min() < 0.0

    def test_resonant_hot_environment_divisible(self):
        env = EnvironmentSpec(omega0=1.0, omega_c=1.0, temperature=4.0)
        table = build_coefficients(env, alpha=0.05, t_end=30.0, n_steps=900)
        assert divisibility_check(table) == []


def test_quadrature_error_carries_estimate():
    from gaussnm import QuadratureError

    err = QuadratureError("inner integral", 3.2e-7)
    assert err.estimate == 3.2e-7
    assert "3.2" in str(err)


def test_settle_horizon_reference_env():
    t_end = settle_horizon(ENV_REF, rel_tol=1e-2, t_start=20.0, t_cap=160.0)
    assert 20.0 <= t_end <= 160.0
    table = build_coefficients(ENV_REF, alpha=1.0, t_end=t_end, n_steps=400)
    tail = table.times >= 0.9 * t_end
    drift = np.max(np.abs(table.delta[tail] - table.delta[-1]))
    assert drift <= 1e-2 * np.max(np.abs(table.delta))
