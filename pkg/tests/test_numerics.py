import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from thermal_repeller.errors import (BracketingError, ConfigError, ConvergenceError,
                                     DomainError, IntegrationError)
from thermal_repeller.model import DimensionlessConfig
from thermal_repeller.numerics import (Tolerances, erf, erfc, find_root, gauss_hermite,
                                       integrate_panels, integrate_time_tail, sinhc, solve_ivp)
from thermal_repeller.packet import width


class TestErfc:
    def test_zero(self):
        assert erfc(0.0) == 1.0

    def test_one(self):
        # 30-digit value from mpmath
        assert erfc(1.0) == pytest.approx(0.157299207050285130658779364917, rel=1e-13)

    def test_reflection_at_five(self):
        assert abs(erfc(5.0) + erfc(-5.0) - 2.0) <= 1e-15

    def test_reflection_dense(self):
        x = np.linspace(-6, 6, 10_000)
        assert np.max(np.abs(erfc(x) + erfc(-x) - 2.0)) <= 1e-14

    def test_against_mpmath_far_tail(self):
        mpmath = pytest.importorskip("mpmath")
        for x in (3.0, 8.5, 15.0, 26.0):
            ref = float(mpmath.erfc(x))
            assert erfc(x) == pytest.approx(ref, rel=1e-13)

    @given(st.floats(-26.0, 26.0))
    def test_relative_error_against_scipy(self, x):
        ref = special.erfc(x)
        assert abs(erfc(x) - ref) <= 1e-13 * ref

    def test_erf_complement(self):
        x = np.linspace(-3, 3, 61)
        np.testing.assert_allclose(erf(x) + erfc(x), 1.0, atol=1e-15)

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_non_finite_rejected(self, bad):
        with pytest.raises(DomainError):
            erfc(bad)


class TestGaussHermite:
    def test_two_point_rule(self):
        rule = gauss_hermite(2)
        np.testing.assert_allclose(rule.nodes, [-1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15)
        np.testing.assert_allclose(rule.weights, [math.sqrt(math.pi) / 2] * 2, rtol=1e-14)

    def test_second_moment(self):
        rule = gauss_hermite(64)
        assert rule.apply(rule.nodes**2) == pytest.approx(math.sqrt(math.pi) / 2, abs=1e-12)

    def test_fourth_moment(self):
        rule = gauss_hermite(64)
        assert rule.apply(rule.nodes**4) == pytest.approx(0.75 * math.sqrt(math.pi), abs=1e-12)

    @pytest.mark.parametrize("n", [2, 5, 16, 64, 128, 256])
    def test_weight_sum_and_ordering(self, n):
        rule = gauss_hermite(n)
        assert rule.weights.sum() == pytest.approx(math.sqrt(math.pi), abs=1e-13)
        assert np.all(np.diff(rule.nodes) > 0)
        assert np.all(rule.weights > 0)

    @pytest.mark.parametrize("n", [3, 8, 20])
    def test_exact_up_to_degree_2n_minus_1(self, n):
        rule = gauss_hermite(n)
        for k in range(0, 2 * n, 2):
            exact = math.gamma((k + 1) / 2)
            assert rule.apply(rule.nodes**k) == pytest.approx(exact, rel=1e-12)
        for k in range(1, 2 * n, 2):
            assert abs(rule.apply(rule.nodes**k)) < 1e-12 * math.gamma(k / 2 + 1)

    @pytest.mark.parametrize("n", [0, 1, 257])
    def test_out_of_range(self, n):
        with pytest.raises(ConfigError):
            gauss_hermite(n)


class TestTailIntegral:
    def test_exponential(self):
        assert integrate_time_tail(lambda t: np.exp(-t)) == pytest.approx(1.0, abs=1e-9)

    def test_gaussian_moment(self):
        assert integrate_time_tail(lambda t: t * np.exp(-t * t)) == pytest.approx(0.5, abs=1e-9)

    def test_late_bump(self):
        f = lambda t: np.exp(-0.5 * ((t - 30) / 2) ** 2) / (2 * math.sqrt(2 * math.pi))  # noqa: E731
        assert integrate_time_tail(f) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("window", [5.0, 20.0])
    def test_window_invariance(self, window):
        f = lambda t: t**2 * np.exp(-0.3 * t)  # noqa: E731
        ref = integrate_time_tail(f, window=10.0)
        assert integrate_time_tail(f, window=window) == pytest.approx(ref, rel=1e-9)

    def test_no_decay_is_convergence_error(self):
        with pytest.raises(ConvergenceError) as info:
            integrate_time_tail(lambda t: np.ones_like(t), t_max=100.0)
        # whole windows only: the partial value is the length integrated so far
        assert 0.0 < info.value.partial <= 100.0
        assert info.value.partial == pytest.approx(round(info.value.partial, 6), abs=1e-6)

    def test_window_cap(self):
        with pytest.raises(ConvergenceError):
            integrate_time_tail(lambda t: 1.0 / (1.0 + t), max_windows=5)

    def test_panels_polynomial(self):
        assert integrate_panels(lambda t: t**3, 0.0, 2.0) == pytest.approx(4.0, rel=1e-12)


class TestSolveIvp:
    def test_exponential_decay(self):
        sol = solve_ivp(lambda t, y: -y, [1.0], [0.0, 1.0])
        assert sol(1.0)[0] == pytest.approx(math.exp(-1.0), abs=1e-9)

    def test_oscillator_energy(self):
        sol = solve_ivp(lambda t, y: np.array([y[1], -y[0]]), [1.0, 0.0], [0.0, 100.0])
        y = np.array([np.ravel(sol(t)) for t in np.linspace(0, 100, 501)])
        energy = 0.5 * (y[:, 0] ** 2 + y[:, 1] ** 2)
        assert np.max(np.abs(energy - 0.5)) / 0.5 <= 1e-6

    def test_interpolant_matches_grid(self):
        sol = solve_ivp(lambda t, y: np.array([y[1], -y[0]]), [1.0, 0.0], [0.0, 10.0])
        for t, state in zip(sol.t_grid, sol.states):
            np.testing.assert_allclose(np.ravel(sol(t)), state, rtol=1e-12, atol=1e-15)

    def test_no_extrapolation(self):
        sol = solve_ivp(lambda t, y: -y, [1.0], [0.0, 1.0])
        with pytest.raises(DomainError):
            sol(1.5)

    @pytest.mark.parametrize("rel", [1e-5, 1e-6, 1e-7, 1e-8])
    def test_tolerance_halving_reduces_error(self, rel):
        def err(r):
            sol = solve_ivp(lambda t, y: np.array([y[1], -y[0]]), [1.0, 0.0], [0.0, 50.0],
                            Tolerances(rel=r, abs=r * 1e-3))
            return abs(np.ravel(sol(50.0))[0] - math.cos(50.0))

        assert err(rel / 2) <= err(rel) / 2

    def test_pinney_matches_conservative_width(self):
        t = np.linspace(0, 40, 801)
        kostin = width(DimensionlessConfig(omega=0.1, model="kostin"))(t)
        exact = width(DimensionlessConfig(omega=0.1, model="conservative-parabolic"))(t)
        np.testing.assert_allclose(kostin, exact, atol=1e-8 * np.max(exact), rtol=1e-8)

    def test_singularity_reports_time(self):
        with pytest.raises(IntegrationError) as info:
            solve_ivp(lambda t, y: y**2, [1.0], [0.0, 2.0])
        assert 0.9 < info.value.t_fail <= 1.0 + 1e-6

    def test_bad_span(self):
        with pytest.raises(ConfigError):
            solve_ivp(lambda t, y: -y, [1.0], [1.0, 0.0])


class TestSinhc:
    def test_zero(self):
        assert sinhc(0.0) == 1.0

    def test_series_region(self):
        assert abs(sinhc(1e-6) - (1 + 1e-12 / 6)) <= 1e-18

    def test_two(self):
        assert sinhc(2.0) == pytest.approx(math.sinh(2.0) / 2.0, rel=1e-15)
        assert sinhc(2.0) == pytest.approx(1.81343, abs=1e-5)

    @settings(max_examples=200)
    @given(st.floats(-50.0, 50.0))
    def test_matches_direct_away_from_zero(self, x):
        if abs(x) > 1e-3:
            assert sinhc(x) == pytest.approx(math.sinh(x) / x, rel=1e-13)

    def test_continuity_at_switch(self):
        assert sinhc(1e-4 * (1 - 1e-12)) == pytest.approx(sinhc(1e-4 * (1 + 1e-12)), rel=1e-15)


class TestFindRoot:
    def test_sqrt_two(self):
        assert find_root(lambda x: x * x - 2, (1, 2)) == pytest.approx(math.sqrt(2), abs=1e-12)

    def test_inverse_erfc(self):
        # independent bisection reference
        lo, hi = 1.0, 3.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if special.erfc(mid) > 0.02 else (lo, mid)
        root = find_root(lambda x: float(erfc(x)) - 0.02, (1, 3))
        assert root == pytest.approx(0.5 * (lo + hi), abs=1e-9)
        assert root == pytest.approx(1.64498, abs=1e-5)

    def test_cosine(self):
        assert find_root(math.cos, (1, 2)) == pytest.approx(math.pi / 2, abs=1e-12)

    def test_no_sign_change(self):
        with pytest.raises(BracketingError):
            find_root(lambda x: x * x + 1, (-1, 1))


class TestTolerances:
    @pytest.mark.parametrize("kw", [{"rel": 0.0}, {"rel": 1.0}, {"abs": -1.0},
                                    {"t_tail_cutoff": np.nan}])
    def test_invalid(self, kw):
        with pytest.raises(ConfigError):
            Tolerances(**kw)
