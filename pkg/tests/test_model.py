import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from thermal_repeller.errors import ConfigError
from thermal_repeller.model import (ANGSTROM, ELECTRON_MASS, HBAR, K_B, DimensionlessConfig,
                                    PhysicalParams, Scales, check_scattering,
                                    physical_from_config, reduce, restore)
from thermal_repeller.packet import center, width

SIGMA0 = 0.4 * ANGSTROM


@pytest.fixture
def scales():
    return Scales.from_mass_width(ELECTRON_MASS, SIGMA0)


def test_electron_reference_center(scales):
    _, cfg = reduce(PhysicalParams(ELECTRON_MASS, SIGMA0, x0=-20 * SIGMA0))
    assert cfg.x0 == pytest.approx(-20.0, rel=1e-15)


def test_free_case_omega_zero(scales):
    gamma = 0.3 / scales.time
    _, cfg = reduce(PhysicalParams(ELECTRON_MASS, SIGMA0, x0=-20 * SIGMA0, gamma=gamma))
    assert cfg.omega == 0.0
    assert cfg.Omega == pytest.approx(cfg.gamma / 2, rel=1e-15)


def test_unit_temperature(scales):
    _, cfg = reduce(PhysicalParams(ELECTRON_MASS, SIGMA0, x0=-20 * SIGMA0,
                                   temperature=scales.temperature))
    assert cfg.T == pytest.approx(1.0, rel=1e-15)


def test_scale_definitions(scales):
    assert scales.time == pytest.approx(2 * ELECTRON_MASS * SIGMA0**2 / HBAR, rel=1e-15)
    assert scales.time * scales.frequency == 1.0
    assert scales.temperature == pytest.approx(HBAR**2 / (4 * ELECTRON_MASS * SIGMA0**2 * K_B))
    assert scales.velocity == pytest.approx(SIGMA0 / scales.time)


def test_thermal_energy_matches_reduced_variance(scales):
    # k_B T / m in reduced velocity units is T-bar, so <v^2> = T-bar
    T = 3.7 * scales.temperature
    v2 = K_B * T / ELECTRON_MASS / scales.velocity**2
    assert v2 == pytest.approx(3.7, rel=1e-14)


@pytest.mark.parametrize("kind, factor", [("time", "time"), ("length", "length"),
                                          ("velocity", "velocity"),
                                          ("temperature", "temperature"),
                                          ("frequency", "frequency")])
def test_restore_multiplies_by_scale(scales, kind, factor):
    assert restore(scales, 1.0, kind) == getattr(scales, factor)


def test_restore_examples(scales):
    assert restore(scales, 1.0, "time") == scales.time
    assert restore(scales, -20.0, "length") == pytest.approx(-20 * SIGMA0, rel=1e-15)
    assert restore(scales, 0.37, "probability") == 0.37


def test_restore_unknown_kind(scales):
    with pytest.raises(ConfigError):
        restore(scales, 1.0, "energy")


@given(x0=st.floats(-100, -3), omega=st.floats(0, 1), gamma=st.floats(0, 1),
       T=st.floats(0, 50), v0=st.floats(-5, 5), K=st.floats(-1, 1))
def test_round_trip(x0, omega, gamma, T, v0, K):
    s = Scales.from_mass_width(ELECTRON_MASS, SIGMA0)
    cfg = DimensionlessConfig(x0=x0, omega=omega, gamma=gamma, T=T, v0=v0, K=K)
    _, back = reduce(physical_from_config(s, cfg))
    for name in ("x0", "omega", "gamma", "T", "v0", "K"):
        assert getattr(back, name) == pytest.approx(getattr(cfg, name), rel=1e-14, abs=1e-300)


def test_scale_invariance_of_reduced_results():
    a = PhysicalParams(ELECTRON_MASS, SIGMA0, x0=-20 * SIGMA0, omega=1e14, gamma=2e13,
                       temperature=30.0)
    sa, ca = reduce(a)
    sb = Scales.from_mass_width(ELECTRON_MASS, 2 * SIGMA0)
    b = physical_from_config(sb, ca)
    _, cb = reduce(b)
    t = np.linspace(0, 60, 13)
    np.testing.assert_allclose(center(cb, t), center(ca, t), rtol=1e-13)
    np.testing.assert_allclose(width(cb)(t), width(ca)(t), rtol=1e-13)


def test_linear_force_normalisation():
    cfg = DimensionlessConfig(x0=-20, omega=0, K=0.3, model="conservative-linear")
    x, v = center(cfg, 4.0)
    assert float(x) == pytest.approx(-20 - 0.3 * 16 / 2, rel=1e-14)
    assert float(v) == pytest.approx(-0.3 * 4, rel=1e-14)


@given(st.floats(0, 10), st.floats(0, 10))
def test_omega_cache(omega, gamma):
    cfg = DimensionlessConfig(omega=omega, gamma=gamma)
    assert cfg.Omega**2 == pytest.approx(omega**2 + gamma**2 / 4, rel=1e-15, abs=1e-300)


class TestValidation:
    @pytest.mark.parametrize("kw", [{"mass": 0.0}, {"sigma0": -1.0}, {"omega": -1.0},
                                    {"gamma": -1.0}, {"temperature": -1.0},
                                    {"x0": math.inf}])
    def test_physical(self, kw):
        base = dict(mass=ELECTRON_MASS, sigma0=SIGMA0, x0=-20 * SIGMA0)
        base.update(kw)
        with pytest.raises(ConfigError):
            PhysicalParams(**base)

    @pytest.mark.parametrize("kw", [{"omega": -0.1}, {"gamma": -0.1}, {"T": -1},
                                    {"x0": math.nan}, {"model": "lindblad"},
                                    {"model": "conservative-parabolic", "gamma": 0.1},
                                    {"model": "conservative-free", "omega": 0.1},
                                    {"model": "conservative-free", "omega": 0, "K": 1.0}])
    def test_dimensionless(self, kw):
        with pytest.raises(ConfigError):
            DimensionlessConfig(**kw)

    def test_config_error_is_value_error(self):
        with pytest.raises(ValueError):
            DimensionlessConfig(T=-1)

    def test_overlapping_packet_warns(self):
        with pytest.warns(UserWarning, match="overlaps the barrier"):
            check_scattering(DimensionlessConfig(x0=-1.0))

    def test_separated_packet_silent(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            check_scattering(DimensionlessConfig(x0=-20.0))

    def test_replace(self):
        cfg = DimensionlessConfig(gamma=0.1)
        assert cfg.replace(gamma=0.2).Omega == pytest.approx(math.hypot(0.05, 0.1))
