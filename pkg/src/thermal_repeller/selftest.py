"""Oracle-equivalence checks run by ``thermal-repeller selftest``.

Each check computes a maximum deviation between a production route and an
independent one (see :mod:`thermal_repeller.oracles`) and compares it with
a tolerance. The set is a fast subset of the test suite, meant for
verifying an installation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from . import oracles
from .model import DimensionlessConfig
from .numerics import erfc, gauss_hermite
from .packet import momentum_distribution_free, packet_state, width
from .packet import current as pure_current
from .packet import density as pure_density
from .thermal import make_ensemble, thermal_current, thermal_density, thermal_q
from .times import dwell_time, split_times
from .transmission import p_tr_thermal, stationary_component
from .trajectories import count_transmission, critical_initial_position

__all__ = ["Check", "CheckResult", "CHECKS", "run_checks"]


@dataclass(frozen=True)
class Check:
    name: str
    family: str
    tolerance: float
    deviation: Callable[[], float]


@dataclass(frozen=True)
class CheckResult:
    check: Check
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.deviation <= self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status}  {self.check.name:<34s} [{self.check.family}]  "
                f"max_dev={self.deviation:.3e}  tol={self.tolerance:.1e}")


def _erfc_reference() -> float:
    x = np.linspace(-6.0, 6.0, 2001)
    rel = np.abs(erfc(x) - special.erfc(x)) / special.erfc(x)
    return float(max(rel.max(), abs(erfc(1.0) - 0.15729920705028513) / 0.15729920705028513))


def _hermite_moments() -> float:
    rule = gauss_hermite(64)
    exact = {0: np.sqrt(np.pi), 2: np.sqrt(np.pi) / 2, 4: 3 * np.sqrt(np.pi) / 4,
             6: 15 * np.sqrt(np.pi) / 8}
    return max(abs(rule.apply(rule.nodes**k) - v) / v for k, v in exact.items())


def _pinney_frictionless() -> float:
    t = np.linspace(0.0, 40.0, 2001)
    dev = 0.0
    for omega in (0.05, 0.1):
        kostin = width(DimensionlessConfig(omega=omega, model="kostin"))
        exact = width(DimensionlessConfig(omega=omega, model="conservative-parabolic"))
        dev = max(dev, float(np.max(np.abs(kostin(t) - exact(t)))))
    return dev


def _pinney_rk4() -> float:
    cfg = DimensionlessConfig(omega=0.05, gamma=0.1, model="kostin")
    s, _ = width(cfg).evaluate(20.0)
    ref, _ = oracles.pinney_rk4(0.1, 0.05, 20.0)
    return abs(s - ref) / ref


def _mixture_grid():
    rng = np.random.default_rng(7)
    for model, gamma in (("ck", 0.05), ("kostin", 0.05), ("conservative-parabolic", 0.0)):
        for T in (0.5, 3.0):
            cfg = DimensionlessConfig(omega=0.05, gamma=gamma, T=T, model=model)
            yield cfg, rng.uniform(-40, 40, 20), rng.uniform(0, 60, 20)


def _mixture() -> float:
    dev = 0.0
    for cfg, x, t in _mixture_grid():
        w = width(cfg)
        ens = make_ensemble(cfg.T, 64)
        for f in (thermal_density, thermal_current, thermal_q):
            dev = max(dev, float(np.max(np.abs(f(cfg, w, x, t) - f(cfg, w, x, t, ens)))))
    return dev


def _dwell_routes() -> float:
    cfg = DimensionlessConfig(omega=0.05, gamma=0.1, model="ck")
    w = width(cfg)
    a = dwell_time(cfg, widths=w)
    return abs(a - oracles.dwell_double_integral(cfg, w)) / a


def _split_identity() -> float:
    dev = 0.0
    for model in ("ck", "kostin"):
        for gamma in (0.0, 0.05):
            dev = max(dev, split_times(DimensionlessConfig(gamma=gamma, model=model)).residual)
    return dev


def _counting() -> float:
    cfg = DimensionlessConfig(omega=0.05)
    res = count_transmission(cfg, 10_000)
    return abs(res.fraction - stationary_component(cfg)) / res.stderr


def _critical() -> float:
    cfg = DimensionlessConfig(omega=0.05, gamma=0.05, model="ck")
    w = width(cfg)
    times = split_times(cfg, widths=w)
    ref = oracles.critical_transmission_time(cfg, w, critical_initial_position(cfg, w),
                                             times.p_tr)
    return abs(times.tau_tr - ref) / ref


def _continuity() -> float:
    rng = np.random.default_rng(11)
    dev = 0.0
    for model in ("ck", "kostin"):
        cfg = DimensionlessConfig(omega=0.05, gamma=0.05, v0=0.5, T=1.0, model=model)
        w = width(cfg)
        for x, t in zip(rng.uniform(-30, 30, 20), rng.uniform(1, 60, 20)):
            dev = max(dev, oracles.continuity_residual(
                lambda a, b: pure_density(packet_state(cfg, w, b), a),
                lambda a, b: pure_current(packet_state(cfg, w, b), a), x, t))
            dev = max(dev, oracles.thermal_continuity_residual(cfg, w, x, t))
    return dev


def _transmission_routes() -> float:
    cfg = DimensionlessConfig(omega=0.05, gamma=0.03, T=2.0)
    w = width(cfg)
    return max(abs(p_tr_thermal(cfg, w, t) - oracles.density_route_transmission(cfg, w, t))
               for t in (5.0, 50.0, 300.0))


def _parabolic_current() -> float:
    cfg = DimensionlessConfig(omega=0.05, T=1.0, model="conservative-parabolic")
    w = width(cfg)
    rng = np.random.default_rng(3)
    x, t = rng.uniform(-40, 40, 50), rng.uniform(0, 60, 50)
    return float(np.max(np.abs(thermal_current(cfg, w, x, t)
                               - oracles.parabolic_thermal_current(cfg, x, t))))


def _wigner() -> float:
    cfg = DimensionlessConfig(x0=-20.0, omega=0.0, T=2.0, model="conservative-free")
    w = width(cfg)
    pos, mom, total = oracles.wigner_marginals(cfg, 1.5, -19.0, 0.7)
    return max(abs(pos - float(thermal_density(cfg, w, -19.0, 1.5))),
               abs(mom - float(momentum_distribution_free(cfg, 0.7))), abs(total - 1.0))


CHECKS = (
    Check("erfc-vs-reference", "special-functions", 1e-13, _erfc_reference),
    Check("gauss-hermite-moments", "quadrature", 1e-12, _hermite_moments),
    Check("pinney-vs-closed-form", "pinney", 1e-8, _pinney_frictionless),
    Check("pinney-vs-fixed-step-rk4", "pinney", 1e-7, _pinney_rk4),
    Check("thermal-mixture-vs-closed-form", "mixture", 1e-8, _mixture),
    Check("parabolic-thermal-current", "mixture", 1e-10, _parabolic_current),
    Check("transmission-density-route", "transmission", 1e-9, _transmission_routes),
    Check("dwell-q-vs-double-integral", "dwell", 1e-6, _dwell_routes),
    Check("dwell-split-identity", "dwell", 1e-6, _split_identity),
    Check("counting-vs-erfc (in std. errors)", "trajectories", 3.0, _counting),
    Check("critical-trajectory-tau-tr", "trajectories", 1e-5, _critical),
    Check("continuity-residual", "continuity", 1e-6, _continuity),
    Check("wigner-marginals", "wigner", 1e-8, _wigner),
)


def run_checks(tolerance: float | None = None, checks=CHECKS):
    """Evaluate every check; ``tolerance`` overrides all per-check tolerances."""
    results = []
    for check in checks:
        tol = check.tolerance if tolerance is None else tolerance
        results.append(CheckResult(check, float(check.deviation()), tol))
    return results
