"""Transmission probabilities across the barrier top at x = 0.

A Gaussian state transmits with probability Q(0, t), the weight lying to
the right of the barrier top. For a component that starts far on the left
this is ``0.5 erfc(-x_c / (sqrt(2) sigma))``. The exact form subtracts the
initial weight already present on the right and renormalises.

Stationary values are the t -> inf limits. For the Caldirola-Kanai and
conservative models the ratio x_c/sigma converges to

    (x0 (Omega + gamma/2) + v0) / sqrt((Omega + gamma/2)^2 + 1 + T)

which is regular even at Omega = 0. No closed form is known for the Kostin
width, so its limit is taken numerically on a doubling time sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import ConfigError, ConvergenceError, UnsupportedError
from .model import DimensionlessConfig
from .numerics import DEFAULT_TOL, Tolerances, erfc, find_root
from .packet import WidthSolution, center, propagators, width
from .thermal import ThermalEnsemble, ThermalField, make_ensemble, thermal_q

__all__ = [
    "TransmissionCurve",
    "p_tr_component",
    "p_tr_thermal",
    "p_tr_stationary",
    "stationary_component",
    "stationary_ratio",
    "transmission_curve",
    "truncated_ensemble",
    "v0_min",
    "LIMIT_TOL",
]

SQRT2 = np.sqrt(2.0)

#: successive doubling-sequence values of center/width must agree to this,
#: relative to max(1, |ratio|). The Kostin width carries integration noise
#: of order 1e-12 * ln(sigma), which reaches ~1e-10 by the time sigma overflows.
LIMIT_TOL = 1e-9


def _require_repeller(cfg: DimensionlessConfig):
    if cfg.K != 0.0:
        raise UnsupportedError("transmission probabilities are defined for the pure "
                               "parabolic repeller (K = 0)")


def p_tr_component(cfg: DimensionlessConfig, widths: WidthSolution, t, exact: bool = True):
    """Transmission probability of the single component ``cfg.v0`` at time ``t``.

    Parameters
    ----------
    exact : bool
        If true, remove the initial weight on the right of the barrier and
        renormalise, so that the value is exactly 0 at t = 0. Otherwise
        return ``0.5 erfc(-x_c / (sqrt(2) sigma))``.
    """
    _require_repeller(cfg)
    x, _ = center(cfg, t)
    s, _ = widths.evaluate(t)
    z = x / (SQRT2 * s)
    if not exact:
        return 0.5 * erfc(-z)
    z0 = cfg.x0 / SQRT2
    # erf(z) - erf(z0) written without the cancellation near erf = -1
    return np.clip((erfc(-z) - erfc(-z0)) / erfc(z0), 0.0, 1.0)


def p_tr_thermal(cfg: DimensionlessConfig, widths: WidthSolution, t,
                 ensemble: ThermalEnsemble | None = None):
    """Thermal transmission probability at time ``t``.

    Closed form ``0.5 erfc(-X / (sqrt(2) sigma_T))`` by default; with an
    ensemble, the weighted sum of component probabilities (approximate form).
    """
    _require_repeller(cfg)
    return thermal_q(cfg, widths, 0.0, t, ensemble=ensemble)


def _closed_form_ratio(cfg: DimensionlessConfig, v0, T: float):
    lead = cfg.Omega + 0.5 * cfg.gamma
    return (cfg.x0 * lead + np.asarray(v0, dtype=float)) / np.sqrt(lead * lead + 1.0 + T)


def _doubling_limit(value_at, cfg: DimensionlessConfig, limit_tol: float,
                    t_cap: float | None = None):
    """Limit of ``value_at(t)`` along t_k = t_start 2^k.

    The sequence starts late enough that the decaying propagator mode is
    below 1e-17 and stops once two consecutive differences are below
    ``limit_tol * max(1, |value|)``.
    """
    rate = cfg.Omega - 0.5 * cfg.gamma
    if rate > 0:
        t = max(20.0, 20.0 / rate)
        t_cap = t_cap or 600.0 / rate
    else:
        t = 20.0 / max(cfg.gamma, 1e-3)
        t_cap = t_cap or 1e6
    previous = np.asarray(value_at(t))
    quiet = 0
    while True:
        t *= 2.0
        if t > t_cap:
            raise ConvergenceError(
                f"stationary limit not reached by t={t / 2:.6g}",
                partial=float(np.mean(previous)))
        current = np.asarray(value_at(t))
        if np.all(np.abs(current - previous) < limit_tol * np.maximum(1.0, np.abs(current))):
            quiet += 1
            if quiet == 2:
                return current
        else:
            quiet = 0
        previous = current


def stationary_ratio(cfg: DimensionlessConfig, v0=None,
                     widths: WidthSolution | None = None, T: float = 0.0,
                     limit_tol: float = LIMIT_TOL):
    """Limit of (center / width) for components with velocities ``v0``.

    ``T`` adds the thermal broadening ``T B^2`` to the squared width, so
    ``v0=0, T=cfg.T`` describes the thermal density.
    """
    _require_repeller(cfg)
    v0 = cfg.v0 if v0 is None else v0
    if cfg.model != "kostin" or cfg.gamma == 0.0:
        out = _closed_form_ratio(cfg, v0, T)
    else:
        widths = widths or width(cfg)
        field = ThermalField(cfg.replace(T=T), widths)
        v = np.asarray(v0, dtype=float)

        def value_at(t):
            st = field.state(t)
            _, B, _, _ = propagators(cfg, t)
            return (st.center + v * B) / st.width

        out = _doubling_limit(value_at, cfg, limit_tol)
    return float(out) if np.ndim(out) == 0 else out


def stationary_component(cfg: DimensionlessConfig, v0=None,
                         widths: WidthSolution | None = None, T: float = 0.0,
                         limit_tol: float = LIMIT_TOL):
    """Long-time transmission probability of components with velocities ``v0``.

    See :func:`stationary_ratio` for the meaning of ``T``.
    """
    ratio = stationary_ratio(cfg, v0, widths, T, limit_tol)
    return 0.5 * erfc(-np.asarray(ratio) / SQRT2)


def p_tr_stationary(cfg: DimensionlessConfig, widths: WidthSolution | None = None,
                    ensemble: ThermalEnsemble | None = None,
                    limit_tol: float = LIMIT_TOL) -> float:
    """Stationary thermal transmission probability.

    Without an ensemble this is the limit of :func:`p_tr_thermal`; with one
    it is the weighted sum of component limits.

    Raises
    ------
    ConvergenceError
        If the Kostin limit does not settle before the time cap.
    """
    if ensemble is None:
        return float(stationary_component(cfg, 0.0, widths, T=cfg.T, limit_tol=limit_tol))
    values = stationary_component(cfg, ensemble.nodes, widths, limit_tol=limit_tol)
    return float(ensemble.average(values))


@dataclass(frozen=True)
class TransmissionCurve:
    """Time-resolved transmission probability and its limit.

    Attributes
    ----------
    t : time grid.
    values : P_tr on the grid.
    stationary : t -> inf limit.
    t_converged : first grid time from which |P - P_inf| stays below 1e-8,
        ``None`` if the grid ends earlier.
    """

    t: np.ndarray
    values: np.ndarray
    stationary: float
    t_converged: float | None

    @property
    def reflection(self) -> np.ndarray:
        return 1.0 - self.values


def transmission_curve(cfg: DimensionlessConfig, t, widths: WidthSolution | None = None,
                       thermal: bool = True, exact: bool = False) -> TransmissionCurve:
    """Transmission probability on a time grid together with its stationary value."""
    widths = widths or width(cfg)
    t = np.asarray(t, dtype=float)
    if thermal:
        values = np.asarray(p_tr_thermal(cfg, widths, t), dtype=float)
        limit = p_tr_stationary(cfg, widths)
    else:
        values = np.asarray(p_tr_component(cfg, widths, t, exact=exact), dtype=float)
        limit = float(stationary_component(cfg, cfg.v0, widths))
    off = np.abs(values - limit) >= 1e-8
    if not off[-1]:
        last_off = np.flatnonzero(off)
        t_conv = float(t[last_off[-1] + 1]) if last_off.size else float(t[0])
    else:
        t_conv = None
    return TransmissionCurve(t, values, limit, t_conv)


def _max_over_time(cfg: DimensionlessConfig, widths: WidthSolution, v0: float) -> float:
    comp = cfg.replace(v0=v0)
    limit = float(stationary_component(comp, v0, widths))
    rate = cfg.Omega - 0.5 * cfg.gamma
    t_hi = 40.0 / rate if rate > 0 else 2000.0
    grid = np.linspace(0.0, t_hi, 4001)
    values = p_tr_component(comp, widths, grid, exact=False)
    k = int(np.argmax(values))
    best = float(values[k])
    if 0 < k < grid.size - 1:
        res = optimize.minimize_scalar(
            lambda s: -float(p_tr_component(comp, widths, s, exact=False)),
            bounds=(grid[k - 1], grid[k + 1]), method="bounded",
            options={"xatol": 1e-10})
        best = max(best, -float(res.fun))
    return max(best, limit)


def v0_min(cfg: DimensionlessConfig, threshold: float = 0.01, reading: str = "stationary",
           widths: WidthSolution | None = None, tol: Tolerances = DEFAULT_TOL,
           bracket=(-50.0, 50.0)) -> float:
    """Smallest initial velocity whose component transmits with at least ``threshold``.

    Parameters
    ----------
    reading : {"stationary", "max-over-time"}
        Use the t -> inf transmission probability of the component, or the
        largest value it attains at any time.

    Raises
    ------
    BracketingError
        If the threshold is not crossed inside ``bracket``.
    """
    _require_repeller(cfg)
    if not 0.0 < threshold < 1.0:
        raise ConfigError(f"threshold must lie in (0, 1), got {threshold!r}")
    widths = widths or width(cfg)
    if reading == "stationary":
        def prob(v):
            return float(stationary_component(cfg, v, widths))
    elif reading == "max-over-time":
        def prob(v):
            return _max_over_time(cfg, widths, v)
    else:
        raise ConfigError(f"unknown reading {reading!r}; expected 'stationary' or "
                          "'max-over-time'")
    return find_root(lambda v: prob(v) - threshold, bracket, tol)


def truncated_ensemble(cfg: DimensionlessConfig, n: int = 64, threshold: float = 0.01,
                       renormalize: bool = True, widths: WidthSolution | None = None):
    """Maxwell-Boltzmann ensemble at ``cfg.T`` restricted to v0 >= :func:`v0_min`.

    Components below the threshold velocity transmit with probability under
    ``threshold`` and are dropped; at T = 0 the single v0 = 0 node is kept
    regardless.
    """
    if cfg.T == 0.0:
        return make_ensemble(0.0)
    return make_ensemble(cfg.T, n, v_min=v0_min(cfg, threshold, widths=widths),
                         renormalize=renormalize)
