"""Arrival, dwell, transmission and reflection times.

Every time here is an integral over [0, inf) of a function of Q(x, t), the
probability of lying to the right of x, or of the current at a detector:

* arrival-time density at x_d: |j(x_d, t)| normalised to unit area;
* dwell time in [x1, x2]: integral of Q(x1, t) - Q(x2, t);
* transmission / reflection times: the same integral with Q clipped from
  above (min) or below (max) at the stationary transmission probability.
  Clipping at P_tr separates the part of the ensemble that ends up on the
  right without locating the critical trajectory explicitly.

Thermal quantities average the component values over a
:class:`~thermal_repeller.thermal.ThermalEnsemble`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize

from .errors import ConfigError, DegenerateError
from .model import DimensionlessConfig
from .numerics import DEFAULT_TOL, Tolerances, integrate_time_tail
from .packet import WidthSolution, current, packet_state, q_beyond, width
from .thermal import ThermalEnsemble, component_states, thermal_q
from .transmission import stationary_component, truncated_ensemble

__all__ = [
    "ArrivalDistribution",
    "CharacteristicTimes",
    "arrival_distribution",
    "thermal_arrival",
    "dwell_time",
    "split_times",
    "thermal_times",
    "interval_probability",
    "DEGENERATE_P",
]

#: branch probabilities below this make the corresponding time undefined
DEGENERATE_P = 1e-8


@dataclass(frozen=True)
class ArrivalDistribution:
    """Normalised arrival-time density at one detector.

    Attributes
    ----------
    detector : detector position.
    t, density : sampled density; the grid is uniform with extra points
        around the peak.
    mean : mean arrival time.
    total_flux : weighted integral of |j| before normalisation.
    peak_time : location of the density maximum.
    pdf : callable evaluating the density at arbitrary times.
    """

    detector: float
    t: np.ndarray = field(repr=False)
    density: np.ndarray = field(repr=False)
    mean: float
    total_flux: float
    peak_time: float
    pdf: Callable = field(repr=False, compare=False)


@dataclass(frozen=True)
class CharacteristicTimes:
    """Dwell time in [x1, x2] and its split into transmitted and reflected parts.

    ``tau_tr`` (``tau_ref``) is ``nan`` when the transmission (reflection)
    probability is below :data:`DEGENERATE_P`; ``flags`` then says so.
    ``residual`` is |tau_D - (P_tr tau_tr + P_ref tau_ref)| computed from the
    unnormalised clipped integrals.
    """

    x1: float
    x2: float
    tau_D: float
    tau_tr: float
    tau_ref: float
    p_tr: float
    residual: float
    flags: tuple = ()

    @property
    def p_ref(self) -> float:
        return 1.0 - self.p_tr


def _check_interval(x1, x2):
    if not x1 <= x2:
        raise ConfigError(f"interval must satisfy x1 <= x2, got [{x1}, {x2}]")


def _check_ensemble(cfg, ensemble):
    if ensemble.T != cfg.T:
        raise ConfigError(f"ensemble temperature {ensemble.T:g} differs from T={cfg.T:g}")


def _tail(f, tol, t_max=np.inf):
    return integrate_time_tail(f, 0.0, tol, t_max=t_max)


def _support_end(fn, t_start=10.0, floor=1e-12, t_cap=1e7):
    """Time beyond which ``fn`` (non-negative) stays below ``floor`` * its maximum."""
    t = t_start
    grid = np.linspace(0.0, t, 201)
    peak = float(np.max(fn(grid)))
    while t < t_cap:
        t *= 2.0
        grid = np.linspace(t / 2, t, 201)
        values = fn(grid)
        peak = max(peak, float(np.max(values)))
        if peak > 0 and float(np.max(values[100:])) < floor * peak:
            return t
    return t


def _refine_peak(fn, t):
    values = fn(t)
    k = int(np.argmax(values))
    lo, hi = t[max(k - 1, 0)], t[min(k + 1, t.size - 1)]
    if hi <= lo:
        return float(t[k])
    res = optimize.minimize_scalar(lambda s: -float(fn(np.array([s]))[0]), bounds=(lo, hi),
                                   method="bounded", options={"xatol": 1e-10 * max(1.0, hi)})
    return float(res.x) if -res.fun >= values[k] else float(t[k])


def _sampled(fn, t_grid, n_grid, t_max=np.inf):
    if t_grid is None:
        t_end = min(_support_end(fn), t_max)
        t_grid = np.linspace(0.0, t_end, n_grid)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 3 or np.any(np.diff(t_grid) <= 0) or t_grid[0] < 0:
        raise ConfigError("time grid must be non-negative and strictly increasing")
    peak = _refine_peak(fn, t_grid)
    step = float(np.min(np.diff(t_grid)))
    local = peak + np.linspace(-step, step, 41)
    t_out = np.union1d(t_grid, local[(local >= t_grid[0]) & (local <= t_grid[-1])])
    return t_out, np.asarray(fn(t_out), dtype=float), peak


def _component_flux(cfg, widths, x_d, tol, t_max):
    def abs_j(t):
        return np.abs(current(packet_state(cfg, widths, t), x_d))

    total = _tail(abs_j, tol, t_max)
    if not total > 1e-300:
        raise DegenerateError(f"no measurable flux reaches x_d={x_d:g} (v0={cfg.v0:g})")
    first = _tail(lambda t: t * abs_j(t), tol, t_max)
    return abs_j, total, first / total


def _check_detector(cfg, x_d):
    if abs(x_d - cfg.x0) <= 5.0:
        raise ConfigError(f"detector x_d={x_d:g} lies inside the initial packet "
                          f"(|x_d - x0| must exceed 5)")


def arrival_distribution(cfg: DimensionlessConfig, x_d: float = 20.0,
                         widths: WidthSolution | None = None, tol: Tolerances = DEFAULT_TOL,
                         t_grid=None, n_grid: int = 2001,
                         t_max: float = np.inf) -> ArrivalDistribution:
    """Arrival-time density |j(x_d, t)| / integral of |j| for the component ``cfg.v0``.

    Parameters
    ----------
    t_grid : optional output grid; by default ``n_grid`` uniform points
        covering the support of the density.
    t_max : time by which the flux integrals must have converged.

    Raises
    ------
    DegenerateError
        If the integrated flux through ``x_d`` vanishes.
    ConvergenceError
        If the flux integrals have not converged by ``t_max``.
    """
    _check_detector(cfg, x_d)
    widths = widths or width(cfg)
    abs_j, total, mean = _component_flux(cfg, widths, x_d, tol, t_max)

    def pdf(t):
        return abs_j(np.asarray(t, dtype=float)) / total

    t_out, dens, peak = _sampled(pdf, t_grid, n_grid, t_max)
    return ArrivalDistribution(float(x_d), t_out, dens, float(mean), float(total), peak, pdf)


def thermal_arrival(cfg: DimensionlessConfig, ensemble: ThermalEnsemble | None = None,
                    x_d: float = 20.0, widths: WidthSolution | None = None,
                    tol: Tolerances = DEFAULT_TOL, t_grid=None,
                    n_grid: int = 2001, t_max: float = np.inf) -> ArrivalDistribution:
    """Thermal arrival-time density: weighted mixture of normalised component densities.

    The mean is the weighted average of component means. Both are divided
    by the total weight, so an ensemble that was truncated without
    renormalisation still yields a unit-area density.

    The default ensemble is :func:`~thermal_repeller.transmission.truncated_ensemble`:
    components transmitting with probability below 0.01 are dropped.
    """
    _check_detector(cfg, x_d)
    widths = widths or width(cfg)
    if ensemble is None:
        ensemble = truncated_ensemble(cfg, widths=widths)
    _check_ensemble(cfg, ensemble)
    totals, means = [], []
    for v in ensemble.nodes:
        _, total, mean = _component_flux(cfg.replace(v0=float(v)), widths, x_d, tol, t_max)
        totals.append(total)
        means.append(mean)
    totals = np.array(totals)
    w = ensemble.weights / ensemble.weights.sum()

    def pdf(t):
        t = np.asarray(t, dtype=float)
        states = component_states(cfg, widths, ensemble.nodes, t)
        per = np.abs(current(states, x_d)) / totals.reshape((-1,) + (1,) * t.ndim)
        return np.tensordot(w, per, axes=(0, 0))

    t_out, dens, peak = _sampled(pdf, t_grid, n_grid, t_max)
    return ArrivalDistribution(float(x_d), t_out, dens, float(w @ np.array(means)),
                               float(ensemble.weights @ totals), peak, pdf)


def interval_probability(cfg: DimensionlessConfig, x1: float, x2: float, t,
                         widths: WidthSolution | None = None, thermal: bool = False,
                         ensemble: ThermalEnsemble | None = None):
    """Probability of finding the particle in [x1, x2] at time(s) ``t``.

    With ``thermal=True`` the thermal density is used (closed form, or the
    mixture over ``ensemble``); otherwise the single component ``cfg.v0``.
    """
    _check_interval(x1, x2)
    widths = widths or width(cfg)
    if thermal:
        return thermal_q(cfg, widths, x1, t, ensemble) - thermal_q(cfg, widths, x2, t, ensemble)
    st = packet_state(cfg, widths, t)
    return q_beyond(st, x1) - q_beyond(st, x2)


def dwell_time(cfg: DimensionlessConfig, x1: float = -1.0, x2: float = 1.0,
               widths: WidthSolution | None = None, tol: Tolerances = DEFAULT_TOL) -> float:
    """Mean time the component ``cfg.v0`` spends in [x1, x2]."""
    _check_interval(x1, x2)
    if x1 == x2:
        return 0.0
    widths = widths or width(cfg)
    return _tail(lambda t: interval_probability(cfg, x1, x2, t, widths), tol)


def _clipped_integrals(cfg, widths, x1, x2, p, tol):
    """Integrals of min(Q, p) and max(Q, p) differences between x1 and x2."""

    def q_pair(t):
        st = packet_state(cfg, widths, t)
        return q_beyond(st, x1), q_beyond(st, x2)

    def lower(t):
        q1, q2 = q_pair(t)
        return np.minimum(q1, p) - np.minimum(q2, p)

    def upper(t):
        q1, q2 = q_pair(t)
        return np.maximum(q1, p) - np.maximum(q2, p)

    a = _tail(lower, tol) if p >= DEGENERATE_P else 0.0
    b = _tail(upper, tol) if 1.0 - p >= DEGENERATE_P else 0.0
    return a, b


def split_times(cfg: DimensionlessConfig, x1: float = -1.0, x2: float = 1.0,
                widths: WidthSolution | None = None, tol: Tolerances = DEFAULT_TOL,
                p_tr: float | None = None) -> CharacteristicTimes:
    """Dwell, transmission and reflection times of the component ``cfg.v0``.

    ``p_tr`` defaults to the stationary transmission probability of the
    component.
    """
    _check_interval(x1, x2)
    widths = widths or width(cfg)
    p = float(stationary_component(cfg, cfg.v0, widths)) if p_tr is None else float(p_tr)
    tau_d = dwell_time(cfg, x1, x2, widths, tol)
    if x1 == x2:
        return CharacteristicTimes(x1, x2, 0.0, 0.0, 0.0, p, 0.0)
    a, b = _clipped_integrals(cfg, widths, x1, x2, p, tol)
    flags = []
    if p < DEGENERATE_P:
        flags.append("no-transmission-branch")
    if 1.0 - p < DEGENERATE_P:
        flags.append("no-reflection-branch")
    tau_tr = a / p if p >= DEGENERATE_P else np.nan
    tau_ref = b / (1.0 - p) if 1.0 - p >= DEGENERATE_P else np.nan
    return CharacteristicTimes(float(x1), float(x2), tau_d, tau_tr, tau_ref, p,
                               abs(tau_d - (a + b)), tuple(flags))


def thermal_times(cfg: DimensionlessConfig, ensemble: ThermalEnsemble | None = None,
                  x1: float = -1.0, x2: float = 1.0, widths: WidthSolution | None = None,
                  tol: Tolerances = DEFAULT_TOL) -> CharacteristicTimes:
    """Thermal dwell, transmission and reflection times.

    The dwell time integrates the difference of the thermal Q function at
    x1 and x2 (closed form for an untruncated ensemble, mixture otherwise).
    Transmission and reflection times are weighted averages of the
    component times; components whose branch is degenerate are left out of
    that branch's average, and the remaining weights are rescaled.
    ``p_tr`` is the weighted stationary transmission probability.

    An ensemble truncated with ``renormalize=False`` is used with its raw
    weights and no rescaling at all, so the dropped components count as
    contributing zero time.

    The default ensemble is :func:`~thermal_repeller.transmission.truncated_ensemble`.
    """
    _check_interval(x1, x2)
    widths = widths or width(cfg)
    if ensemble is None:
        ensemble = truncated_ensemble(cfg, widths=widths)
    _check_ensemble(cfg, ensemble)
    if x1 == x2:
        return CharacteristicTimes(x1, x2, 0.0, 0.0, 0.0, np.nan, 0.0)
    mix = ensemble if ensemble.truncated else None
    raw = ensemble.truncated and not ensemble.renormalized
    scale = 1.0 if (mix is None or raw) else 1.0 / ensemble.weights.sum()
    tau_d = scale * _tail(
        lambda t: interval_probability(cfg, x1, x2, t, widths, thermal=True, ensemble=mix), tol)

    probs = np.asarray(stationary_component(cfg, ensemble.nodes, widths), dtype=float)
    parts = np.array([_clipped_integrals(cfg.replace(v0=float(v)), widths, x1, x2, p, tol)
                      for v, p in zip(ensemble.nodes, probs)])
    w = ensemble.weights if raw else ensemble.weights / ensemble.weights.sum()
    residual = abs(tau_d - float(w @ parts.sum(axis=1)))

    flags = []
    ok_tr = probs >= DEGENERATE_P
    ok_ref = 1.0 - probs >= DEGENERATE_P
    if not ok_tr.all():
        flags.append(f"transmission-branch-degenerate:{int((~ok_tr).sum())}")
    if not ok_ref.all():
        flags.append(f"reflection-branch-degenerate:{int((~ok_ref).sum())}")
    tau_tr = (float(w[ok_tr] @ (parts[ok_tr, 0] / probs[ok_tr])
                    / (1.0 if raw else w[ok_tr].sum())) if ok_tr.any() else np.nan)
    tau_ref = (float(w[ok_ref] @ (parts[ok_ref, 1] / (1.0 - probs[ok_ref]))
                     / (1.0 if raw else w[ok_ref].sum())) if ok_ref.any() else np.nan)
    return CharacteristicTimes(float(x1), float(x2), float(tau_d), tau_tr, tau_ref,
                               float(w @ probs), float(residual), tuple(flags))
