"""Maxwell-Boltzmann ensembles and thermally averaged fields.

A thermal packet is an incoherent mixture of Gaussian components that
differ only in their initial center velocity ``v0``, distributed as a
normal law of variance ``T`` (reduced units). Because the component center
is affine in ``v0``,

    x(t; v0) = X(t) + v0 B(t),

the mixture is again a Gaussian with center ``X(t)`` and variance
``sigma(t)^2 + T B(t)^2``. Those closed forms are what this module
evaluates by default. Passing an explicit :class:`ThermalEnsemble` switches
to the weighted sum over components, which is the only correct route once
the ensemble has been truncated.

The thermal fields ignore ``cfg.v0``: the velocities are supplied by the
ensemble, which is centered on zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EmptyEnsembleError
from .model import DimensionlessConfig
from .numerics import gauss_hermite
from .packet import (PacketState, WidthSolution, center, current, density, drift_parts,
                     packet_state, propagators, q_beyond)

__all__ = [
    "ThermalEnsemble",
    "ThermalField",
    "make_ensemble",
    "thermal_center",
    "thermal_width",
    "thermal_density",
    "thermal_current",
    "thermal_q",
    "component_states",
    "mixture",
]


@dataclass(frozen=True)
class ThermalEnsemble:
    """Quadrature rule over initial velocities.

    Attributes
    ----------
    T : temperature.
    nodes : velocities ``v0_i``, increasing.
    weights : positive weights; they sum to 1 when ``renormalized``.
    v_min, v_max : truncation bounds, ``None`` when absent.
    renormalized : whether the kept weights were rescaled to unit sum.
    discarded_mass : Maxwell-Boltzmann weight removed by truncation.
    """

    T: float
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    v_min: float | None = None
    v_max: float | None = None
    renormalized: bool = True
    discarded_mass: float = 0.0

    def __len__(self):
        return len(self.nodes)

    @property
    def truncated(self) -> bool:
        return self.v_min is not None or self.v_max is not None

    def average(self, values) -> np.ndarray:
        """Weighted sum over the leading (node) axis of ``values``."""
        return np.tensordot(self.weights, np.asarray(values, dtype=float), axes=(0, 0))


def make_ensemble(T: float, n: int = 64, v_min: float | None = None,
                  v_max: float | None = None, renormalize: bool = True) -> ThermalEnsemble:
    """Gauss-Hermite discretisation of the Maxwell-Boltzmann law N(0, T).

    Nodes are ``sqrt(2T) xi_k`` with weights ``w_k / sqrt(pi)``, where
    ``(xi_k, w_k)`` is the n-point rule for exp(-x^2). Nodes outside
    ``[v_min, v_max]`` are dropped.

    Raises
    ------
    EmptyEnsembleError
        If truncation removes every node.
    """
    T = float(T)
    if not np.isfinite(T) or T < 0:
        raise ConfigError(f"temperature must be finite and non-negative, got {T!r}")
    if v_min is not None and v_max is not None and v_min >= v_max:
        raise ConfigError("v_min must be smaller than v_max")
    if T == 0.0:
        nodes, weights = np.zeros(1), np.ones(1)
    else:
        rule = gauss_hermite(n)
        nodes = np.sqrt(2.0 * T) * rule.nodes
        weights = rule.weights / np.sqrt(np.pi)
    keep = np.ones(nodes.shape, dtype=bool)
    if v_min is not None:
        keep &= nodes >= v_min
    if v_max is not None:
        keep &= nodes <= v_max
    if not keep.any():
        raise EmptyEnsembleError(
            f"no velocity node of the T={T:g} ensemble lies in "
            f"[{v_min}, {v_max}]")
    total = weights.sum()
    discarded = float(weights[~keep].sum() / total)
    nodes, weights = nodes[keep], weights[keep]
    if renormalize:
        weights = weights / weights.sum()
    return ThermalEnsemble(T, nodes, weights, v_min, v_max, bool(renormalize), discarded)


def thermal_center(cfg: DimensionlessConfig, t):
    """Center X(t) of the thermal density: the component center at v0 = 0."""
    return center(cfg.replace(v0=0.0), t)[0]


class ThermalField:
    """Closed-form center and width of the thermal mixture.

    Parameters
    ----------
    cfg : configuration; ``cfg.T`` sets the velocity variance.
    widths : component width evaluator for the same model, gamma and omega.
    """

    def __init__(self, cfg: DimensionlessConfig, widths: WidthSolution):
        self.cfg = cfg
        self.widths = widths
        self._cfg0 = cfg.replace(v0=0.0)

    def state(self, t) -> PacketState:
        """Thermal center, width and their rates packaged as a Gaussian state."""
        t = np.asarray(t, dtype=float)
        if self.cfg.T == 0.0:
            return packet_state(self._cfg0, self.widths, t)
        X, dX = center(self._cfg0, t)
        s, ds = self.widths.evaluate(t)
        _, B, _, dB = propagators(self.cfg, t)
        T = self.cfg.T
        s_T = np.sqrt(s * s + T * B * B)
        ds_T = (s * ds + T * B * dB) / s_T
        return PacketState(t, X, dX, s_T, ds_T, self._drift(t, s, ds, B, s_T, ds_T))

    def _drift(self, t, s, ds, B, s_T, ds_T):
        # A s_T'/s_T - A' = (sigma^2 Y_A + T B exp(-gamma t)) / s_T^2 follows from
        # s_T^2 = sigma^2 + T B^2 and the Wronskian A B' - A' B = exp(-gamma t)
        parts = drift_parts(self._cfg0, self.widths, t)
        if parts is None:
            return None
        cfg = self.cfg
        ya, _ = self.widths.drift_terms(t)
        ya_T = ((s / s_T) ** 2 * ya
                + cfg.T * (B / s_T) * (np.exp(-cfg.gamma * t) / s_T))
        x_eq = cfg.K / cfg.omega**2 if cfg.K != 0.0 else 0.0
        return -x_eq * ds_T / s_T - (cfg.x0 - x_eq) * ya_T

    def center(self, t):
        return self.state(t).center

    def width(self, t):
        return self.state(t).width


def thermal_width(cfg: DimensionlessConfig, widths: WidthSolution, t):
    """Width of the thermal density, ``sqrt(sigma^2 + T B^2)``."""
    return ThermalField(cfg, widths).state(t).width


def component_states(cfg: DimensionlessConfig, widths: WidthSolution,
                     velocities, t) -> PacketState:
    """States of the components with the given initial velocities.

    Array fields have shape ``(len(velocities),) + shape(t)``.
    """
    v = np.asarray(velocities, dtype=float)
    t = np.asarray(t, dtype=float)
    X, dX = center(cfg.replace(v0=0.0), t)
    _, B, _, dB = propagators(cfg, t)
    s, ds = widths.evaluate(t)
    vb = v.reshape(v.shape + (1,) * t.ndim)
    parts = drift_parts(cfg, widths, t)
    drift = None if parts is None else parts[0] + vb * parts[1]
    return PacketState(t, X + vb * B, dX + vb * dB,
                       np.broadcast_to(s, vb.shape[:1] + np.shape(s)),
                       np.broadcast_to(ds, vb.shape[:1] + np.shape(ds)), drift)


def mixture(cfg: DimensionlessConfig, widths: WidthSolution, ensemble: ThermalEnsemble,
            observable, x, t):
    """Weighted sum of ``observable(state, x)`` over the ensemble components.

    ``x`` and ``t`` broadcast together; ``observable`` is one of the
    single-component fields of :mod:`thermal_repeller.packet`.
    """
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    states = component_states(cfg, widths, ensemble.nodes, t)
    return ensemble.average(observable(states, x))


def _field(cfg, widths, ensemble, observable, x, t):
    if ensemble is None:
        return observable(ThermalField(cfg, widths).state(t), x)
    return mixture(cfg, widths, ensemble, observable, x, t)


def thermal_density(cfg: DimensionlessConfig, widths: WidthSolution, x, t,
                    ensemble: ThermalEnsemble | None = None):
    """Thermal probability density; closed form unless an ensemble is given."""
    return _field(cfg, widths, ensemble, density, x, t)


def thermal_current(cfg: DimensionlessConfig, widths: WidthSolution, x, t,
                    ensemble: ThermalEnsemble | None = None):
    """Thermal probability current.

    The weighted sum of component currents equals, for the untruncated
    Maxwell-Boltzmann law, ``[X' + (x - X) s_T'/s_T] rho_T``; that closed
    form is used when ``ensemble`` is ``None``.
    """
    return _field(cfg, widths, ensemble, current, x, t)


def thermal_q(cfg: DimensionlessConfig, widths: WidthSolution, x, t,
              ensemble: ThermalEnsemble | None = None):
    """Thermal probability of lying to the right of ``x``."""
    return _field(cfg, widths, ensemble, q_beyond, x, t)
