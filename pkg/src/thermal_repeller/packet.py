"""Single Gaussian component: center, width, density, current and Q.

All quantities are reduced (see :mod:`thermal_repeller.model`). The center
of every model is built from two propagator functions of time,

    A(t) = [cosh(Omega t) + (gamma/2) sinh(Omega t)/Omega] exp(-gamma t/2)
    B(t) = sinh(Omega t)/Omega * exp(-gamma t/2)

with ``x(t) = x0 A(t) + v0 B(t)`` for the pure repeller. A and B solve the
damped classical equation x'' + gamma x' - omega^2 x = 0 with unit initial
position and unit initial velocity respectively. The Caldirola-Kanai width
is ``hypot(A, B)``; the Kostin width comes from the Pinney equation.

The Bohmian velocity field v + (x - X) sigma'/sigma is evaluated as
x sigma'/sigma plus a drift built from Y_A = A sigma'/sigma - A' and
Y_B = B sigma'/sigma - B'. Both terms of each Y grow exponentially on a
repeller while their difference decays, so the Y are computed directly:
in closed form through the Wronskian A B' - A' B = exp(-gamma t) when the
width is closed-form, and as extra components of the Pinney integration
otherwise. Computing the difference of the two large terms instead leaves
an error that never decays and spoils long-time flux integrals.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError, DomainError, UnsupportedError
from .model import DimensionlessConfig
from .numerics import OdeSolution, Tolerances, erfc, sinhc, solve_ivp

__all__ = [
    "PacketState",
    "WidthSolution",
    "propagators",
    "center",
    "width",
    "packet_state",
    "density",
    "velocity_field",
    "drift_parts",
    "current",
    "q_beyond",
    "wigner_free",
    "momentum_distribution_free",
    "PINNEY_TOL",
]

SQRT2 = np.sqrt(2.0)
SQRT2PI = np.sqrt(2.0 * np.pi)

PINNEY_TOL = Tolerances(rel=1e-12, abs=1e-13)


def propagators(cfg: DimensionlessConfig, t):
    """Return ``(A, B, A', B')`` at times ``t``.

    Written in terms of exp((Omega - gamma/2) t) and exp(-(Omega + gamma/2) t)
    so nothing overflows before the packet itself is astronomically wide.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("time must be non-negative")
    g2 = 0.5 * cfg.gamma
    om = cfg.Omega
    grow = np.exp((om - g2) * t)
    decay = np.exp(-(om + g2) * t)
    C = 0.5 * (grow + decay)
    with np.errstate(divide="ignore", invalid="ignore"):
        far = 0.5 * (grow - decay) / om if om > 0 else np.zeros_like(t)
    # the series branch is only selected where om * t <= 0.5
    t_near = np.minimum(t, 0.5 / om) if om > 0 else t
    near = t_near * sinhc(om * t_near) * np.exp(-g2 * t_near)
    B = np.where(om * t > 0.5, far, near)
    A = C + g2 * B
    dA = cfg.omega**2 * B
    dB = C - g2 * B
    return A, B, dA, dB


def center(cfg: DimensionlessConfig, t):
    """Packet center and its velocity, ``(x, x')``, at times ``t``."""
    A, B, dA, dB = propagators(cfg, t)
    if cfg.K == 0.0:
        return cfg.x0 * A + cfg.v0 * B, cfg.x0 * dA + cfg.v0 * dB
    if cfg.omega == 0.0:
        if cfg.model != "conservative-linear":
            raise UnsupportedError(
                "a linear force without a quadratic barrier is only supported by "
                "the 'conservative-linear' model")
        t = np.asarray(t, dtype=float)
        return cfg.x0 + cfg.v0 * t - 0.5 * cfg.K * t * t, cfg.v0 - cfg.K * t
    # V = K x - omega^2 x^2 / 2 has its stationary point at K / omega^2
    x_eq = cfg.K / cfg.omega**2
    return (x_eq + (cfg.x0 - x_eq) * A + cfg.v0 * B,
            (cfg.x0 - x_eq) * dA + cfg.v0 * dB)


class WidthSolution:
    """Evaluator of the packet width sigma(t) and its rate sigma'(t).

    Closed-form for the conservative and Caldirola-Kanai models. For the
    Kostin model the Pinney equation

        sigma'' + gamma sigma' - 1/sigma^3 - omega^2 sigma = 0,
        sigma(0) = 1, sigma'(0) = 0

    is integrated in the variables u = ln(sigma), w = sigma'/sigma, which
    stay O(1) however much the packet spreads. The solution is stored as a
    chain of segments [0, H], [H, 2H], [2H, 4H], ...; later segments are
    appended on demand and never alter earlier ones, so values do not depend
    on the order of queries.
    """

    def __init__(self, cfg: DimensionlessConfig, t_max: float | None = None,
                 tol: Tolerances = PINNEY_TOL):
        self.model = cfg.model
        self.gamma = cfg.gamma
        self.omega = cfg.omega
        self._cfg = DimensionlessConfig(x0=0.0, omega=cfg.omega, gamma=cfg.gamma,
                                        model=cfg.model)
        self.tol = tol
        self.backing = "ode" if cfg.model == "kostin" else "closed-form"
        self._segments: list[OdeSolution] = []
        self._lock = threading.Lock()
        if self.backing == "ode":
            if t_max is None:
                t_max = 60.0 / max(cfg.omega, cfg.gamma, 1.0)
            if not t_max > 0:
                raise ConfigError("width horizon must be positive")
            self._extend_to(float(t_max))

    def __repr__(self):
        return (f"WidthSolution(model={self.model!r}, gamma={self.gamma}, "
                f"omega={self.omega}, t_max={self.t_max:g})")

    @property
    def t_max(self) -> float:
        if self.backing == "closed-form":
            return np.inf
        return self._segments[-1].t_end

    @property
    def t_breaks(self) -> np.ndarray:
        """Segment boundaries of the ODE-backed solution."""
        return np.array([0.0] + [s.t_end for s in self._segments])

    def _scalar_propagators(self, t):
        g2, om = 0.5 * self.gamma, self._cfg.Omega
        if om * t < 1.0:
            damp = math.exp(-g2 * t)
            B = (math.sinh(om * t) / om if om > 0 else t) * damp
            C = math.cosh(om * t) * damp
        else:
            grow, decay = math.exp((om - g2) * t), math.exp(-(om + g2) * t)
            B = 0.5 * (grow - decay) / om
            C = 0.5 * (grow + decay)
        return C + g2 * B, B

    def _rhs(self, t, y):
        u, w, ya, yb = y
        # Y_A and Y_B obey Y' = -(w + gamma) Y + A (or B) / sigma^4 with
        # Y_A(0) = 0 and Y_B(0) = -1
        A, B = self._scalar_propagators(t)
        s4 = math.exp(-4.0 * u)
        damp = -(w + self.gamma)
        return [w, -self.gamma * w + s4 + self.omega**2 - w * w,
                damp * ya + A * s4, damp * yb + B * s4]

    def _extend_to(self, t_hi: float) -> None:
        with self._lock:
            if not self._segments:
                self._segments.append(solve_ivp(self._rhs, [0.0, 0.0, 0.0, -1.0], [0.0, t_hi],
                                                  self.tol))
            while self._segments[-1].t_end < t_hi:
                last = self._segments[-1]
                start = last.t_end
                self._segments.append(
                    solve_ivp(self._rhs, last.states[-1], [start, 2.0 * start], self.tol))

    def _ode_states(self, t):
        """Integrated (u, w, Y_A, Y_B), shape (4,) + t.shape."""
        t_top = float(np.max(t)) if t.size else 0.0
        if t_top > self.t_max:
            self._extend_to(t_top)
        flat = t.ravel()
        breaks = self.t_breaks
        seg_index = np.clip(np.searchsorted(breaks, flat, side="right") - 1,
                            0, len(self._segments) - 1)
        out = np.empty((4, flat.size))
        for k in np.unique(seg_index):
            sel = seg_index == k
            out[:, sel] = self._segments[k](flat[sel])
        return out.reshape((4,) + t.shape)

    def evaluate(self, t):
        """Return ``(sigma, sigma')`` at times ``t``."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise DomainError("time must be non-negative")
        if self.backing == "closed-form":
            A, B, dA, dB = propagators(self._cfg, t)
            sigma = np.hypot(A, B)
            rate = (A / sigma) * dA + (B / sigma) * dB
            return sigma, rate
        u, w = self._ode_states(t)[:2]
        sigma = np.exp(u)
        rate = w * sigma
        if sigma.ndim == 0:
            return float(sigma), float(rate)
        return sigma, rate

    def drift_terms(self, t):
        """Return ``(Y_A, Y_B)``: A sigma'/sigma - A' and B sigma'/sigma - B'."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise DomainError("time must be non-negative")
        if self.backing == "closed-form":
            A, B, _, _ = propagators(self._cfg, t)
            sigma = np.hypot(A, B)
            wr = np.exp(-self.gamma * t) / sigma
            return B / sigma * wr, -A / sigma * wr
        _, _, ya, yb = self._ode_states(t)
        return ya, yb

    def __call__(self, t):
        return self.evaluate(t)[0]

    def rate(self, t):
        return self.evaluate(t)[1]


@lru_cache(maxsize=256)
def _cached_width(model, gamma, omega, t_max, tol):
    cfg = DimensionlessConfig(x0=0.0, omega=omega, gamma=gamma, model=model)
    return WidthSolution(cfg, t_max=t_max, tol=tol)


def width(cfg: DimensionlessConfig, t_max: float | None = None,
          tol: Tolerances = PINNEY_TOL) -> WidthSolution:
    """Width evaluator for ``cfg``; shared across configs with equal (model, gamma, omega).

    The width does not depend on x0, v0 or T, so a single Pinney solve serves
    a whole thermal ensemble.
    """
    return _cached_width(cfg.model, cfg.gamma, cfg.omega, t_max, tol)


@dataclass(frozen=True)
class PacketState:
    """Center, width and their time derivatives; fields may be arrays over t.

    ``drift`` is the x-independent part of the velocity field,
    velocity - center * width_rate / width, when it is known in a
    cancellation-free form; ``None`` means it is formed from the other fields.
    """

    t: np.ndarray
    center: np.ndarray
    velocity: np.ndarray
    width: np.ndarray
    width_rate: np.ndarray
    drift: np.ndarray | None = None


def drift_parts(cfg: DimensionlessConfig, widths: WidthSolution, t):
    """Velocity-field drift split as ``(base, slope)``: drift = base + v0 * slope.

    Returns ``None`` for the conservative-linear model, whose center is
    polynomial in t and needs no special treatment.
    """
    if cfg.K != 0.0 and cfg.omega == 0.0:
        return None
    ya, yb = widths.drift_terms(t)
    if cfg.K == 0.0:
        return -cfg.x0 * ya, -yb
    x_eq = cfg.K / cfg.omega**2
    s, ds = widths.evaluate(t)
    return -x_eq * ds / s - (cfg.x0 - x_eq) * ya, -yb


def packet_state(cfg: DimensionlessConfig, widths: WidthSolution, t) -> PacketState:
    x, v = center(cfg, t)
    s, ds = widths.evaluate(t)
    parts = drift_parts(cfg, widths, t)
    drift = None if parts is None else parts[0] + cfg.v0 * parts[1]
    return PacketState(np.asarray(t, dtype=float), x, v, s, ds, drift)


def density(state: PacketState, x):
    z = (x - state.center) / state.width
    return np.exp(-0.5 * z * z) / (SQRT2PI * state.width)


def velocity_field(state: PacketState, x):
    """Bohmian velocity field of a Gaussian packet.

    Trajectories x(t) = x_c(t) + (x_init - x0) sigma(t) are the integral
    curves of this field.
    """
    if state.drift is None:
        return state.velocity + (x - state.center) * (state.width_rate / state.width)
    return state.drift + x * (state.width_rate / state.width)


def current(state: PacketState, x):
    return velocity_field(state, x) * density(state, x)


def q_beyond(state: PacketState, x):
    """Probability of finding the particle to the right of ``x``."""
    return 0.5 * erfc((x - state.center) / (SQRT2 * state.width))


def _require_free(cfg: DimensionlessConfig):
    if cfg.omega != 0.0 or cfg.gamma != 0.0 or cfg.K != 0.0:
        raise UnsupportedError("closed-form thermal Wigner function is only known for "
                               "the free, frictionless case")


def wigner_free(cfg: DimensionlessConfig, x, p, t):
    """Thermal Wigner function of the free packet.

    Momentum is measured in units of hbar / (2 sigma0), so that momentum and
    velocity coincide numerically; normalised to unit phase-space volume.
    """
    _require_free(cfg)
    var_p = 1.0 + cfg.T
    drift = x - cfg.x0 - p * t
    return np.exp(-0.5 * p * p / var_p - 0.5 * drift * drift) / (2.0 * np.pi * np.sqrt(var_p))


def momentum_distribution_free(cfg: DimensionlessConfig, p):
    """Time-independent momentum distribution of the free thermal packet."""
    _require_free(cfg)
    var_p = 1.0 + cfg.T
    return np.exp(-0.5 * p * p / var_p) / np.sqrt(2.0 * np.pi * var_p)
