"""Physical parameters and their reduction to dimensionless form.

Reference scales, for a particle of mass ``m`` and initial packet width
``sigma0``::

    time         t_s = 2 m sigma0^2 / hbar
    frequency    w_s = 1 / t_s
    temperature  T_s = hbar^2 / (4 m sigma0^2 k_B)
    velocity     v_s = sigma0 / t_s
    length       sigma0
    force        F_s = m sigma0 / t_s^2

Every other module works in these reduced units only. In them the
Maxwell-Boltzmann velocity distribution is a normal law of variance ``T``
and the free-packet width reads ``sqrt(1 + (1 + T) t^2)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

from scipy import constants

from .errors import ConfigError

HBAR = constants.hbar
K_B = constants.k
ELECTRON_MASS = constants.m_e
ANGSTROM = constants.angstrom

MODELS = (
    "conservative-free",
    "conservative-linear",
    "conservative-parabolic",
    "ck",
    "kostin",
)
CONSERVATIVE_MODELS = MODELS[:3]


@dataclass(frozen=True)
class PhysicalParams:
    """Parameters in SI units.

    ``K`` is the slope of the linear part of V(x) = K x - m omega^2 x^2 / 2.
    """

    mass: float
    sigma0: float
    x0: float
    omega: float = 0.0
    gamma: float = 0.0
    temperature: float = 0.0
    K: float = 0.0
    v0: float = 0.0

    def __post_init__(self):
        for name in ("mass", "sigma0", "x0", "omega", "gamma", "temperature", "K", "v0"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.mass <= 0 or self.sigma0 <= 0:
            raise ConfigError("mass and sigma0 must be positive")
        if self.omega < 0 or self.gamma < 0 or self.temperature < 0:
            raise ConfigError("omega, gamma and temperature must be non-negative")


@dataclass(frozen=True)
class Scales:
    time: float
    frequency: float
    temperature: float
    velocity: float
    length: float
    mass: float

    @classmethod
    def from_mass_width(cls, mass: float, sigma0: float) -> "Scales":
        if not (mass > 0 and sigma0 > 0):
            raise ConfigError("mass and sigma0 must be positive")
        t_s = 2.0 * mass * sigma0**2 / HBAR
        return cls(
            time=t_s,
            frequency=1.0 / t_s,
            temperature=HBAR**2 / (4.0 * mass * sigma0**2 * K_B),
            velocity=sigma0 / t_s,
            length=sigma0,
            mass=mass,
        )

    @property
    def force(self) -> float:
        return self.mass * self.length / self.time**2


@dataclass(frozen=True)
class DimensionlessConfig:
    """Reduced parameters of one simulation.

    Attributes
    ----------
    x0 : initial packet center in units of sigma0.
    omega : barrier frequency.
    gamma : friction coefficient.
    T : temperature.
    v0 : initial center velocity of a single component.
    K : linear force constant, normalised so a free fall reads x0 - K t^2 / 2.
    model : one of :data:`MODELS`.
    """

    x0: float = -20.0
    omega: float = 0.05
    gamma: float = 0.0
    T: float = 0.0
    v0: float = 0.0
    K: float = 0.0
    model: str = "ck"
    Omega: float = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("x0", "omega", "gamma", "T", "v0", "K"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ConfigError(f"{name} must be a number, got {value!r}") from None
            if not math.isfinite(value):
                raise ConfigError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.omega < 0 or self.gamma < 0 or self.T < 0:
            raise ConfigError("omega, gamma and T must be non-negative")
        if self.model in CONSERVATIVE_MODELS and self.gamma != 0:
            raise ConfigError(f"model {self.model!r} is frictionless; got gamma={self.gamma}")
        if self.model in ("conservative-free", "conservative-linear") and self.omega != 0:
            raise ConfigError(f"model {self.model!r} has no barrier; got omega={self.omega}")
        if self.model == "conservative-free" and self.K != 0:
            raise ConfigError("model 'conservative-free' has no linear force; got K != 0")
        object.__setattr__(self, "Omega", math.sqrt(self.omega**2 + 0.25 * self.gamma**2))

    @property
    def is_conservative(self) -> bool:
        return self.model in CONSERVATIVE_MODELS

    def replace(self, **changes) -> "DimensionlessConfig":
        return replace(self, **changes)


def check_scattering(cfg: DimensionlessConfig) -> None:
    """Warn if the packet does not start well to the left of the barrier top."""
    if cfg.x0 > -3.0:
        warnings.warn(
            f"x0={cfg.x0:g} > -3: the initial packet overlaps the barrier top; "
            "transmission formulas assume a packet well localised on the left",
            stacklevel=3,
        )


def reduce(p: PhysicalParams, model: str = "ck"):
    """Return ``(Scales, DimensionlessConfig)`` for physical parameters."""
    s = Scales.from_mass_width(p.mass, p.sigma0)
    cfg = DimensionlessConfig(
        x0=p.x0 / s.length,
        omega=p.omega * s.time,
        gamma=p.gamma * s.time,
        T=p.temperature / s.temperature,
        v0=p.v0 / s.velocity,
        K=p.K / s.force,
        model=model,
    )
    return s, cfg


_RESTORE_KINDS = {
    "time": lambda s: s.time,
    "length": lambda s: s.length,
    "velocity": lambda s: s.velocity,
    "temperature": lambda s: s.temperature,
    "frequency": lambda s: s.frequency,
    "force": lambda s: s.force,
    "probability-density": lambda s: 1.0 / s.length,
    "current": lambda s: s.frequency,
    "probability": lambda s: 1.0,
}


def restore(s: Scales, value, kind: str):
    """Convert a reduced quantity back to SI units."""
    try:
        factor = _RESTORE_KINDS[kind](s)
    except KeyError:
        raise ConfigError(f"unknown quantity kind {kind!r}; expected one of "
                          f"{sorted(_RESTORE_KINDS)}") from None
    return value * factor


def physical_from_config(s: Scales, cfg: DimensionlessConfig) -> PhysicalParams:
    """Inverse of :func:`reduce` for the parameter set itself."""
    return PhysicalParams(
        mass=s.mass,
        sigma0=s.length,
        x0=restore(s, cfg.x0, "length"),
        omega=restore(s, cfg.omega, "frequency"),
        gamma=restore(s, cfg.gamma, "frequency"),
        temperature=restore(s, cfg.T, "temperature"),
        K=restore(s, cfg.K, "force"),
        v0=restore(s, cfg.v0, "velocity"),
    )
