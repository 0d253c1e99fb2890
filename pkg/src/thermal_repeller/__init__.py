"""Thermal Gaussian wave packets crossing a dissipative parabolic repeller.

The package works in reduced units (see :mod:`thermal_repeller.model`) and
provides packet propagation under Caldirola-Kanai and Kostin friction,
thermal (Maxwell-Boltzmann) ensembles, transmission probabilities and
Bohmian arrival, dwell, transmission and reflection times.
"""

__version__ = "0.1.0"

from .errors import (BracketingError, ConfigError, ConvergenceError, DegenerateError,  # noqa: E402
                     DomainError, EmptyEnsembleError, IntegrationError, NumericalError,
                     UndecidedError, UnsupportedError)
from .model import DimensionlessConfig, PhysicalParams, Scales, reduce, restore  # noqa: E402
from .numerics import DEFAULT_TOL, Tolerances  # noqa: E402
from .packet import center, packet_state, width  # noqa: E402
from .thermal import ThermalEnsemble, make_ensemble  # noqa: E402
from .times import (arrival_distribution, dwell_time, split_times, thermal_arrival,  # noqa: E402
                    thermal_times)
from .transmission import (p_tr_stationary, p_tr_thermal, transmission_curve,  # noqa: E402
                           truncated_ensemble, v0_min)
from .trajectories import count_transmission, trajectory  # noqa: E402

__all__ = [
    "__version__",
    "BracketingError", "ConfigError", "ConvergenceError", "DegenerateError", "DomainError",
    "EmptyEnsembleError", "IntegrationError", "NumericalError", "UndecidedError",
    "UnsupportedError",
    "DimensionlessConfig", "PhysicalParams", "Scales", "reduce", "restore",
    "DEFAULT_TOL", "Tolerances",
    "center", "packet_state", "width",
    "ThermalEnsemble", "make_ensemble",
    "arrival_distribution", "dwell_time", "split_times", "thermal_arrival", "thermal_times",
    "p_tr_stationary", "p_tr_thermal", "transmission_curve", "truncated_ensemble", "v0_min",
    "count_transmission", "trajectory",
]
