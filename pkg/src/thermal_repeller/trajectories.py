"""Bohmian trajectories of a Gaussian component.

The guidance velocity field of a Gaussian packet is affine in x, so every
trajectory is the packet center plus a rescaled initial offset:

    x(t) = x_c(t) + (x_init - x0) sigma(t).

Two trajectories therefore keep their order for as long as sigma > 0. The
trajectory through the barrier top at late times is the critical one: every
trajectory starting to its right is transmitted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special

from .errors import ConfigError, DegenerateError, UndecidedError
from .model import DimensionlessConfig
from .numerics import erfc
from .packet import WidthSolution, center, width
from .transmission import stationary_ratio

__all__ = [
    "Trajectory",
    "CountResult",
    "trajectory",
    "resolving_horizon",
    "classify",
    "count_transmission",
    "critical_initial_position",
]

TRANSMITTED = "transmitted"
REFLECTED = "reflected"
UNDECIDED = "undecided"

#: a packet is taken as resolved once its center or width exceeds this
RESOLVED_SCALE = 1e3


def resolving_horizon(cfg: DimensionlessConfig, widths: WidthSolution,
                      t_cap: float = 1e6) -> float:
    """First time on a doubling grid at which |x_c| or sigma reaches 1e3.

    Returns ``inf`` if this does not happen before ``t_cap``.
    """
    t = 1.0
    while t <= t_cap:
        x, _ = center(cfg, t)
        if abs(float(x)) >= RESOLVED_SCALE or float(widths(t)) >= RESOLVED_SCALE:
            return t
        t *= 2.0
    return np.inf


def classify(cfg: DimensionlessConfig, widths: WidthSolution, x_init,
             max_doublings: int = 8, t_cap: float = 1e6) -> np.ndarray:
    """Classify trajectories as transmitted or reflected by their late-time side.

    The sign of x(t)/sigma(t) is read at the resolving horizon and at twice
    that time. A trajectory is decided once both readings agree and their
    difference is smaller than the later value; otherwise the horizon is
    doubled, up to ``max_doublings`` times. Remaining cases are undecided.

    Returns
    -------
    ndarray of str
        One of ``"transmitted"``, ``"reflected"``, ``"undecided"`` per entry.
    """
    x_init = np.asarray(x_init, dtype=float)
    labels = np.full(x_init.shape, UNDECIDED, dtype=object)
    t = resolving_horizon(cfg, widths, t_cap)
    if not np.isfinite(t):
        return labels
    pending = np.ones(x_init.shape, dtype=bool)
    for _ in range(max_doublings + 1):
        if t > t_cap:
            break
        offs = x_init[pending] - cfg.x0
        r1 = float(center(cfg, t)[0] / widths(t)) + offs
        r2 = float(center(cfg, 2 * t)[0] / widths(2 * t)) + offs
        decided = (np.sign(r1) == np.sign(r2)) & (np.abs(r2 - r1) < np.abs(r2))
        idx = np.flatnonzero(pending)
        labels[idx[decided]] = np.where(r2[decided] > 0, TRANSMITTED, REFLECTED)
        pending[idx[decided]] = False
        if not pending.any():
            break
        t *= 2.0
    return labels


@dataclass(frozen=True)
class Trajectory:
    """One Bohmian trajectory.

    Attributes
    ----------
    x_init : starting position.
    classification : ``"transmitted"``, ``"reflected"`` or ``"undecided"``.
    """

    cfg: DimensionlessConfig
    widths: WidthSolution
    x_init: float
    classification: str

    def __call__(self, t):
        x, _ = center(self.cfg, t)
        return x + (self.x_init - self.cfg.x0) * self.widths(t)

    def velocity(self, t):
        _, v = center(self.cfg, t)
        return v + (self.x_init - self.cfg.x0) * self.widths.rate(t)


def trajectory(cfg: DimensionlessConfig, x_init: float,
               widths: WidthSolution | None = None) -> Trajectory:
    """Closed-form trajectory starting at ``x_init``, classified by its late-time side."""
    widths = widths or width(cfg)
    label = classify(cfg, widths, np.array([x_init]))[0]
    return Trajectory(cfg, widths, float(x_init), str(label))


class CountResult(NamedTuple):
    fraction: float
    stderr: float
    n: int


def count_transmission(cfg: DimensionlessConfig, n_samples: int = 10_000, seed: int = 0,
                       mode: str = "stratified",
                       widths: WidthSolution | None = None) -> CountResult:
    """Fraction of transmitted trajectories among samples of the initial density.

    Parameters
    ----------
    mode : {"stratified", "random"}
        ``"stratified"`` uses the midpoint quantiles (k + 1/2)/n of the
        initial Gaussian and ignores ``seed``; ``"random"`` draws i.i.d.
        starting points from ``numpy.random.default_rng(seed)``.

    Raises
    ------
    UndecidedError
        If any trajectory cannot be classified within the horizon.
    """
    if n_samples < 1000:
        raise ConfigError(f"need at least 1000 samples, got {n_samples}")
    widths = widths or width(cfg)
    if mode == "stratified":
        u = (np.arange(n_samples) + 0.5) / n_samples
        x_init = cfg.x0 + special.ndtri(u)
    elif mode == "random":
        x_init = cfg.x0 + np.random.default_rng(seed).standard_normal(n_samples)
    else:
        raise ConfigError(f"unknown sampling mode {mode!r}")
    labels = classify(cfg, widths, x_init)
    n_undecided = int(np.count_nonzero(labels == UNDECIDED))
    if n_undecided:
        raise UndecidedError(f"{n_undecided} of {n_samples} trajectories undecided; "
                             "the time horizon is too short for these parameters")
    p = float(np.count_nonzero(labels == TRANSMITTED)) / n_samples
    return CountResult(p, float(np.sqrt(p * (1.0 - p) / n_samples)), n_samples)


def critical_initial_position(cfg: DimensionlessConfig,
                              widths: WidthSolution | None = None) -> float:
    """Starting point of the trajectory that separates transmission from reflection.

    The late-time position over width of a trajectory tends to
    ``r_inf + (x_init - x0)``, where ``r_inf`` is the limiting
    center/width ratio. The critical trajectory is the root of this.

    Raises
    ------
    DegenerateError
        If the stationary transmission probability is 0 or 1 in floating point.
    """
    r_inf = stationary_ratio(cfg, cfg.v0, widths)
    p = 0.5 * erfc(-r_inf / np.sqrt(2.0))
    if p == 0.0 or p == 1.0:
        raise DegenerateError(f"transmission probability is {p:g}; no critical trajectory")
    return float(cfg.x0 - r_inf)
