"""Independent reference computations used by the test suite and ``selftest``.

Each function here reaches a quantity by a different route from the
production code: brute-force quadrature instead of erfc closed forms,
SciPy's RK45 or a fixed-step RK4 instead of the adaptive width solver,
finite differences instead of analytic derivatives. Agreement between the
two routes is the evidence that both are right.
"""

from __future__ import annotations

import warnings

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate, optimize

from .model import DimensionlessConfig
from .packet import WidthSolution, center, density, packet_state, wigner_free
from .thermal import thermal_current, thermal_density, thermal_width

__all__ = [
    "damped_center_ode",
    "pinney_rk4",
    "parabolic_thermal_current",
    "free_thermal_variance",
    "fluctuation_variance_head",
    "density_route_transmission",
    "dwell_double_integral",
    "critical_transmission_time",
    "continuity_residual",
    "wigner_marginals",
    "gaussian_moment",
    "thermal_continuity_residual",
]

_GL_NODES, _GL_WEIGHTS = leggauss(48)


def _gl(f, a, b):
    """48-point Gauss-Legendre on [a, b]; exact enough for smooth Gaussians of width >= 1."""
    half, mid = 0.5 * (b - a), 0.5 * (b + a)
    return half * (f(mid + half * _GL_NODES) @ _GL_WEIGHTS)


def _quad_windows(f, t_end, window=5.0, points=None):
    """SciPy quad over consecutive windows of [0, t_end], splitting at ``points``."""
    total = 0.0
    a = 0.0
    with warnings.catch_warnings():
        # quad flags roundoff once the window contributions reach 1e-16
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        while a < t_end:
            b = min(a + window, t_end)
            inside = None if points is None else [p for p in points if a < p < b]
            total += integrate.quad(f, a, b, epsabs=1e-15, epsrel=1e-12, limit=400,
                                    points=inside or None)[0]
            a = b
    return total


def damped_center_ode(cfg: DimensionlessConfig, t: float) -> float:
    """Center from RK45 integration of x'' + gamma x' - omega^2 x = -K."""
    sol = integrate.solve_ivp(
        lambda s, y: [y[1], -cfg.gamma * y[1] + cfg.omega**2 * y[0] - cfg.K],
        (0.0, t), [cfg.x0, cfg.v0], method="RK45", rtol=1e-12, atol=1e-12)
    return float(sol.y[0, -1])


def pinney_rk4(gamma: float, omega: float, t: float, agree: float = 1e-8):
    """Width from classical RK4 on (sigma, sigma'), halving the step until two runs agree.

    Returns ``(sigma, sigma')`` at ``t``.
    """

    def rhs(y):
        s, p = y
        return np.array([p, -gamma * p + 1.0 / s**3 + omega**2 * s])

    def run(n):
        h = t / n
        y = np.array([1.0, 0.0])
        for _ in range(n):
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * h * k1)
            k3 = rhs(y + 0.5 * h * k2)
            k4 = rhs(y + h * k3)
            y = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        return y

    n = 256
    prev = run(n)
    while True:
        n *= 2
        cur = run(n)
        if abs(cur[0] - prev[0]) <= agree * abs(cur[0]):
            return float(cur[0]), float(cur[1])
        if n > 2**18:
            raise RuntimeError("fixed-step RK4 did not settle")
        prev = cur


def parabolic_thermal_current(cfg: DimensionlessConfig, x, t):
    """Thermal current of the frictionless parabolic repeller, in closed form.

    ``j = w sinh(wt) [x (1 + T + w^2) cosh(wt) - x0 (1 + T)]
    / (w^2 cosh^2(wt) + (1 + T) sinh^2(wt)) * rho_T``.
    """
    w, T = cfg.omega, cfg.T
    c, s = np.cosh(w * t), np.sinh(w * t)
    var = c * c + (1.0 + T) * s * s / (w * w)
    X = cfg.x0 * c
    rho = np.exp(-0.5 * (x - X) ** 2 / var) / np.sqrt(2.0 * np.pi * var)
    num = x * (1.0 + T + w * w) * c - cfg.x0 * (1.0 + T)
    return w * s * num / (w * w * c * c + (1.0 + T) * s * s) * rho


def free_thermal_variance(gamma: float, T: float, t):
    """Thermal variance of the damped free packet written out term by term."""
    e = np.exp(-gamma * t)
    return (1.0 + (1.0 - e) ** 2 / gamma**2
            + e * 4.0 * T / gamma**2 * np.sinh(0.5 * gamma * t) ** 2)


def fluctuation_variance_head(gamma: float, t):
    """Initial variance plus the commutator term of the fluctuation-based variance.

    In reduced units [x(0), x(t)] = 2i (1 - exp(-gamma t)) / gamma, so
    -[x(0), x(t)]^2 / 4 contributes (1 - exp(-gamma t))^2 / gamma^2.
    """
    comm = 2.0 * (1.0 - np.exp(-gamma * t)) / gamma
    return 1.0 + comm**2 / 4.0


def density_route_transmission(cfg: DimensionlessConfig, widths: WidthSolution, t: float) -> float:
    """Transmission probability as the integral of the thermal density over x > 0."""
    X = float(center(cfg.replace(v0=0.0), t)[0])
    spread = float(thermal_width(cfg, widths, t))
    f = lambda x: float(thermal_density(cfg, widths, x, t))  # noqa: E731
    lo, hi = 0.0, max(X, 0.0) + 40.0 * spread
    if X > 0:
        return (integrate.quad(f, lo, X, epsabs=1e-15, epsrel=1e-13, limit=500)[0]
                + integrate.quad(f, X, hi, epsabs=1e-15, epsrel=1e-13, limit=500)[0])
    return integrate.quad(f, lo, hi, epsabs=1e-15, epsrel=1e-13, limit=500)[0]


def _mass_inside(cfg, widths, x1, x2, t):
    return _gl(lambda x: density(packet_state(cfg, widths, np.full_like(x, t)), x), x1, x2)


def _horizon(cfg, widths, x1, x2, floor=1e-13):
    """Time after which the packet has left [x1, x2] to that precision."""
    t = 20.0
    while t < 1e6 and _mass_inside(cfg, widths, x1, x2, t) >= floor:
        t *= 1.5
    return t


def dwell_double_integral(cfg: DimensionlessConfig, widths: WidthSolution,
                          x1: float = -1.0, x2: float = 1.0) -> float:
    """Dwell time as the time integral of the density integrated over [x1, x2]."""
    return _quad_windows(lambda t: _mass_inside(cfg, widths, x1, x2, t),
                         _horizon(cfg, widths, x1, x2))


def critical_transmission_time(cfg: DimensionlessConfig, widths: WidthSolution,
                               x_crit: float, p_tr: float,
                               x1: float = -1.0, x2: float = 1.0) -> float:
    """Transmission time from the density to the right of the critical trajectory.

    tau_tr = (1/P_tr) int dt int_{x1}^{x2} rho(x, t) theta(x - x_c(t)) dx,
    where x_c(t) is the trajectory started at ``x_crit``.
    """

    def x_c(t):
        return float(center(cfg, t)[0] + (x_crit - cfg.x0) * widths(t))

    def inside(t):
        lo = max(x1, x_c(t))
        if lo >= x2:
            return 0.0
        return _mass_inside(cfg, widths, lo, x2, t)

    t_end = _horizon(cfg, widths, x1, x2)
    grid = np.linspace(0.0, t_end, 4001)
    xs = np.array([x_c(s) for s in grid])
    kinks = []
    for edge in (x1, x2):
        d = xs - edge
        for k in np.flatnonzero(np.sign(d[:-1]) != np.sign(d[1:])):
            kinks.append(optimize.brentq(lambda s: x_c(s) - edge, grid[k], grid[k + 1],
                                         xtol=1e-14))
    return _quad_windows(inside, t_end, points=sorted(kinks)) / p_tr


def continuity_residual(rho, j, x, t, step: float = 1e-4) -> float:
    """|d rho/dt + d j/dx| by central differences at one point."""
    drho = (rho(x, t + step) - rho(x, t - step)) / (2 * step)
    dj = (j(x + step, t) - j(x - step, t)) / (2 * step)
    return float(abs(drho + dj))


def wigner_marginals(cfg: DimensionlessConfig, t: float, x: float, p: float):
    """Position marginal at ``x``, momentum marginal at ``p`` and total mass of W.

    Computed with SciPy adaptive quadrature over the closed-form Wigner function.
    """
    # at fixed x the integrand is a Gaussian in p peaked at p_peak with
    # standard deviation at most sqrt(1 + T)
    var_p = 1.0 + cfg.T
    p_peak = t * (x - cfg.x0) / (1.0 / var_p + t * t)
    span = 20.0 * np.sqrt(var_p)
    pos = integrate.quad(lambda q: wigner_free(cfg, x, q, t), p_peak - span, p_peak + span,
                         points=[p_peak], epsabs=1e-14, epsrel=1e-12, limit=400)[0]
    x_mid = cfg.x0 + p * t
    mom = integrate.quad(lambda y: wigner_free(cfg, y, p, t), x_mid - 40.0, x_mid + 40.0,
                         epsabs=1e-14, epsrel=1e-12, limit=400)[0]
    sp = 12.0 * np.sqrt(1.0 + cfg.T)
    total = integrate.dblquad(lambda q, y: wigner_free(cfg, y, q, t),
                              cfg.x0 - sp * (1 + t) - 12, cfg.x0 + sp * (1 + t) + 12,
                              -sp, sp, epsabs=1e-12, epsrel=1e-11)[0]
    return pos, mom, total


def gaussian_moment(cfg: DimensionlessConfig, k: int, t: float = 0.0) -> float:
    """k-th momentum moment of the free thermal Wigner function by double quadrature."""
    sp = 14.0 * np.sqrt(1.0 + cfg.T)
    return integrate.dblquad(lambda q, y: q**k * wigner_free(cfg, y, q, t),
                             cfg.x0 - sp * (1 + t) - 14, cfg.x0 + sp * (1 + t) + 14,
                             -sp, sp, epsabs=1e-12, epsrel=1e-11)[0]


def thermal_continuity_residual(cfg, widths, x, t, ensemble=None, step: float = 1e-4) -> float:
    """Finite-difference continuity residual of the thermal density and current."""
    return continuity_residual(lambda a, b: thermal_density(cfg, widths, a, b, ensemble),
                               lambda a, b: thermal_current(cfg, widths, a, b, ensemble),
                               x, t, step)
