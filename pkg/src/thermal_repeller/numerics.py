"""Numerical kernels shared by the physics modules.

The error functions are evaluated in-repo with the rational minimax
approximations of the Sun fdlibm library (``s_erf.c``), so results do not
depend on the platform libm. Everything else is a thin, contract-enforcing
layer over numpy/scipy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.integrate
import scipy.optimize
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss

from .errors import (
    BracketingError,
    ConfigError,
    ConvergenceError,
    DomainError,
    IntegrationError,
)

__all__ = [
    "Tolerances",
    "QuadratureRule",
    "OdeSolution",
    "erf",
    "erfc",
    "sinhc",
    "gauss_hermite",
    "integrate_panels",
    "integrate_time_tail",
    "solve_ivp",
    "find_root",
]


@dataclass(frozen=True)
class Tolerances:
    """Accuracy targets for quadrature, ODE integration and root finding."""

    rel: float = 1e-9
    abs: float = 1e-12
    t_tail_cutoff: float = 1e-10

    def __post_init__(self):
        for name in ("rel", "abs", "t_tail_cutoff"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ConfigError(f"tolerance {name} must be finite and > 0, got {value!r}")
        if self.rel >= 1:
            raise ConfigError(f"relative tolerance must be < 1, got {self.rel!r}")


DEFAULT_TOL = Tolerances()


# ---------------------------------------------------------------------------
# error functions (fdlibm s_erf.c, vectorised)
# ---------------------------------------------------------------------------

_ERX = 8.45062911510467529297e-01
_EFX = 1.28379167095512586316e-01

_PP = (1.28379167095512558561e-01, -3.25042107247001499370e-01,
       -2.84817495755985104766e-02, -5.77027029648944159157e-03,
       -2.37630166566501626084e-05)
_QQ = (1.0, 3.97917223959155352819e-01, 6.50222499887672944485e-02,
       5.08130628187576562776e-03, 1.32494738004321644526e-04,
       -3.96022827877536812320e-06)
_PA = (-2.36211856075265944077e-03, 4.14856118683748331666e-01,
       -3.72207876035701323847e-01, 3.18346619901161753674e-01,
       -1.10894694282396677476e-01, 3.54783043256182359371e-02,
       -2.16637559486879084300e-03)
_QA = (1.0, 1.06420880400844228286e-01, 5.40397917702171048937e-01,
       7.18286544141962662868e-02, 1.26171219808761642112e-01,
       1.36370839120290507362e-02, 1.19844998467991074170e-02)
_RA = (-9.86494403484714822705e-03, -6.93858572707181764372e-01,
       -1.05586262253232909814e01, -6.23753324503260060396e01,
       -1.62396669462573470355e02, -1.84605092906711035994e02,
       -8.12874355063065934246e01, -9.81432934416914548592e00)
_SA = (1.0, 1.96512716674392571292e01, 1.37657754143519042600e02,
       4.34565877475229228821e02, 6.45387271733267880336e02,
       4.29008140027567833386e02, 1.08635005541779435134e02,
       6.57024977031928170135e00, -6.04244152148580987438e-02)
_RB = (-9.86494292470009928597e-03, -7.99283237680523006574e-01,
       -1.77579549177547519889e01, -1.60636384855821916062e02,
       -6.37566443368389627722e02, -1.02509513161107724954e03,
       -4.83519191608651397019e02)
_SB = (1.0, 3.03380607434824582924e01, 3.25792512996573918826e02,
       1.53672958608443695994e03, 3.19985821950859553908e03,
       2.55305040643316442583e03, 4.74528541206955367215e02,
       -2.24409524465858183362e01)

_HIGH_WORD = np.uint64(0xFFFFFFFF00000000)


def _horner(coeffs, z):
    out = np.full_like(z, coeffs[-1])
    for c in coeffs[-2::-1]:
        out = out * z + c
    return out


def _as_checked_array(x):
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError("error function argument must be finite")
    return arr


def _tail_term(a):
    """exp(-a^2) * R(1/a^2) / a for 1.25 <= a < 28, without cancellation.

    ``a`` is split into ``z + (a - z)`` with ``z`` holding the high 32 bits,
    so that ``exp(-a^2)`` is formed from an exactly representable ``z^2``.
    """
    s = 1.0 / (a * a)
    lower = a < 1.0 / 0.35
    ratio = np.where(lower, _horner(_RA, s) / _horner(_SA, s),
                     _horner(_RB, s) / _horner(_SB, s))
    z = (a.view(np.uint64) & _HIGH_WORD).view(np.float64)
    return np.exp(-z * z - 0.5625) * np.exp((z - a) * (z + a) + ratio) / a


def _unwrap(x, out):
    return float(out) if np.ndim(x) == 0 else out


def erfc(x):
    """Complementary error function, elementwise.

    Accepts scalars or arrays; non-finite input raises :class:`DomainError`.
    Relative error is at the level of a few ulp wherever the result is a
    normal double.
    """
    xa = _as_checked_array(x)
    x1 = np.atleast_1d(xa)
    a = np.abs(x1)
    out = np.empty_like(x1)

    small = a < 0.84375
    if np.any(small):
        xs = x1[small]
        z = xs * xs
        y = _horner(_PP, z) / _horner(_QQ, z)
        quarter = xs < 0.25
        out[small] = np.where(quarter, 1.0 - (xs + xs * y), 0.5 - (xs * y + (xs - 0.5)))

    mid = (a >= 0.84375) & (a < 1.25)
    if np.any(mid):
        s = a[mid] - 1.0
        p = _horner(_PA, s) / _horner(_QA, s)
        out[mid] = np.where(x1[mid] >= 0, (1.0 - _ERX) - p, 1.0 + (_ERX + p))

    tail = (a >= 1.25) & (a < 28.0)
    if np.any(tail):
        r = _tail_term(a[tail])
        out[tail] = np.where(x1[tail] > 0, r, 2.0 - r)

    huge = a >= 28.0
    if np.any(huge):
        out[huge] = np.where(x1[huge] > 0, 0.0, 2.0)

    return _unwrap(xa, out.reshape(xa.shape))


def erf(x):
    """Error function, elementwise; companion of :func:`erfc`."""
    xa = _as_checked_array(x)
    x1 = np.atleast_1d(xa)
    a = np.abs(x1)
    out = np.empty_like(x1)

    small = a < 0.84375
    if np.any(small):
        xs = x1[small]
        z = xs * xs
        y = _horner(_PP, z) / _horner(_QQ, z)
        out[small] = np.where(a[small] < 2.0**-28, xs + _EFX * xs, xs + xs * y)

    mid = (a >= 0.84375) & (a < 1.25)
    if np.any(mid):
        s = a[mid] - 1.0
        p = _horner(_PA, s) / _horner(_QA, s)
        out[mid] = np.sign(x1[mid]) * (_ERX + p)

    tail = (a >= 1.25) & (a < 6.0)
    if np.any(tail):
        r = _tail_term(a[tail])
        out[tail] = np.sign(x1[tail]) * (1.0 - r)

    big = a >= 6.0
    if np.any(big):
        out[big] = np.sign(x1[big])

    return _unwrap(xa, out.reshape(xa.shape))


def sinhc(x):
    """sinh(x)/x with a series branch near the origin; sinhc(0) == 1."""
    xa = np.asarray(x, dtype=np.float64)
    x2 = xa * xa
    series = 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        direct = np.sinh(xa) / xa
    out = np.where(np.abs(xa) < 1e-4, series, direct)
    return _unwrap(xa, out)


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights of a quadrature rule."""

    nodes: np.ndarray
    weights: np.ndarray
    kind: str

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ConfigError("nodes and weights must be 1-d arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ConfigError("quadrature nodes must be strictly increasing")
        if np.any(weights <= 0):
            raise ConfigError("quadrature weights must be positive")
        nodes.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.size

    def apply(self, values):
        """Weighted sum of ``values`` sampled at the nodes (last axis)."""
        return np.asarray(values) @ self.weights


def gauss_hermite(n: int) -> QuadratureRule:
    """Gauss-Hermite rule for the weight exp(-x^2), 2 <= n <= 256."""
    if isinstance(n, bool) or int(n) != n or not 2 <= n <= 256:
        raise ConfigError(f"Gauss-Hermite order must be an integer in [2, 256], got {n!r}")
    nodes, weights = hermgauss(int(n))
    return QuadratureRule(nodes, weights, "gauss-hermite")


_GL_LO = leggauss(10)
_GL_HI = leggauss(21)


def _panel_sums(f, a, b):
    """Low/high order Gauss-Legendre sums on every panel [a_i, b_i]."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x_lo = mid[:, None] + half[:, None] * _GL_LO[0][None, :]
    x_hi = mid[:, None] + half[:, None] * _GL_HI[0][None, :]
    n_lo = x_lo.size
    values = np.asarray(f(np.concatenate([x_lo.ravel(), x_hi.ravel()])), dtype=float)
    if not np.all(np.isfinite(values)):
        raise DomainError("integrand returned non-finite values")
    f_lo = values[:n_lo].reshape(x_lo.shape)
    f_hi = values[n_lo:].reshape(x_hi.shape)
    return half * (f_lo @ _GL_LO[1]), half * (f_hi @ _GL_HI[1])


def integrate_panels(f: Callable, a: float, b: float, rel: float = 1e-10,
                     abs_tol: float = 1e-14, n_start: int = 4,
                     max_panels: int = 20000) -> float:
    """Adaptive Gauss-Legendre panel quadrature of a vectorised ``f`` on [a, b].

    Panels are bisected while the summed difference between the 10- and
    21-point rules exceeds ``max(abs_tol, rel * |I|)``.
    """
    if b == a:
        return 0.0
    edges = np.linspace(a, b, n_start + 1)
    lo, hi = edges[:-1], edges[1:]
    done = 0.0
    while True:
        i_lo, i_hi = _panel_sums(f, lo, hi)
        err = np.abs(i_hi - i_lo)
        total = done + i_hi.sum()
        target = max(abs_tol, rel * abs(total))
        if err.sum() <= target:
            return float(total)
        # panels whose error is below their share of the budget are frozen
        share = target * (hi - lo) / (b - a)
        keep = err <= share
        done += i_hi[keep].sum()
        lo, hi = lo[~keep], hi[~keep]
        if 2 * lo.size > max_panels:
            raise ConvergenceError("adaptive panel quadrature exceeded the panel budget",
                                   partial=float(total))
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        order = np.argsort(lo, kind="stable")
        lo, hi = lo[order], hi[order]


def integrate_time_tail(f: Callable, t_start: float = 0.0, tol: Tolerances = DEFAULT_TOL,
                        window: float = 10.0, growth: float = 1.25,
                        max_windows: int = 10**6, t_max: float = np.inf) -> float:
    """Integrate a vectorised, eventually decaying ``f`` over [t_start, inf).

    The half line is covered by consecutive windows whose width grows by
    ``growth`` each step; each window is integrated adaptively. Integration
    stops once three consecutive windows each contribute less than
    ``tol.t_tail_cutoff`` times the accumulated value.

    Raises
    ------
    ConvergenceError
        If the stopping rule is not met within ``max_windows`` windows or
        before ``t_max``; the accumulated value is attached as ``partial``.
    """
    if window <= 0 or growth < 1:
        raise ConfigError("window must be > 0 and growth >= 1")
    total = 0.0
    quiet = 0
    a = float(t_start)
    width = float(window)
    for _ in range(max_windows):
        b = a + width
        if b > t_max:
            break
        part = integrate_panels(f, a, b, rel=0.1 * tol.rel, abs_tol=0.01 * tol.abs * width)
        total += part
        if total != 0.0 and abs(part) < tol.t_tail_cutoff * abs(total):
            quiet += 1
            if quiet == 3:
                return total
        else:
            quiet = 0
        a = b
        width *= growth
    raise ConvergenceError(
        f"tail integral not converged by t={a:.6g} "
        + (f"(time cap t_max={t_max:g})" if a + width > t_max else "(window cap)"),
        partial=total,
    )


# ---------------------------------------------------------------------------
# ODE integration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OdeSolution:
    """Accepted steps of an adaptive integration plus a dense interpolant."""

    t_grid: np.ndarray
    states: np.ndarray
    interpolant: Callable = field(repr=False)

    @property
    def t0(self) -> float:
        return float(self.t_grid[0])

    @property
    def t_end(self) -> float:
        return float(self.t_grid[-1])

    def __call__(self, t):
        """State(s) at ``t``; shape (n_state,) or (n_state, len(t))."""
        ta = np.asarray(t, dtype=float)
        slack = 1e-12 * max(1.0, abs(self.t_end))
        if np.any(ta < self.t0 - slack) or np.any(ta > self.t_end + slack):
            raise DomainError(
                f"dense output requested outside [{self.t0:g}, {self.t_end:g}]")
        return self.interpolant(np.clip(ta, self.t0, self.t_end))


def solve_ivp(rhs: Callable, y0, t_span, tol: Tolerances = DEFAULT_TOL,
              method: str = "DOP853") -> OdeSolution:
    """Adaptive explicit Runge-Kutta integration with dense output.

    ``rhs(t, y)`` returns dy/dt. The default method is Dormand-Prince 8(5,3).
    """
    t0, t1 = map(float, t_span)
    if not t1 > t0:
        raise ConfigError(f"t_span must be increasing, got {t_span!r}")
    if method not in ("DOP853", "RK45"):
        raise ConfigError(f"unsupported explicit method {method!r}")
    with np.errstate(over="ignore", invalid="ignore"):
        sol = scipy.integrate.solve_ivp(rhs, (t0, t1), np.atleast_1d(np.asarray(y0, float)),
                                        method=method, rtol=tol.rel, atol=tol.abs,
                                        dense_output=True)
    if sol.status != 0 or not np.all(np.isfinite(sol.y)):
        t_fail = float(sol.t[-1]) if sol.t.size else t0
        raise IntegrationError(f"ODE integration failed at t={t_fail:.6g}: {sol.message}",
                               t_fail=t_fail)
    return OdeSolution(sol.t, sol.y.T.copy(), sol.sol)


# ---------------------------------------------------------------------------
# root finding
# ---------------------------------------------------------------------------

def find_root(f: Callable[[float], float], bracket, tol: Tolerances = DEFAULT_TOL) -> float:
    """Bracketed scalar root by Brent's method."""
    a, b = map(float, bracket)
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if not (np.isfinite(fa) and np.isfinite(fb)) or np.sign(fa) == np.sign(fb):
        raise BracketingError(f"no sign change on [{a:g}, {b:g}]: f(a)={fa:g}, f(b)={fb:g}")
    # converging past the requested tolerance is cheap for Brent and keeps
    # results independent of where inside the tolerance band the iteration stops
    return float(scipy.optimize.brentq(f, a, b, xtol=1e-3 * min(tol.abs, tol.rel),
                                       rtol=4 * np.finfo(float).eps, maxiter=500))
