"""Acceptance criteria 1-10.

Each test prints one ``PASS``/``FAIL`` line (also repeated in the terminal
summary) and then asserts, so a failing criterion both shows its numbers and
fails the run. A criterion passes only if its values are within tolerance
and it finished inside its time budget.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from thermal_repeller import oracles
from thermal_repeller.cli import main
from thermal_repeller.model import DimensionlessConfig
from thermal_repeller.numerics import Tolerances, solve_ivp
from thermal_repeller.packet import (PINNEY_TOL, WidthSolution, current, density,
                                     momentum_distribution_free, packet_state, width)
from thermal_repeller.thermal import make_ensemble, thermal_current, thermal_density, thermal_q
from thermal_repeller.times import dwell_time, split_times, thermal_arrival
from thermal_repeller.trajectories import count_transmission, critical_initial_position
from thermal_repeller.transmission import p_tr_stationary, stationary_component, v0_min


class Verdict:
    def __init__(self, number, title, budget):
        self.number, self.title, self.budget = number, title, budget
        self.checks = []

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def check(self, ok, detail):
        self.checks.append((bool(ok), detail))

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if exc_type is not None:
            self.checks.append((False, f"raised {exc_type.__name__}: {exc}"))
        self.checks.append((elapsed < self.budget, f"runtime {elapsed:.1f}s < {self.budget:g}s"))
        self.passed = all(ok for ok, _ in self.checks)
        failed = [d for ok, d in self.checks if not ok]
        detail = "; ".join(failed) if failed else "; ".join(d for _, d in self.checks)
        line = f"{'PASS' if self.passed else 'FAIL'} criterion {self.number}: {self.title} | {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        return False


def _done(v):
    assert v.passed, "; ".join(d for ok, d in v.checks if not ok)


def test_criterion_1_threshold_velocities():
    published = {0.05: -1.304, 0.1: -0.3111}
    with Verdict(1, "threshold velocities within 10%", 5.0) as v:
        for omega, ref in published.items():
            cfg = DimensionlessConfig(omega=omega)
            w = width(cfg)
            for reading in ("stationary", "max-over-time"):
                got = v0_min(cfg, 0.01, reading, w)
                v.check(abs(got / ref - 1) <= 0.1,
                        f"omega={omega} {reading}: {got:.5f} vs {ref} ({100 * (got / ref - 1):+.1f}%)")
    _done(v)


@pytest.mark.slow
def test_criterion_2_dwell_maximum():
    gammas = np.round(np.arange(0.0, 0.1001, 0.005), 3)
    expected = {"ck": 0.025, "kostin": 0.04}
    with Verdict(2, "tau_D(gamma) argmax at T=0, omega=0.05", 300.0) as v:
        for model, ref in expected.items():
            taus = [dwell_time(DimensionlessConfig(omega=0.05, gamma=g, model=model))
                    for g in gammas]
            peak = gammas[int(np.argmax(taus))]
            v.check(abs(peak - ref) <= 0.005 + 1e-12, f"{model}: argmax {peak:g} vs {ref} +- 0.005")
    _done(v)


def test_criterion_3_high_temperature_limit():
    Ts = np.logspace(-2, 6, 20)
    with Verdict(3, "P_tr -> 1/2 as T grows", 10.0) as v:
        for model, gamma in (("ck", 0.0), ("ck", 0.05), ("kostin", 0.05)):
            cfg = DimensionlessConfig(omega=0.05, gamma=gamma, model=model)
            w = width(cfg)
            p = np.array([p_tr_stationary(cfg.replace(T=T), w) for T in Ts])
            v.check(0.499 <= p[-1] <= 0.5, f"{model} gamma={gamma}: P(T=1e6)={p[-1]:.5f}")
            v.check(np.all(np.diff(p) > 0), f"{model} gamma={gamma}: strictly increasing in T")
    _done(v)


def test_criterion_4_monotonicity():
    gammas = np.linspace(0.0, 0.1, 20)
    omegas = np.linspace(0.02, 0.2, 20)
    with Verdict(4, "P_tr decreasing in gamma and omega", 30.0) as v:
        for model in ("ck", "kostin"):
            for omega in (0.05, 0.1):
                for T in (0.0, 1.0):
                    p = [p_tr_stationary(DimensionlessConfig(omega=omega, gamma=g, T=T,
                                                             model=model)) for g in gammas]
                    v.check(np.all(np.diff(p) < 0), f"{model} omega={omega} T={T}: in gamma")
            for gamma in (0.0, 0.05):
                for T in (0.0, 1.0):
                    p = [p_tr_stationary(DimensionlessConfig(omega=o, gamma=gamma, T=T,
                                                             model=model)) for o in omegas]
                    v.check(np.all(np.diff(p) < 0), f"{model} gamma={gamma} T={T}: in omega")
    _done(v)


def _mixture_deviation(n_points=200):
    rng = np.random.default_rng(5)
    dev = 0.0
    models = ("ck", "kostin", "conservative-parabolic")
    for k in range(n_points):
        model = models[k % 3]
        gamma = 0.0 if model.startswith("conservative") else rng.choice([0.0, 0.02, 0.05, 0.1])
        cfg = DimensionlessConfig(omega=float(rng.choice([0.05, 0.1])), gamma=float(gamma),
                                  T=float(rng.uniform(0.1, 3.0)), model=model)
        w = width(cfg)
        ens = make_ensemble(cfg.T, 64)
        x, t = rng.uniform(-40, 40), rng.uniform(0, 60)
        for f in (thermal_density, thermal_current, thermal_q):
            dev = max(dev, abs(float(f(cfg, w, x, t)) - float(f(cfg, w, x, t, ens))))
    return dev


@pytest.mark.slow
def test_criterion_5_oracle_equivalence():
    with Verdict(5, "oracle equivalence", 300.0) as v:
        dev = _mixture_deviation()
        v.check(dev <= 1e-8, f"(a) mixture max dev {dev:.1e} <= 1e-8")

        worst = 0.0
        for model in ("ck", "kostin"):
            for gamma in (0.0, 0.05, 0.1):
                cfg = DimensionlessConfig(omega=0.05, gamma=gamma, model=model)
                w = width(cfg)
                a = dwell_time(cfg, widths=w)
                worst = max(worst, abs(a - oracles.dwell_double_integral(cfg, w)) / a)
        v.check(worst <= 1e-6, f"(b) dwell routes rel dev {worst:.1e} <= 1e-6")

        resid = 0.0
        for model in ("ck", "kostin"):
            for omega in (0.05, 0.1):
                for gamma in (0.0, 0.05, 0.1):
                    for v0 in (-0.5, 0.0, 0.5):
                        r = split_times(DimensionlessConfig(omega=omega, gamma=gamma, v0=v0,
                                                            model=model))
                        resid = max(resid, r.residual)
        v.check(resid <= 1e-6, f"(c) split identity residual {resid:.1e} <= 1e-6")

        for model, gamma in (("ck", 0.0), ("ck", 0.05), ("kostin", 0.05)):
            cfg = DimensionlessConfig(omega=0.05, gamma=gamma, model=model)
            res = count_transmission(cfg, 10_000)
            z = abs(res.fraction - stationary_component(cfg)) / res.stderr
            v.check(z <= 3.0, f"(d) {model} gamma={gamma}: counting off by {z:.2f} stderr")

        for model in ("ck", "kostin"):
            cfg = DimensionlessConfig(omega=0.05, gamma=0.05, model=model)
            w = width(cfg)
            r = split_times(cfg, widths=w)
            ref = oracles.critical_transmission_time(cfg, w, critical_initial_position(cfg, w),
                                                     r.p_tr)
            rel = abs(r.tau_tr - ref) / ref
            v.check(rel <= 1e-5, f"(e) {model}: critical-trajectory rel dev {rel:.1e}")
    _done(v)


def test_criterion_6_pinney():
    t = np.linspace(0.0, 40.0, 801)
    with Verdict(6, "Pinney solver validation", 30.0) as v:
        for omega in (0.05, 0.1):
            exact = width(DimensionlessConfig(omega=omega, model="conservative-parabolic"))(t)
            cfg = DimensionlessConfig(omega=omega, model="kostin")
            prod = WidthSolution(cfg)(t)
            half = WidthSolution(cfg, tol=Tolerances(rel=PINNEY_TOL.rel / 2,
                                                     abs=PINNEY_TOL.abs / 2))(t)
            dev = np.max(np.abs(prod - exact))
            v.check(dev <= 1e-8, f"omega={omega}: |kostin - closed form| {dev:.1e}")
            step = np.max(np.abs(prod - half))
            v.check(step <= 1e-8, f"omega={omega}: halving tol moves sigma by {step:.1e}")

        def err(r):
            sol = solve_ivp(lambda s, y: np.array([y[1], -y[0]]), [1.0, 0.0], [0.0, 50.0],
                            Tolerances(rel=r, abs=r * 1e-3))
            return abs(float(np.ravel(sol(50.0))[0]) - np.cos(50.0))

        ratios = [err(r) / err(r / 2) for r in (1e-5, 1e-6, 1e-7, 1e-8)]
        v.check(min(ratios) >= 2.0, f"oscillator error ratio per halving >= 2 (min {min(ratios):.2f})")
    _done(v)


def test_criterion_7_continuity():
    rng = np.random.default_rng(13)
    with Verdict(7, "continuity residuals", 30.0) as v:
        for model, gamma in (("ck", 0.05), ("kostin", 0.05), ("conservative-parabolic", 0.0)):
            cfg = DimensionlessConfig(omega=0.05, gamma=gamma, v0=0.3, T=1.0, model=model)
            w = width(cfg)
            pure = thermal = 0.0
            for x, t in zip(rng.uniform(-40, 40, 100), rng.uniform(1, 80, 100)):
                pure = max(pure, oracles.continuity_residual(
                    lambda a, b: density(packet_state(cfg, w, b), a),
                    lambda a, b: current(packet_state(cfg, w, b), a), x, t))
                thermal = max(thermal, oracles.thermal_continuity_residual(cfg, w, x, t))
            v.check(max(pure, thermal) <= 1e-6,
                    f"{model}: pure {pure:.1e}, thermal {thermal:.1e}")
    _done(v)


def test_criterion_8_arrival():
    from scipy import integrate

    def area(d):
        return integrate.quad(d.pdf, 0.0, d.t[-1], points=[d.peak_time], limit=500,
                              epsabs=1e-13, epsrel=1e-12)[0]

    with Verdict(8, "arrival-time distributions", 120.0) as v:
        dists = {}
        for omega in (0.05, 0.1):
            for T in (0.0, 1.0, 5.0):
                dists[omega, T] = thermal_arrival(DimensionlessConfig(omega=omega, T=T))
        dists["ck-friction"] = thermal_arrival(DimensionlessConfig(omega=0.05, gamma=0.05, T=1.0))
        dists["kostin-friction"] = thermal_arrival(
            DimensionlessConfig(omega=0.05, gamma=0.05, model="kostin"))
        worst = max(abs(area(d) - 1.0) for d in dists.values())
        v.check(worst <= 1e-8, f"normalization max dev {worst:.1e}")
        for omega in (0.05, 0.1):
            peaks = [dists[omega, T].peak_time for T in (0.0, 1.0, 5.0)]
            means = [dists[omega, T].mean for T in (0.0, 1.0, 5.0)]
            v.check(np.all(np.diff(peaks) < 0), f"omega={omega}: peaks "
                    + "/".join(f"{p:.2f}" for p in peaks))
            v.check(np.all(np.diff(means) < 0), f"omega={omega}: means "
                    + "/".join(f"{m:.2f}" for m in means))
        v.check(all(dists[0.1, T].mean < dists[0.05, T].mean for T in (0.0, 1.0, 5.0)),
                "mean at omega=0.1 below omega=0.05")
    _done(v)


def test_criterion_9_wigner():
    with Verdict(9, "free Wigner function consistency", 10.0) as v:
        worst = 0.0
        for T in (0.0, 1.0, 3.0):
            cfg = DimensionlessConfig(x0=-20.0, omega=0.0, T=T, model="conservative-free")
            w = width(cfg)
            for t, x, p in ((0.0, -20.0, 0.0), (2.0, -18.5, 0.7), (5.0, -23.0, -1.2)):
                pos, mom, total = oracles.wigner_marginals(cfg, t, x, p)
                worst = max(worst, abs(pos - float(thermal_density(cfg, w, x, t))),
                            abs(mom - float(momentum_distribution_free(cfg, p))),
                            abs(total - 1.0))
        v.check(worst <= 1e-8, f"marginals and norm max dev {worst:.1e}")
    _done(v)


def test_criterion_10_determinism(tmp_path):
    runs = [["arrival", "--T-bar", "0", "1", "--points", "301"],
            ["times", "--figure", "2", "--omega-bar", "0.05", "--gamma-range", "0", "0.02", "0.01"],
            ["transmission", "--sweep", "temperature"]]
    with Verdict(10, "byte-identical repeated CLI output", 120.0) as v:
        for label in ("a", "b"):
            for argv in runs:
                assert main([*argv, "--output-dir", str(tmp_path / label)]) == 0
        names = sorted(p.name for p in (tmp_path / "a").iterdir())
        same = all((tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()
                   for n in names)
        v.check(same and len(names) >= 6, f"{len(names)} CSV files identical across runs")
    _done(v)
