"""Command-line front end.

Subcommands write CSV files (see :mod:`thermal_repeller.series`) into
``--output-dir``::

    thermal-repeller arrival       # arrival-time densities and means vs T
    thermal-repeller times         # dwell / transmission times (--figure 2, 3 or 4)
    thermal-repeller transmission  # P_tr sweeps, or threshold velocities with --v0-min
    thermal-repeller selftest      # oracle-equivalence checks

Exit codes: 0 success, 1 selftest failure, 2 usage or configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, NumericalError
from .model import MODELS, DimensionlessConfig, Scales, check_scattering
from .numerics import Tolerances
from .packet import width
from .selftest import run_checks
from .series import TimeSeries
from .thermal import make_ensemble
from .times import dwell_time, interval_probability, thermal_arrival, thermal_times
from .transmission import p_tr_stationary, p_tr_thermal, truncated_ensemble, v0_min

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_SELFTEST, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _add_common(p: argparse.ArgumentParser, omega_default, T_default, model_default,
                multi_omega=True, multi_T=True):
    g = p.add_argument_group("parameters (dimensionless)")
    g.add_argument("--model", nargs="+", choices=MODELS, default=model_default, metavar="MODEL",
                   help=f"dissipation model(s): {', '.join(MODELS)}")
    g.add_argument("--x0-bar", type=float, default=-20.0, help="initial packet center")
    g.add_argument("--omega-bar", type=float, nargs="+" if multi_omega else None,
                   default=omega_default, help="barrier frequency")
    g.add_argument("--gamma-bar", type=float, nargs="+", default=None,
                   help="friction (default 0; figures 3 and 4 use their own sets)")
    g.add_argument("--T-bar", type=float, nargs="+" if multi_T else None, default=T_default,
                   help="temperature")
    g.add_argument("--nodes", type=int, default=64, help="Gauss-Hermite nodes per ensemble")
    g.add_argument("--threshold", type=float, default=0.01,
                   help="minimum component transmission kept in thermal ensembles")
    g.add_argument("--no-renormalize", action="store_true",
                   help="keep raw Maxwell-Boltzmann weights after truncation")
    g.add_argument("--x1-bar", type=float, default=-1.0, help="interval start")
    g.add_argument("--x2-bar", type=float, default=1.0, help="interval end")
    g.add_argument("--rel-tol", type=float, default=1e-9, help="relative tolerance")
    g.add_argument("--abs-tol", type=float, default=1e-12, help="absolute tolerance")
    g.add_argument("--t-bar-max", type=float, default=None,
                   help="time by which tail integrals must converge (exit 3 otherwise)")
    ph = p.add_argument_group("physical input (SI units, with --physical)")
    ph.add_argument("--physical", action="store_true",
                    help="read --x0, --omega, --gamma, --temperature in SI units")
    ph.add_argument("--mass", type=float, default=None, help="particle mass, kg")
    ph.add_argument("--sigma0", type=float, default=None, help="initial width, m")
    ph.add_argument("--x0", type=float, default=None, help="initial center, m")
    ph.add_argument("--omega", type=float, nargs="+", default=None, help="barrier frequency, 1/s")
    ph.add_argument("--gamma", type=float, nargs="+", default=None, help="friction, 1/s")
    ph.add_argument("--temperature", type=float, nargs="+", default=None, help="temperature, K")
    o = p.add_argument_group("output")
    o.add_argument("--config", default=None, help="key=value file; flags override it")
    o.add_argument("--output-dir", default=".", help="directory for CSV files")
    o.add_argument("--plot-script", action="store_true",
                   help="also write a matplotlib script that plots the CSV files")
    o.add_argument("--jobs", type=int, default=1,
                   help="worker processes for sweeps (output order is unaffected)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="thermal-repeller",
                     description="Thermal wave packets crossing a dissipative parabolic repeller.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("arrival", help="arrival-time distributions at a detector")
    _add_common(p, [0.05], [0.0, 1.0, 5.0], ["ck"])
    p.add_argument("--xd-bar", type=float, default=20.0, help="detector position")
    p.add_argument("--points", type=int, default=2001, help="output grid size")

    p = sub.add_parser("times", help="dwell, transmission and reflection times")
    _add_common(p, None, None, ["ck", "kostin"])
    p.add_argument("--figure", type=int, choices=(2, 3, 4), required=True,
                   help="2: vs friction; 3: interval probability vs time; 4: thermal vs T")
    p.add_argument("--gamma-range", type=float, nargs=3, metavar=("START", "STOP", "STEP"), default=(0.0, 0.1, 0.005),
                   help="START STOP STEP of the friction sweep (figures 2 and 3)")
    p.add_argument("--T-range", type=float, nargs=3, metavar=("START", "STOP", "STEP"), default=(0.0, 5.0, 0.25),
                   help="START STOP STEP of the temperature sweep (figure 4)")
    p.add_argument("--t-range", type=float, nargs=3, metavar=("START", "STOP", "STEP"), default=(0.0, 150.0, 0.25),
                   help="START STOP STEP of the time grid (figure 3)")

    p = sub.add_parser("transmission", help="transmission probabilities")
    _add_common(p, [0.05], [0.0], ["ck"])
    p.add_argument("--sweep", choices=("gamma", "omega", "temperature", "time"),
                   default=None, help="variable to sweep")
    p.add_argument("--values", type=float, nargs="+", default=None,
                   help="explicit sweep values (overrides --range)")
    p.add_argument("--range", type=float, nargs=3, metavar=("START", "STOP", "STEP"), default=None, dest="sweep_range",
                   help="START STOP STEP of the sweep")
    p.add_argument("--log", action="store_true",
                   help="sweep START..STOP with STEP points per decade, log-spaced")
    p.add_argument("--v0-min", action="store_true",
                   help="report threshold velocities under both readings instead")

    p = sub.add_parser("selftest", help="run the oracle-equivalence checks")
    p.add_argument("--tolerance", type=float, default=None,
                   help="override every check tolerance")
    return parser


# ---------------------------------------------------------------------------
# configuration files and parameter assembly
# ---------------------------------------------------------------------------

def _read_config(path) -> dict:
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{n}: expected key=value, got {raw!r}")
        values[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return values


def _apply_config(sub: argparse.ArgumentParser, values: dict):
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, text in values.items():
        if key == "config":
            continue
        action = actions.get(key)
        if action is None:
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            defaults[key] = text.lower() in ("1", "true", "yes", "on")
            continue
        convert = action.type or str
        try:
            if action.nargs in ("+", "*") or isinstance(action.nargs, int):
                value = [convert(v) for v in text.replace(",", " ").split()]
            else:
                value = convert(text)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise ConfigError(f"bad value for {key!r}: {text!r} ({exc})") from None
        if action.choices is not None:
            bad = [v for v in (value if isinstance(value, list) else [value])
                   if v not in action.choices]
            if bad:
                raise ConfigError(f"invalid choice for {key!r}: {bad[0]!r}")
        defaults[key] = value
    sub.set_defaults(**defaults)


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        sub = parser._subparsers._group_actions[0].choices[args.command]
        _apply_config(sub, _read_config(args.config))
        args = parser.parse_args(argv)
    return args


def _listify(v):
    if v is None:
        return None
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _physical(args):
    """Convert SI flags to reduced ones; returns the Scales used or None."""
    si_flags = ("x0", "omega", "gamma", "temperature", "mass", "sigma0")
    if not args.physical:
        given = [f for f in si_flags if getattr(args, f) is not None]
        if given:
            raise ConfigError(f"--{given[0]} requires --physical")
        return None
    if args.mass is None or args.sigma0 is None:
        raise ConfigError("--physical needs --mass and --sigma0")
    scales = Scales.from_mass_width(args.mass, args.sigma0)
    if args.x0 is not None:
        args.x0_bar = args.x0 / scales.length
    if args.omega is not None:
        args.omega_bar = [v * scales.time for v in args.omega]
    if args.gamma is not None:
        args.gamma_bar = [v * scales.time for v in args.gamma]
    if args.temperature is not None:
        args.T_bar = [v / scales.temperature for v in args.temperature]
    for v in (args.omega or []) + (args.gamma or []) + (args.temperature or []):
        if v < 0:
            raise ConfigError("omega, gamma and temperature must be non-negative")
    return scales


def _tolerances(args) -> Tolerances:
    if args.jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    if args.nodes < 2:
        raise ConfigError("--nodes must be at least 2")
    if not 0.0 < args.threshold < 0.5:
        raise ConfigError("--threshold must lie in (0, 0.5)")
    return Tolerances(rel=args.rel_tol, abs=args.abs_tol)


def _grid(spec):
    start, stop, step = spec
    if step <= 0 or stop < start:
        raise ConfigError(f"invalid range {start} {stop} {step}")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def _fmt(v) -> str:
    return f"{v:g}"


class _Writer:
    """Collects output files and the metadata common to all of them."""

    def __init__(self, args, scales: Scales | None):
        self.dir = Path(args.output_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files = []
        self.base = [("tool", f"thermal_repeller {__version__}"), ("command", args.command),
                     ("x0_bar", args.x0_bar), ("rel_tol", args.rel_tol),
                     ("abs_tol", args.abs_tol), ("nodes", args.nodes),
                     ("threshold", args.threshold),
                     ("renormalized", not args.no_renormalize),
                     ("t_bar_max", args.t_bar_max)]
        if scales is not None:
            self.base += [("time_scale_s", scales.time), ("length_scale_m", scales.length),
                          ("velocity_scale_m_per_s", scales.velocity),
                          ("temperature_scale_K", scales.temperature)]

    def write(self, name, columns: dict, **meta):
        series = TimeSeries.from_columns(columns, tuple(self.base) + tuple(meta.items()))
        path = self.dir / name
        series.write(path)
        self.files.append(path)
        return path

    def plot_script(self, title):
        lines = ["# plotting script generated by thermal-repeller; needs matplotlib",
                 "import csv", "import matplotlib.pyplot as plt", "",
                 "def load(path):",
                 "    with open(path) as fh:",
                 "        rows = [r for r in csv.reader(l for l in fh if not l.startswith('#'))]",
                 "    head, body = rows[0], [[float(v) for v in r] for r in rows[1:]]",
                 "    return head, list(zip(*body))", "",
                 "fig, ax = plt.subplots()"]
        for path in self.files:
            lines += [f"head, cols = load({path.name!r})",
                      "for name, col in zip(head[1:], cols[1:]):",
                      f"    ax.plot(cols[0], col, label={path.stem!r} + ':' + name)"]
        lines += ["ax.set_xlabel(head[0])", "ax.legend(fontsize='small')",
                  f"ax.set_title({title!r})", "plt.show()", ""]
        path = self.dir / f"plot_{title}.py"
        path.write_text("\n".join(lines), encoding="utf-8")
        return path


def _config(args, model, omega, gamma=0.0, T=0.0):
    cfg = DimensionlessConfig(x0=args.x0_bar, omega=omega, gamma=gamma, T=T, model=model)
    check_scattering(cfg)
    return cfg


def _ensemble(args, cfg, widths):
    if cfg.T == 0.0:
        return make_ensemble(0.0)
    return truncated_ensemble(cfg, args.nodes, args.threshold,
                              renormalize=not args.no_renormalize, widths=widths)


def _t_max(args):
    return np.inf if args.t_bar_max is None else args.t_bar_max


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_arrival(args, out: _Writer):
    tol = _tolerances(args)
    for model in args.model:
        for omega in args.omega_bar:
            for gamma in args.gamma_bar:
                means = []
                for T in sorted(set(args.T_bar)):
                    cfg = _config(args, model, omega, gamma, T)
                    w = width(cfg)
                    ens = _ensemble(args, cfg, w)
                    grid = (np.linspace(0.0, args.t_bar_max, args.points)
                            if args.t_bar_max is not None else None)
                    dist = thermal_arrival(cfg, ens, args.xd_bar, w, tol, t_grid=grid,
                                           n_grid=args.points, t_max=_t_max(args))
                    tag = f"{model}_w{_fmt(omega)}_g{_fmt(gamma)}_T{_fmt(T)}"
                    out.write(f"arrival_{tag}.csv", {"t_bar": dist.t, "pi_arrival": dist.density},
                              model=model, omega_bar=omega, gamma_bar=gamma, T_bar=T,
                              xd_bar=args.xd_bar, ensemble_nodes=len(ens),
                              discarded_mass=ens.discarded_mass, tau_arrival=dist.mean,
                              peak_time=dist.peak_time)
                    print(f"{tag}: peak t={dist.peak_time:.6g}  mean t={dist.mean:.6g}")
                    means.append((T, dist.mean))
                arr = np.array(means)
                out.write(f"arrival_mean_{model}_w{_fmt(omega)}_g{_fmt(gamma)}.csv",
                          {"T_bar": arr[:, 0], "tau_arrival": arr[:, 1]},
                          model=model, omega_bar=omega, gamma_bar=gamma, xd_bar=args.xd_bar)


def _times_task(task):
    """One sweep point; module level so worker processes can unpickle it."""
    cfg, nodes, threshold, raw_too, x1, x2, tol = task
    w = width(cfg)
    if cfg.T == 0.0:
        ens = make_ensemble(0.0)
    else:
        ens = truncated_ensemble(cfg, nodes, threshold, widths=w)
    main = thermal_times(cfg, ens, x1, x2, w, tol)
    if not (raw_too and ens.truncated):
        return main, main
    raw = make_ensemble(cfg.T, nodes, v_min=ens.v_min, renormalize=False)
    return thermal_times(cfg, raw, x1, x2, w, tol), main


def _map(fn, tasks, jobs):
    """Evaluate ``fn`` over ``tasks`` in order, in ``jobs`` worker processes."""
    if jobs <= 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def _times_sweep(args, cfgs, tol):
    """Thermal times at every config; returns (primary, renormalized) lists.

    Without ``--no-renormalize`` both lists are the renormalized results.
    """
    tasks = [(c, args.nodes, args.threshold, args.no_renormalize, args.x1_bar, args.x2_bar,
              tol) for c in cfgs]
    pairs = _map(_times_task, tasks, args.jobs)
    return [p[0] for p in pairs], [p[1] for p in pairs]


def _times_columns(args, primary, renorm, names=("tau_D", "tau_tr")):
    cols = {"tau_D": [r.tau_D for r in primary], "tau_tr": [r.tau_tr for r in primary]}
    cols = {k: cols[k] for k in names}
    if args.no_renormalize:
        for k in names:
            cols[k + "_renormalized"] = [getattr(r, k) for r in renorm]
    return cols


def _dwell_task(task):
    cfg, x1, x2, tol = task
    return dwell_time(cfg, x1, x2, tol=tol)


def cmd_times(args, out: _Writer):
    tol = _tolerances(args)
    interval = {"x1_bar": args.x1_bar, "x2_bar": args.x2_bar}
    if args.figure == 2:
        omegas = args.omega_bar or [0.05, 0.1]
        T = (args.T_bar or [0.0])[0]
        gammas = _grid(args.gamma_range)
        for model in args.model:
            for omega in omegas:
                cfgs = [_config(args, model, omega, g, T) for g in gammas]
                primary, renorm = _times_sweep(args, cfgs, tol)
                cols = {"gamma_bar": gammas, "p_tr": [r.p_tr for r in primary]}
                cols.update(_times_columns(args, primary, renorm))
                out.write(f"times_fig2_{model}_w{_fmt(omega)}_T{_fmt(T)}.csv", cols,
                          model=model, omega_bar=omega, T_bar=T, **interval)
                k = int(np.argmax(cols["tau_D"]))
                print(f"{model} omega={omega:g}: tau_D maximal at gamma={gammas[k]:.4g}")
    elif args.figure == 3:
        omegas = args.omega_bar or [0.05, 0.1]
        gammas = args.gamma_bar or [0.0, 0.025, 0.04, 0.1]
        t = _grid(args.t_range)
        sweep = _grid(args.gamma_range)
        for model in args.model:
            for omega in omegas:
                for gamma in gammas:
                    cfg = _config(args, model, omega, gamma)
                    p = interval_probability(cfg, args.x1_bar, args.x2_bar, t, width(cfg))
                    out.write(f"times_fig3_{model}_w{_fmt(omega)}_g{_fmt(gamma)}.csv",
                              {"t_bar": t, "P_interval": p}, model=model, omega_bar=omega,
                              gamma_bar=gamma, **interval)
                tasks = [(_config(args, model, omega, g), args.x1_bar, args.x2_bar, tol)
                         for g in sweep]
                taus = np.array(_map(_dwell_task, tasks, args.jobs))
                out.write(f"times_fig3_dwell_{model}_w{_fmt(omega)}.csv",
                          {"gamma_bar": sweep, "tau_D": taus}, model=model, omega_bar=omega,
                          **interval)
                print(f"{model} omega={omega:g}: tau_D maximal at "
                      f"gamma={sweep[int(np.argmax(taus))]:.4g}")
    else:
        omegas = args.omega_bar or [0.01, 0.0125, 0.015]
        gammas = args.gamma_bar or [0.0, 0.1]
        if "kostin" not in args.model:
            raise ConfigError("figure 4 is defined for the kostin model only")
        Ts = _grid(args.T_range)
        for omega in omegas:
            for gamma in gammas:
                cfgs = [_config(args, "kostin", omega, gamma, T) for T in Ts]
                primary, renorm = _times_sweep(args, cfgs, tol)
                cols = {"T_bar": Ts}
                cols.update(_times_columns(args, primary, renorm))
                out.write(f"times_fig4_kostin_w{_fmt(omega)}_g{_fmt(gamma)}.csv", cols,
                          model="kostin", omega_bar=omega, gamma_bar=gamma, **interval)
                print(f"kostin omega={omega:g} gamma={gamma:g}: {len(Ts)} temperatures")


def _sweep_values(args, default):
    if args.values:
        return np.array(sorted(set(args.values)))
    if args.sweep_range is None:
        return np.asarray(default, dtype=float)
    if args.log:
        start, stop, per_decade = args.sweep_range
        if start <= 0 or stop <= start:
            raise ConfigError("log sweep needs 0 < START < STOP")
        n = int(round(np.log10(stop / start) * per_decade)) + 1
        return np.logspace(np.log10(start), np.log10(stop), n)
    return _grid(args.sweep_range)


def cmd_transmission(args, out: _Writer):
    tol = _tolerances(args)
    model = args.model[0]
    omega = args.omega_bar[0]
    gamma = args.gamma_bar[0]
    T = args.T_bar[0]
    if args.v0_min:
        rows = []
        for om in args.omega_bar:
            for g in args.gamma_bar:
                cfg = _config(args, model, om, g)
                w = width(cfg)
                a = v0_min(cfg, args.threshold, "stationary", w, tol)
                b = v0_min(cfg, args.threshold, "max-over-time", w, tol)
                rows.append((om, g, a, b))
                print(f"omega={om:g} gamma={g:g}: v0_min stationary={a:.6g} "
                      f"max-over-time={b:.6g}")
        rows.sort()
        arr = np.array(rows)
        if len({r[0] for r in rows}) != len(rows):
            raise ConfigError("--v0-min accepts several --omega-bar values or several "
                              "--gamma-bar values, not both")
        out.write(f"v0_min_{model}.csv",
                  {"omega_bar": arr[:, 0], "gamma_bar": arr[:, 1],
                   "v0_min_stationary": arr[:, 2], "v0_min_max_over_time": arr[:, 3]},
                  model=model, threshold=args.threshold)
        return
    if args.sweep is None:
        raise ConfigError("transmission needs --sweep or --v0-min")
    meta = dict(model=model, omega_bar=omega, gamma_bar=gamma, T_bar=T)
    if args.sweep == "time":
        t = _sweep_values(args, np.linspace(0.0, 400.0, 801))
        cfg = _config(args, model, omega, gamma, T)
        w = width(cfg)
        p = np.asarray(p_tr_thermal(cfg, w, t), dtype=float)
        p0 = float(p_tr_thermal(cfg, w, 0.0))
        exact = np.clip((p - p0) / (1.0 - p0), 0.0, 1.0)
        out.write(f"transmission_time_{model}.csv",
                  {"t_bar": t, "p_tr": p, "p_tr_exact": exact},
                  p_tr_stationary=p_tr_stationary(cfg, w), **meta)
        return
    if args.sweep == "gamma":
        xs = _sweep_values(args, np.linspace(0.0, 0.1, 21))
        cfgs = [_config(args, model, omega, g, T) for g in xs]
    elif args.sweep == "omega":
        xs = _sweep_values(args, np.linspace(0.01, 0.2, 20))
        cfgs = [_config(args, model, o, gamma, T) for o in xs]
    else:
        xs = _sweep_values(args, np.concatenate([[0.0], np.logspace(-2, 6, 19)]))
        cfgs = [_config(args, model, omega, gamma, t) for t in xs]
    p = np.array([p_tr_stationary(c) for c in cfgs])
    name = {"gamma": "gamma_bar", "omega": "omega_bar", "temperature": "T_bar"}[args.sweep]
    meta.pop(name)
    out.write(f"transmission_{args.sweep}_{model}.csv", {name: xs, "p_tr": p}, **meta)


def cmd_selftest(args) -> int:
    results = run_checks(args.tolerance)
    for r in results:
        print(r.line())
    families = sorted({r.check.family for r in results})
    print(f"{len(results)} checks in {len(families)} families: {', '.join(families)}")
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"FAILED: {failed[0].check.name} (first of {len(failed)} failing checks)")
        return EXIT_SELFTEST
    print("all checks passed")
    return EXIT_OK


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
        if args.command == "selftest":
            return cmd_selftest(args)
        scales = _physical(args)
        for name in ("omega_bar", "gamma_bar", "T_bar"):
            setattr(args, name, _listify(getattr(args, name)))
        if args.gamma_bar is None and args.command != "times":
            args.gamma_bar = [0.0]
        out = _Writer(args, scales)
        {"arrival": cmd_arrival, "times": cmd_times,
         "transmission": cmd_transmission}[args.command](args, out)
        if args.plot_script:
            out.plot_script(args.command)
        for path in out.files:
            print(f"wrote {path}")
        return EXIT_OK
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
