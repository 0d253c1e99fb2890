"""Thermal dwell and transmission times in the Kostin model.

Each Maxwell-Boltzmann velocity component is a Gaussian packet. Components
too slow to ever cross (transmission below 1%) are dropped, and the rest
are averaged. The table compares the two ways of averaging: renormalizing
the kept weights, or keeping the raw Maxwell-Boltzmann weights so that
dropped components count as zero. Steps in the renormalized column happen
at temperatures where another quadrature node falls below the threshold.

Run with ``python demos/thermal_times.py``.
"""

from thermal_repeller import DimensionlessConfig, thermal_times, truncated_ensemble


def main():
    omega = 0.0125
    print(f"kostin, omega = {omega}, gamma = 0")
    print(f"{'T':>4} {'nodes':>5} {'dropped':>8} {'tau_D':>8} {'tau_D raw':>9} {'tau_tr':>8}")
    for T in (0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0):
        cfg = DimensionlessConfig(omega=omega, T=T, model="kostin")
        ens = truncated_ensemble(cfg)
        r = thermal_times(cfg, ens)
        raw = thermal_times(cfg, truncated_ensemble(cfg, renormalize=False)) if T else r
        print(f"{T:4.1f} {len(ens):5d} {ens.discarded_mass:8.4f} {r.tau_D:8.4f} "
              f"{raw.tau_D:9.4f} {r.tau_tr:8.4f}")


if __name__ == "__main__":
    main()
