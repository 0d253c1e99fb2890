"""How temperature and barrier strength move the arrival-time distribution.

A packet starts at x = -20 with zero mean velocity in front of a parabolic
repeller. Only the thermal velocity spread carries probability over the top,
so a hotter ensemble reaches the detector at x = 20 earlier, and a steeper
repeller (larger omega) accelerates the part that crosses. The flux column
is the weight reaching the detector before normalisation.

Run with ``python demos/arrival_times.py``.
"""

from thermal_repeller import DimensionlessConfig, thermal_arrival


def main():
    print(f"{'omega':>6} {'T':>4} {'peak':>8} {'mean':>8} {'flux':>10}")
    for omega in (0.05, 0.1):
        for T in (0.0, 1.0, 5.0):
            dist = thermal_arrival(DimensionlessConfig(omega=omega, T=T))
            print(f"{omega:6.2f} {T:4.1f} {dist.peak_time:8.3f} {dist.mean:8.3f} "
                  f"{dist.total_flux:10.3e}")


if __name__ == "__main__":
    main()
