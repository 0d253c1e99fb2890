"""Friction, transmission and the time spent near the barrier top.

For a packet at rest in front of the repeller, friction lowers the
transmission probability in both dissipation models. The dwell time in
[-1, 1] is not monotone: at weak friction the packet lingers longer near the
top before the repeller throws it back, while strong friction stops it
before it arrives. The maximum sits at a model-dependent friction.

The dwell time is then split into transmitted and reflected parts with the
Bohmian critical trajectory; the weighted parts add back up to the total.

Run with ``python demos/friction_and_dwell.py``.
"""

import numpy as np

from thermal_repeller import DimensionlessConfig, dwell_time, split_times


def main():
    gammas = np.round(np.arange(0.0, 0.1001, 0.01), 3)
    for model in ("ck", "kostin"):
        print(f"\n{model}, omega = 0.05, T = 0")
        print(f"{'gamma':>6} {'P_tr':>8} {'tau_D':>8} {'tau_tr':>8} {'tau_ref':>8} {'resid':>8}")
        taus = []
        for g in gammas:
            r = split_times(DimensionlessConfig(omega=0.05, gamma=g, model=model))
            taus.append(r.tau_D)
            print(f"{g:6.3f} {r.p_tr:8.5f} {r.tau_D:8.4f} {r.tau_tr:8.4f} "
                  f"{r.tau_ref:8.4f} {r.residual:8.1e}")
        fine = np.round(np.arange(0.0, 0.1001, 0.005), 3)
        best = max(fine, key=lambda g: dwell_time(DimensionlessConfig(omega=0.05, gamma=g,
                                                                      model=model)))
        print(f"dwell time is largest near gamma = {best:g}")


if __name__ == "__main__":
    main()
