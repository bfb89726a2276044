"""Sweep container geometry and plot the maximum spill-free tilt angle.

Shows how the closed-form tilt angle responds to fill level and wall
flare, and overlays the numeric oracle to demonstrate agreement.

Run:  python3 demos/tilt_angle_sweep.py [out.png]
"""

import math
import sys

import numpy as np

from sfrrt.container import ContainerSpec, max_tilt_angle, tilt_angle_oracle


def main():
    h_c = 0.10
    fills = np.linspace(0.005, 0.095, 40)

    print(f"{'fill [m]':>10} {'cylinder':>10} {'flared':>10} {'oracle gap':>12}")
    curves = {}
    for label, (r_b, r_u) in {"cylinder": (0.04, 0.04), "flared": (0.03, 0.055)}.items():
        closed = []
        gap = 0.0
        for h_w in fills:
            spec = ContainerSpec(r_b, r_u, h_c, float(h_w))
            theta = max_tilt_angle(spec).theta_max
            gap = max(gap, abs(theta - tilt_angle_oracle(spec).theta_max))
            closed.append(math.degrees(theta))
        curves[label] = closed
        print(f"{label}: worst closed-form vs oracle gap {gap:.2e} rad")
    for h_w, a, b in zip(fills[::8], curves["cylinder"][::8], curves["flared"][::8]):
        print(f"{h_w:>10.3f} {a:>9.2f}deg {b:>9.2f}deg")

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed, skipping the plot")
        return

    fig, ax = plt.subplots(figsize=(6, 4))
    for label, ys in curves.items():
        ax.plot(fills, ys, label=label)
    ax.set_xlabel("fill height [m]")
    ax.set_ylabel("max spill-free tilt [deg]")
    ax.set_title(f"tilt budget vs fill (h_c = {h_c} m)")
    ax.legend()
    ax.grid(alpha=0.3)
    out = sys.argv[1] if len(sys.argv) > 1 else "tilt_angle_sweep.png"
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
