"""Plan a spill-free transfer through the shelf scene, end to end.

Plans a pose path with the informed sampler, prunes it, searches for the
fastest jerk bound the spill oracle accepts, then re-validates the result
and plots the path plus the tilt profile.

Run:  python3 demos/plan_shelf_transfer.py [out.png]
"""

import math
import sys

import numpy as np

from sfrrt.container import ContainerSpec, max_tilt_angle
from sfrrt.planner import PlannerConfig, plan, prune
from sfrrt.scene import Box
from sfrrt.scenes import build_scene
from sfrrt.se3 import tilt_of_quat
from sfrrt.spill import OracleHandle, SloshParams, oracle_label, sftp
from sfrrt.timeparam import KinematicLimits
from sfrrt.validate import validate_trajectory

LIMITS = KinematicLimits(0.5, 2.0, 20.0, 2.0, 4.0, 40.0)
CONTAINER = ContainerSpec(0.04, 0.04, 0.10, 0.05)


def main():
    scene = build_scene("shelf")
    cfg = PlannerConfig(max_iterations=4000, seed=1)
    path = prune(plan(scene, CONTAINER, cfg), scene, CONTAINER, cfg)
    print(f"path: {len(path.poses)} poses, cost {path.cost:.3f}")

    traj = sftp(path.poses, LIMITS, OracleHandle(), CONTAINER)
    report = validate_trajectory(traj, scene, CONTAINER, limits=LIMITS, handle=OracleHandle())
    speeds = np.linalg.norm(traj.lin_vel, axis=1)
    print(f"trajectory: {traj.duration:.2f} s, peak speed {speeds.max():.3f} m/s")
    print(f"independent validation: {'ok' if report.ok else report.violations}")

    verdict = oracle_label(traj, CONTAINER, SloshParams())
    theta_max = max_tilt_angle(CONTAINER).theta_max
    print(f"oracle margin {math.degrees(verdict.margin):.2f} deg "
          f"(tilt budget {math.degrees(theta_max):.2f} deg)")

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed, skipping the plot")
        return

    fig = plt.figure(figsize=(10, 4))
    ax = fig.add_subplot(1, 2, 1, projection="3d")
    pts = traj.positions
    ax.plot(pts[:, 0], pts[:, 1], pts[:, 2], lw=2)
    for obs in scene.obstacles:
        if not isinstance(obs, Box):
            continue
        c, h = np.asarray(obs.center), np.asarray(obs.half_extents)
        corners = c + h * np.array(
            [[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)]
        )
        ax.scatter(corners[:, 0], corners[:, 1], corners[:, 2], c="gray", s=4)
    ax.set_title("pruned path through the shelf")

    ax2 = fig.add_subplot(1, 2, 2)
    t = np.arange(len(pts)) * traj.dt
    ax2.plot(t, np.degrees(tilt_of_quat(traj.orientations)), label="container tilt")
    ax2.axhline(math.degrees(theta_max), color="r", ls="--", label="spill limit")
    ax2.set_xlabel("time [s]")
    ax2.set_ylabel("tilt [deg]")
    ax2.legend()
    ax2.grid(alpha=0.3)

    out = sys.argv[1] if len(sys.argv) > 1 else "plan_shelf_transfer.png"
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
