"""Compare jerk-bound search outcomes across spill classifiers.

Runs the descending-jerk search on the same pruned path with the exact
oracle, a coin-flip classifier, and (when a weights file is given) the
learned model, then reports duration, accepted jerk bound and the
oracle-verified margin for each.

Run:  python3 demos/jerk_search_comparison.py [weights.sfcw]
"""

import math
import sys

import numpy as np

from sfrrt.container import ContainerSpec, max_tilt_angle
from sfrrt.dataset import DATASET_BOUNDS
from sfrrt.errors import NoSpillFreeTrajectory
from sfrrt.planner import PlannerConfig, plan, prune
from sfrrt.scenes import build_scene
from sfrrt.spill import OracleHandle, RandomHandle, SloshParams, oracle_label, sftp
from sfrrt.timeparam import KinematicLimits

LIMITS = KinematicLimits(0.5, 2.0, 20.0, 2.0, 4.0, 40.0)
CONTAINER = ContainerSpec(0.04, 0.04, 0.10, 0.08)


def main():
    scene = build_scene("clutter")
    cfg = PlannerConfig(max_iterations=4000, seed=7)
    path = prune(plan(scene, CONTAINER, cfg), scene, CONTAINER, cfg)
    theta = math.degrees(max_tilt_angle(CONTAINER).theta_max)
    print(f"path: {len(path.poses)} poses, cost {path.cost:.3f}, tilt budget {theta:.1f} deg")

    handles = {"oracle": OracleHandle(), "random": RandomHandle(seed=0)}
    if len(sys.argv) > 1:
        from sfrrt.sfc import load_weights
        from sfrrt.spill import LearnedHandle
        handles["learned"] = LearnedHandle(load_weights(sys.argv[1]), bounds=DATASET_BOUNDS)

    params = SloshParams()
    print(f"{'classifier':>10} {'duration':>9} {'peak jerk':>10} {'true margin':>12}")
    for name, handle in handles.items():
        try:
            traj = sftp(path.poses, LIMITS, handle, CONTAINER)
        except NoSpillFreeTrajectory as exc:
            print(f"{name:>10} gave up: {exc}")
            continue
        margin = oracle_label(traj, CONTAINER, params).margin
        jerk = np.linalg.norm(traj.lin_jerk, axis=1).max()
        flag = "" if margin >= 0 else "  <- would spill"
        print(f"{name:>10} {traj.duration:>8.2f}s {jerk:>9.1f} {math.degrees(margin):>11.2f}d{flag}")


if __name__ == "__main__":
    main()
