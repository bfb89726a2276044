"""Independent re-verification of planner and pipeline outputs.

Deliberately shares no shortcuts with the planner or the time
parameterizer: paths are re-collision-checked by dense interpolation at a
caller-chosen resolution (use half the planner's edge resolution to check
twice as finely), tilt is re-measured both with the exact geodesic bound
per edge and per trajectory sample, and kinematic limits are re-derived
from the sampled positions by finite differences rather than trusting the
stored channels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sfrrt.container import ContainerSpec, max_tilt_angle
from sfrrt.scene import ContainerBody, Scene, collision_mask, segment_free
from sfrrt.se3 import quat_angle, slerp_max_tilt, tilt_of_quat
from sfrrt.spill import ClassifierHandle, classify
from sfrrt.timeparam import KinematicLimits
from sfrrt.trajectory import Trajectory

_EPS = 1e-6


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def from_violations(cls, violations) -> "ValidationReport":
        v = tuple(violations)
        return cls(ok=not v, violations=v)


def validate_path(
    path,
    scene: Scene,
    container: ContainerSpec,
    theta_cap: float | None = None,
    resolution: float = 0.005,
) -> ValidationReport:
    """Re-check a waypoint path: endpoints, collision, and exact tilt bound.

    ``resolution`` is the collision sampling spacing in meters; the default
    is half the planner's default edge resolution. ``theta_cap`` falls back
    to the container's quasi-static limit.
    """
    cap = max_tilt_angle(container).theta_max if theta_cap is None else theta_cap
    body = ContainerBody.from_spec(container)
    poses = tuple(path.poses) if hasattr(path, "poses") else tuple(path)
    bad = []
    if len(poses) < 2:
        bad.append("path has fewer than two poses")
        return ValidationReport.from_violations(bad)

    if not poses[0].isclose(scene.start, pos_tol=1e-9, rot_tol=1e-9):
        bad.append("path does not start at the scene start pose")
    goal_pos_err = float(np.linalg.norm(poses[-1].position - scene.goal.position))
    if goal_pos_err > scene.goal_pos_tol + 1e-9:
        bad.append(f"final position {goal_pos_err:.4f} m from goal exceeds tolerance")
    goal_tilt_err = abs(
        float(tilt_of_quat(poses[-1].orientation)) - float(tilt_of_quat(scene.goal.orientation))
    )
    if goal_tilt_err > scene.goal_tilt_tol + 1e-9:
        bad.append(f"final tilt {goal_tilt_err:.4f} rad from goal tilt exceeds tolerance")

    for i, (a, b) in enumerate(zip(poses, poses[1:])):
        if not segment_free(a, b, body, scene, resolution, w_rot=0.3):
            bad.append(f"edge {i} collides at resolution {resolution}")
        worst = float(slerp_max_tilt(a.orientation[None], b.orientation[None])[0])
        if worst > cap + 1e-9:
            bad.append(f"edge {i} tilt bound {worst:.4f} rad exceeds cap {cap:.4f}")
    return ValidationReport.from_violations(bad)


def _channel_checks(traj: Trajectory, limits: KinematicLimits, bad) -> None:
    pairs = (
        ("linear velocity", traj.lin_vel, limits.v_max),
        ("linear acceleration", traj.lin_acc, limits.a_max),
        ("linear jerk", traj.lin_jerk, limits.j_max),
        ("angular velocity", traj.ang_vel, limits.omega_max),
        ("angular acceleration", traj.ang_acc, limits.alpha_max),
        ("angular jerk", traj.ang_jerk, limits.zeta_max),
    )
    for name, channel, bound in pairs:
        peak = float(np.linalg.norm(channel, axis=1).max())
        if peak > bound + _EPS:
            bad.append(f"{name} peak {peak:.6f} exceeds limit {bound:.6f}")


def _finite_difference_checks(traj: Trajectory, limits: KinematicLimits, bad) -> None:
    dt = traj.dt
    if len(traj) >= 2:
        fd_v = np.diff(traj.positions, axis=0) / dt
        peak = float(np.linalg.norm(fd_v, axis=1).max())
        if peak > limits.v_max + _EPS:
            bad.append(f"position first difference {peak:.6f} exceeds v_max")
        step = quat_angle(traj.orientations[:-1], traj.orientations[1:]) / dt
        if float(np.max(step, initial=0.0)) > limits.omega_max + _EPS:
            bad.append("orientation step rate exceeds omega_max")
    if len(traj) >= 3:
        fd_a = np.diff(traj.positions, 2, axis=0) / dt**2
        peak = float(np.linalg.norm(fd_a, axis=1).max())
        # second differences average acceleration over a 2*dt window, so
        # they can overshoot by at most one jerk-limited dt of change
        if peak > limits.a_max + limits.j_max * dt + _EPS:
            bad.append(f"position second difference {peak:.6f} exceeds a_max + j_max*dt")
    if len(traj) >= 4:
        fd_j = np.diff(traj.positions, 3, axis=0) / dt**3
        peak = float(np.linalg.norm(fd_j, axis=1).max())
        if peak > limits.j_max + _EPS:
            bad.append(f"position third difference {peak:.6f} exceeds j_max")


def validate_trajectory(
    traj: Trajectory,
    scene: Scene,
    container: ContainerSpec,
    limits: KinematicLimits | None = None,
    theta_cap: float | None = None,
    handle: ClassifierHandle | None = None,
) -> ValidationReport:
    """Re-check a sampled trajectory sample by sample.

    Verifies collision freedom at every sample, the tilt cap on every
    orientation, kinematic limits on stored channels and by finite
    differences of position (when ``limits`` is given), endpoint agreement
    with the scene query, and optionally a classifier verdict.
    """
    cap = max_tilt_angle(container).theta_max if theta_cap is None else theta_cap
    body = ContainerBody.from_spec(container)
    bad = []

    hits = collision_mask(traj.positions, traj.orientations, body, scene)
    if np.any(hits):
        bad.append(f"{int(hits.sum())} of {len(traj)} samples collide or leave bounds")

    worst_tilt = float(tilt_of_quat(traj.orientations).max())
    if worst_tilt > cap + _EPS:
        bad.append(f"sample tilt {worst_tilt:.4f} rad exceeds cap {cap:.4f}")

    start_err = float(np.linalg.norm(traj.positions[0] - scene.start.position))
    if start_err > 1e-9:
        bad.append(f"trajectory starts {start_err:.2e} m away from the scene start")
    goal_err = float(np.linalg.norm(traj.positions[-1] - scene.goal.position))
    if goal_err > scene.goal_pos_tol + 1e-9:
        bad.append(f"trajectory ends {goal_err:.4f} m from goal, over tolerance")

    if limits is not None:
        _channel_checks(traj, limits, bad)
        _finite_difference_checks(traj, limits, bad)

    if handle is not None:
        verdict = classify(handle, traj, container)
        if verdict.spilled:
            bad.append(f"classifier reports spill with margin {verdict.margin:.4f}")
    return ValidationReport.from_violations(bad)
