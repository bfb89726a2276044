"""Tests for the independent path/trajectory validator."""

import copy

import numpy as np
import pytest

from sfrrt.container import ContainerSpec
from sfrrt.planner import PlannerConfig, plan, prune
from sfrrt.scenes import build_scene
from sfrrt.se3 import Pose, quat_from_axis_angle
from sfrrt.spill import AlwaysSpill, NeverSpill, OracleHandle, sftp
from sfrrt.timeparam import KinematicLimits, parameterize
from sfrrt.validate import ValidationReport, validate_path, validate_trajectory

CONTAINER = ContainerSpec(r_b=0.04, r_u=0.04, h_c=0.10, h_w=0.05)
LIMITS = KinematicLimits(
    v_max=0.5, a_max=2.0, j_max=20.0, omega_max=2.0, alpha_max=4.0, zeta_max=40.0
)


@pytest.fixture(scope="module")
def scene():
    return build_scene("empty")


@pytest.fixture(scope="module")
def planned(scene):
    cfg = PlannerConfig(max_iterations=600, seed=3)
    return prune(plan(scene, CONTAINER, cfg, stop_on_first=True), scene, CONTAINER, cfg)


@pytest.fixture(scope="module")
def trajectory(scene):
    return sftp([scene.start, scene.goal], LIMITS, OracleHandle(), CONTAINER)


def joined(report):
    return "; ".join(report.violations)


class TestReport:
    def test_bool_follows_ok(self):
        assert ValidationReport(ok=True, violations=())
        assert not ValidationReport(ok=False, violations=("x",))

    def test_from_violations(self):
        rep = ValidationReport.from_violations(["a", "b"])
        assert not rep.ok and rep.violations == ("a", "b")
        assert ValidationReport.from_violations([]).ok


class TestValidatePath:
    def test_planner_output_passes(self, scene, planned):
        rep = validate_path(planned, scene, CONTAINER)
        assert rep.ok and rep.violations == ()

    def test_accepts_pose_sequence(self, scene):
        rep = validate_path([scene.start, scene.goal], scene, CONTAINER)
        assert rep.ok

    def test_finer_resolution_still_clean(self, scene, planned):
        assert validate_path(planned, scene, CONTAINER, resolution=0.0025).ok

    def test_wrong_start_flagged(self, scene):
        poses = [Pose([0.3, 0.1, 0.3]), scene.goal]
        rep = validate_path(poses, scene, CONTAINER)
        assert not rep.ok and "start" in joined(rep)

    def test_goal_position_flagged(self, scene):
        off = scene.goal.position + np.array([0.3, 0.0, 0.0])
        rep = validate_path([scene.start, Pose(off, scene.goal.orientation)], scene, CONTAINER)
        assert not rep.ok and "goal" in joined(rep)

    def test_goal_tilt_flagged(self, scene):
        # same position as the goal, but tilted far outside goal_tilt_tol
        q = quat_from_axis_angle([0.0, 1.0, 0.0], scene.goal_tilt_tol + 0.3)
        rep = validate_path([scene.start, Pose(scene.goal.position, q)], scene, CONTAINER)
        assert not rep.ok and "tilt" in joined(rep)

    def test_out_of_bounds_edge_flagged(self, scene):
        poses = [scene.start, Pose([0.5, 0.0, -5.0]), scene.goal]
        rep = validate_path(poses, scene, CONTAINER)
        assert not rep.ok and "collides" in joined(rep)

    def test_obstacle_hit_flagged(self):
        shelf = build_scene("shelf")
        # straight shot through the central pillar
        rep = validate_path([shelf.start, shelf.goal], shelf, CONTAINER)
        assert not rep.ok and "collides" in joined(rep)

    def test_tilt_cap_on_edges(self, scene):
        mid = Pose([0.5, 0.0, 0.3], quat_from_axis_angle([0.0, 1.0, 0.0], 0.6))
        goal_like = Pose(scene.goal.position, scene.goal.orientation)
        rep = validate_path([scene.start, mid, goal_like], scene, CONTAINER, theta_cap=0.3)
        assert not rep.ok and "cap" in joined(rep)
        # the same path is fine once the cap allows the lean
        assert validate_path([scene.start, mid, goal_like], scene, CONTAINER, theta_cap=0.7).ok

    def test_too_short_path_reported(self, scene):
        rep = validate_path([scene.start], scene, CONTAINER)
        assert not rep.ok and "fewer than two" in joined(rep)


class TestValidateTrajectory:
    def test_clean_trajectory_passes(self, scene, trajectory):
        rep = validate_trajectory(
            trajectory, scene, CONTAINER, limits=LIMITS, handle=OracleHandle()
        )
        assert rep.ok and rep.violations == ()

    def test_limits_optional(self, scene, trajectory):
        assert validate_trajectory(trajectory, scene, CONTAINER).ok

    def test_tighter_velocity_limit_flagged(self, scene, trajectory):
        tight = KinematicLimits(0.05, 2.0, 20.0, 2.0, 4.0, 40.0)
        rep = validate_trajectory(trajectory, scene, CONTAINER, limits=tight)
        assert not rep.ok
        assert "velocity" in joined(rep)

    def test_finite_difference_catches_stored_channel_lies(self, scene, trajectory):
        # zero the stored velocity channel; the finite-difference check
        # recomputes rates from positions and must still object
        fake = copy.deepcopy(trajectory)
        fake.lin_vel[:] = 0.0
        tight = KinematicLimits(0.05, 2.0, 20.0, 2.0, 4.0, 40.0)
        rep = validate_trajectory(fake, scene, CONTAINER, limits=tight)
        assert not rep.ok and "difference" in joined(rep)

    def test_position_spike_flagged(self, scene, trajectory):
        fake = copy.deepcopy(trajectory)
        fake.positions[len(fake.positions) // 2] += np.array([0.0, 0.0, 0.05])
        rep = validate_trajectory(fake, scene, CONTAINER, limits=LIMITS)
        assert not rep.ok

    def test_endpoint_mismatch_flagged(self, scene, trajectory):
        fake = copy.deepcopy(trajectory)
        fake.positions[-1] += np.array([5.0, 0.0, 0.0])
        rep = validate_trajectory(fake, scene, CONTAINER)
        assert not rep.ok and "goal" in joined(rep)

    def test_tilt_cap_on_samples(self, scene):
        mid = Pose([0.5, 0.0, 0.3], quat_from_axis_angle([0.0, 1.0, 0.0], 0.6))
        traj = parameterize([scene.start, mid, scene.goal], LIMITS)
        rep = validate_trajectory(traj, scene, CONTAINER, theta_cap=0.3)
        assert not rep.ok and "tilt" in joined(rep)
        assert validate_trajectory(traj, scene, CONTAINER, theta_cap=0.7).ok

    def test_classifier_hook(self, scene, trajectory):
        assert validate_trajectory(trajectory, scene, CONTAINER, handle=NeverSpill()).ok
        rep = validate_trajectory(trajectory, scene, CONTAINER, handle=AlwaysSpill())
        assert not rep.ok and "spill" in joined(rep)

    def test_collision_flagged(self):
        shelf = build_scene("shelf")
        traj = parameterize([shelf.start, shelf.goal], LIMITS)
        rep = validate_trajectory(traj, shelf, CONTAINER)
        assert not rep.ok and "collide" in joined(rep)
