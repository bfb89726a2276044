import math

import numpy as np
import pytest

from sfrrt.errors import EmptyPath, InvalidConfig, NonFiniteInput
from sfrrt.se3 import Pose, quat_from_axis_angle, slerp_max_tilt, tilt_of_quat
from sfrrt.timeparam import KinematicLimits, SCurve, parameterize, scale_jerk

UNIT = KinematicLimits(1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
FAST_ROT = KinematicLimits(1.0, 1.0, 1.0, 10.0, 10.0, 10.0)


def fd_max(x: np.ndarray, order: int, dt: float) -> float:
    return float(np.abs(np.diff(x, order, axis=0)).max() / dt**order)


class TestLimitsType:
    def test_rejects_nonpositive(self):
        for field in ("v_max", "a_max", "j_max", "omega_max", "alpha_max", "zeta_max"):
            kwargs = dict(v_max=1, a_max=1, j_max=1, omega_max=1, alpha_max=1, zeta_max=1)
            kwargs[field] = 0.0
            with pytest.raises(InvalidConfig):
                KinematicLimits(**kwargs)

    def test_scale_jerk_halves_only_jerk(self):
        out = scale_jerk(KinematicLimits(1, 2, 8, 3, 4, 6), 2)
        assert out.j_max == 4.0
        assert out.zeta_max == 3.0
        assert (out.v_max, out.a_max, out.omega_max, out.alpha_max) == (1, 2, 3, 4)

    def test_scale_jerk_identity(self):
        lim = KinematicLimits(1, 2, 8, 3, 4, 6)
        assert scale_jerk(lim, 1) == lim

    def test_scale_jerk_composes(self):
        lim = KinematicLimits(1, 1, 8, 1, 1, 8)
        for _ in range(3):
            lim = scale_jerk(lim, 2)
        assert lim.j_max == pytest.approx(1.0)
        assert lim.zeta_max == pytest.approx(1.0)

    def test_scale_jerk_rejects_bad_factor(self):
        with pytest.raises(InvalidConfig):
            scale_jerk(UNIT, 0.0)


class TestSCurve:
    def test_all_limits_reached_classic_time(self):
        # T = d/v + v/a + a/j when cruise, accel hold and jerk all saturate
        prof = SCurve.minimal(3.0, 1.0, 1.0, 1.0)
        assert prof.duration == pytest.approx(5.0, abs=1e-12)

    def test_short_move_is_faster_than_classic(self):
        prof = SCurve.minimal(1.0, 1.0, 1.0, 1.0)
        assert prof.duration < 5.0
        assert prof.duration == pytest.approx(4.0 * 0.5 ** (1.0 / 3.0), abs=1e-12)

    def test_velocity_integral_recovers_distance(self):
        prof = SCurve.minimal(1.0, 1.0, 1.0, 1.0)
        t = np.linspace(0.0, prof.duration, 20001)
        _, v, _, _ = prof.sample(t)
        assert np.trapezoid(v, t) == pytest.approx(1.0, abs=1e-6)

    def test_rest_to_rest_and_exact_distance(self):
        for d in (0.01, 0.2, 1.0, 7.3):
            prof = SCurve.minimal(d, 0.8, 1.5, 4.0)
            p, v, a, _ = prof.sample(np.array([0.0, prof.duration]))
            assert p[0] == 0.0 and v[0] == 0.0 and a[0] == 0.0
            assert p[1] == pytest.approx(d, abs=1e-12)
            assert abs(v[1]) < 1e-12 and abs(a[1]) < 1e-12

    def test_respects_all_three_limits(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            d = float(rng.uniform(0.01, 5.0))
            v, a, j = rng.uniform(0.2, 4.0, 3)
            prof = SCurve.minimal(d, v, a, j)
            t = np.linspace(0.0, prof.duration, 4001)
            _, vv, aa, jj = prof.sample(t)
            assert np.abs(vv).max() <= v + 1e-9
            assert np.abs(aa).max() <= a + 1e-9
            assert np.abs(jj).max() <= j + 1e-12

    def test_monotone_in_jerk(self):
        for d in (0.3, 1.0, 3.0, 10.0):
            fast = SCurve.minimal(d, 1.0, 1.0, 1.0).duration
            slow = SCurve.minimal(d, 1.0, 1.0, 0.5).duration
            assert slow >= fast - 1e-12

    def test_stretch_preserves_distance_and_lowers_peaks(self):
        prof = SCurve.minimal(2.0, 1.0, 1.0, 1.0)
        longer = prof.stretched(prof.duration * 1.7)
        assert longer.duration == pytest.approx(prof.duration * 1.7, rel=1e-12)
        t = np.linspace(0, longer.duration, 2001)
        p, v, a, j = longer.sample(t)
        assert p[-1] == pytest.approx(2.0, abs=1e-12)
        assert np.abs(v).max() <= 1.0
        assert np.abs(j).max() <= 1.0

    def test_stretch_cannot_shrink(self):
        prof = SCurve.minimal(2.0, 1.0, 1.0, 1.0)
        with pytest.raises(InvalidConfig):
            prof.stretched(prof.duration * 0.5)

    def test_rejects_bad_inputs(self):
        with pytest.raises(NonFiniteInput):
            SCurve.minimal(-1.0, 1, 1, 1)
        with pytest.raises(NonFiniteInput):
            SCurve.minimal(float("nan"), 1, 1, 1)
        with pytest.raises(InvalidConfig):
            SCurve.minimal(1.0, 0.0, 1, 1)


class TestParameterize:
    def test_classic_duration_on_straight_segment(self):
        traj = parameterize([Pose([0, 0, 0]), Pose([3, 0, 0])], FAST_ROT, dt=0.01)
        assert traj.duration == pytest.approx(5.0, abs=1e-6)

    def test_limits_hold_on_sampled_channels(self):
        # limits bound vector magnitudes, not per-axis components
        traj = parameterize([Pose([0, 0, 0]), Pose([1, 1, 0.5])], UNIT, dt=0.01)
        assert np.linalg.norm(traj.lin_vel, axis=1).max() <= UNIT.v_max + 1e-6
        assert np.linalg.norm(traj.lin_acc, axis=1).max() <= UNIT.a_max + 1e-6
        assert np.linalg.norm(traj.lin_jerk, axis=1).max() <= UNIT.j_max + 1e-6

    def test_diagonal_segment_speed_norm(self):
        # a diagonal move must not run each axis at the full scalar limit
        traj = parameterize([Pose([0, 0, 0]), Pose([2, 2, 2])], UNIT, dt=0.005)
        speed = np.linalg.norm(traj.lin_vel, axis=1)
        assert speed.max() <= UNIT.v_max + 1e-9
        assert speed.max() == pytest.approx(UNIT.v_max, rel=1e-3)
        fd = np.linalg.norm(np.diff(traj.positions, axis=0), axis=1) / traj.dt
        assert fd.max() <= UNIT.v_max + 1e-6

    def test_waypoints_hit_exactly_at_rest(self):
        waypoints = [
            Pose([0, 0, 0]),
            Pose([0.5, 0.2, 0.0], quat_from_axis_angle([0, 1, 0], 0.3)),
            Pose([1.0, -0.1, 0.3], quat_from_axis_angle([1, 0, 0], -0.2)),
        ]
        traj = parameterize(waypoints, UNIT, dt=0.01)
        for wp in waypoints:
            d = np.linalg.norm(traj.positions - wp.position, axis=1)
            i = int(np.argmin(d))
            assert d[i] <= 1e-9
            assert float(np.abs(traj.orientations[i] @ wp.orientation)) >= 1.0 - 1e-9
            assert np.linalg.norm(traj.lin_vel[i]) <= 1e-9
            assert np.linalg.norm(traj.ang_vel[i]) <= 1e-9

    def test_finite_difference_consistency(self):
        traj = parameterize([Pose([0, 0, 0]), Pose([2, 0.4, -0.3])], UNIT, dt=0.01)
        # central difference of position recovers the stored velocity
        fd_v = np.gradient(traj.positions, traj.dt, axis=0)
        assert np.abs(fd_v[1:-1] - traj.lin_vel[1:-1]).max() < 5e-4

    def test_fd_jerk_bounded_on_random_segments(self):
        rng = np.random.default_rng(1)
        dt = 0.01
        for _ in range(100):
            a = Pose(rng.uniform(-1, 1, 3))
            b = Pose(rng.uniform(-1, 1, 3))
            v, acc, j = rng.uniform(0.3, 3.0, 3)
            lim = KinematicLimits(v, acc, j, 10, 10, 10)
            traj = parameterize([a, b], lim, dt=dt)
            if len(traj) < 4:
                continue
            # third difference of position averages jerk over the stencil
            assert fd_max(traj.positions, 3, dt) <= j + 1e-6
            assert fd_max(traj.positions, 2, dt) <= acc + 2.0 * j * dt

    def test_zero_length_segment_adds_nothing(self):
        p0, p1 = Pose([0, 0, 0]), Pose([1, 0, 0])
        with_dup = parameterize([p0, p0, p1], UNIT, dt=0.01)
        plain = parameterize([p0, p1], UNIT, dt=0.01)
        assert len(with_dup) == len(plain)
        assert np.allclose(with_dup.positions, plain.positions)

    def test_degenerate_path_holds_pose(self):
        p = Pose([0.3, 0.1, 0.2], quat_from_axis_angle([0, 1, 0], 0.2))
        traj = parameterize([p, p], UNIT, dt=0.01)
        assert np.allclose(traj.positions, p.position)
        assert np.abs(traj.lin_vel).max() == 0.0

    def test_rotation_stays_on_geodesic(self):
        qa = quat_from_axis_angle([0, 1, 0], 0.1)
        qb = quat_from_axis_angle([0, 1, 0], math.radians(35))
        traj = parameterize([Pose([0, 0, 0], qa), Pose([0.5, 0, 0], qb)], UNIT, dt=0.01)
        cap = float(slerp_max_tilt(qa[None], qb[None])[0])
        assert float(tilt_of_quat(traj.orientations).max()) <= cap + 1e-9
        assert np.abs(np.linalg.norm(traj.ang_vel, axis=1)).max() <= UNIT.omega_max + 1e-6

    def test_rotation_translation_synchronized(self):
        # long rotation forces the short translation to stretch with it
        qa = quat_from_axis_angle([0, 0, 1], 0.0)
        qb = quat_from_axis_angle([0, 0, 1], 3.0)
        slow_rot = KinematicLimits(5, 5, 5, 0.5, 0.5, 0.5)
        traj = parameterize([Pose([0, 0, 0], qa), Pose([0.1, 0, 0], qb)], slow_rot, dt=0.01)
        solo_rot = SCurve.minimal(3.0, 0.5, 0.5, 0.5).duration
        assert traj.duration >= solo_rot - 1e-9
        assert traj.positions[-1, 0] == pytest.approx(0.1, abs=1e-9)

    def test_monotone_duration_in_jerk(self):
        path = [Pose([0, 0, 0]), Pose([1.2, -0.3, 0.4])]
        base = parameterize(path, UNIT, dt=0.01).duration
        halved = parameterize(path, scale_jerk(UNIT, 2), dt=0.01).duration
        assert halved >= base - 1e-12

    def test_errors(self):
        with pytest.raises(EmptyPath):
            parameterize([Pose([0, 0, 0])], UNIT)
        with pytest.raises(InvalidConfig):
            parameterize([Pose([0, 0, 0]), Pose([1, 0, 0])], UNIT, dt=0.0)

    def test_accepts_planner_path_object(self):
        from sfrrt.planner import Path, distance

        a, b = Pose([0, 0, 0]), Pose([1, 0, 0])
        path = Path((a, b), distance(a, b, 0.3))
        traj = parameterize(path, UNIT, dt=0.01)
        assert traj.positions[-1, 0] == pytest.approx(1.0, abs=1e-9)
