"""Rest-to-rest S-curve time parameterization of waypoint paths.

Each waypoint pair becomes one motion segment: translation follows a
seven-phase jerk-limited profile along the straight segment, rotation
follows a matching profile along the quaternion geodesic, and the two are
synchronized by time-stretching the faster one (which scales its jerk
down and preserves the S-curve shape). Per-axis translational limits are
honored by scaling the line limits with the largest direction component,
so the slowest axis effectively runs its own minimal-time profile and the
others are stretched copies. Because positions stay on the segment and
orientations on the geodesic, a trajectory built from a validated path
never leaves the validated set of poses.

Segment durations are rounded up to whole sample periods so that every
waypoint lands exactly on a sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from sfrrt.errors import EmptyPath, InvalidConfig, NonFiniteInput
from sfrrt.se3 import quat_angle, quat_conjugate, quat_multiply, slerp
from sfrrt.trajectory import Trajectory

DEFAULT_DT = 0.01

_ZERO_DIST = 1e-15


@dataclass(frozen=True)
class KinematicLimits:
    """Translational and angular derivative bounds (all > 0).

    Attributes:
        v_max / a_max / j_max: m/s, m/s^2, m/s^3 bounds on the Euclidean
            norms of velocity, acceleration and jerk.
        omega_max / alpha_max / zeta_max: rad/s, rad/s^2, rad/s^3 for the
            rotation geodesic.
    """

    v_max: float
    a_max: float
    j_max: float
    omega_max: float
    alpha_max: float
    zeta_max: float

    def __post_init__(self):
        for name in ("v_max", "a_max", "j_max", "omega_max", "alpha_max", "zeta_max"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise InvalidConfig(f"{name} must be positive and finite, got {v}")


def scale_jerk(limits: KinematicLimits, factor: float) -> KinematicLimits:
    """Divide both jerk bounds by ``factor``, leaving the rest unchanged."""
    if not (np.isfinite(factor) and factor > 0):
        raise InvalidConfig(f"jerk scale factor must be positive, got {factor}")
    return replace(limits, j_max=limits.j_max / factor, zeta_max=limits.zeta_max / factor)


@dataclass(frozen=True)
class SCurve:
    """Rest-to-rest seven-phase profile covering distance ``d`` >= 0.

    Phases: jerk up, hold accel, jerk down, cruise, jerk down, hold decel,
    jerk up, with durations (t_j, t_a, t_j, t_v, t_j, t_a, t_j) and peak
    jerk ``jerk``. Zero distance collapses every duration to zero.
    """

    d: float
    t_j: float
    t_a: float
    t_v: float
    jerk: float

    @property
    def duration(self) -> float:
        return 4.0 * self.t_j + 2.0 * self.t_a + self.t_v

    @classmethod
    def minimal(cls, d: float, v_max: float, a_max: float, j_max: float) -> "SCurve":
        """Minimal-time profile for distance ``d`` under the given limits."""
        if not (np.isfinite(d) and d >= 0):
            raise NonFiniteInput(f"profile distance must be finite and nonnegative, got {d}")
        for name, val in (("v_max", v_max), ("a_max", a_max), ("j_max", j_max)):
            if not (np.isfinite(val) and val > 0):
                raise InvalidConfig(f"{name} must be positive and finite, got {val}")
        if d <= _ZERO_DIST:
            return cls(0.0, 0.0, 0.0, 0.0, 0.0)
        # phase durations assuming the velocity limit is reached
        if v_max * j_max >= a_max * a_max:
            t_j = a_max / j_max
            t_a = v_max / a_max - t_j
        else:
            t_j = math.sqrt(v_max / j_max)
            t_a = 0.0
        ramp_dist = 0.5 * v_max * (2.0 * t_j + t_a)
        if d >= 2.0 * ramp_dist:
            t_v = (d - 2.0 * ramp_dist) / v_max
            return cls(d, t_j, t_a, t_v, j_max)
        # velocity limit not reached; does acceleration saturate?
        if d >= 2.0 * a_max**3 / (j_max * j_max):
            t_j = a_max / j_max
            # d = (a t_j^2 + a t_a)(2 t_j + t_a) solved for t_a >= 0
            t_a = 0.5 * (math.sqrt(t_j * t_j * a_max * a_max + 4.0 * a_max * d) / a_max - 3.0 * t_j)
            return cls(d, t_j, t_a, 0.0, j_max)
        # triangular acceleration: fixed by the jerk limit alone
        t_j = (0.5 * d / j_max) ** (1.0 / 3.0)
        return cls(d, t_j, 0.0, 0.0, j_max)

    def stretched(self, duration: float) -> "SCurve":
        """Same distance over a longer duration; scales jerk by 1/k^3.

        A pure time dilation t -> t/k keeps the profile an S-curve and can
        only lower the peak velocity, acceleration and jerk, so a profile
        valid under some limits stays valid after stretching.
        """
        t = self.duration
        if t <= 0.0:
            return self
        k = duration / t
        if k < 1.0 - 1e-12:
            raise InvalidConfig(f"cannot stretch duration {t} down to {duration}")
        k = max(k, 1.0)
        return SCurve(self.d, self.t_j * k, self.t_a * k, self.t_v * k, self.jerk / k**3)

    def sample(self, t: np.ndarray):
        """Evaluate (position, velocity, acceleration, jerk) at times ``t``.

        Times are clamped to [0, duration]; the profile starts and ends at
        rest, so clamped queries return the boundary states.
        """
        t = np.asarray(t, dtype=float)
        durations = np.array(
            [self.t_j, self.t_a, self.t_j, self.t_v, self.t_j, self.t_a, self.t_j]
        )
        jerks = np.array([1.0, 0.0, -1.0, 0.0, -1.0, 0.0, 1.0]) * self.jerk
        bounds = np.cumsum(durations)
        # phase-start states by exact polynomial integration
        p = np.empty(7)
        v = np.empty(7)
        a = np.empty(7)
        pc = vc = ac = 0.0
        for i, (tau, jj) in enumerate(zip(durations, jerks)):
            p[i], v[i], a[i] = pc, vc, ac
            pc += vc * tau + 0.5 * ac * tau * tau + jj * tau**3 / 6.0
            vc += ac * tau + 0.5 * jj * tau * tau
            ac += jj * tau

        tt = np.clip(t, 0.0, bounds[-1])
        k = np.minimum(np.searchsorted(bounds, tt, side="right"), 6)
        tau = np.maximum(tt - (bounds[k] - durations[k]), 0.0)
        jj = jerks[k]
        pos = p[k] + v[k] * tau + 0.5 * a[k] * tau * tau + jj * tau**3 / 6.0
        vel = v[k] + a[k] * tau + 0.5 * jj * tau * tau
        acc = a[k] + jj * tau
        return pos, vel, acc, jj


def parameterize(path, limits: KinematicLimits, dt: float = DEFAULT_DT) -> Trajectory:
    """Time-parameterize a waypoint path into a uniformly sampled trajectory.

    Accepts a planner Path or any sequence of poses. Every segment starts
    and ends at rest, stays on the straight position segment and the
    orientation geodesic, and is synchronized to the slower of its
    translation and rotation profiles (durations rounded up to whole
    sample periods). Zero-length segments contribute no samples.

    Raises:
        EmptyPath: fewer than two waypoints.
        InvalidConfig: bad dt.
        NonFiniteInput: non-finite waypoint data.
    """
    poses = tuple(path.poses) if hasattr(path, "poses") else tuple(path)
    if len(poses) < 2:
        raise EmptyPath(f"need at least two waypoints, got {len(poses)}")
    if not (np.isfinite(dt) and dt > 0):
        raise InvalidConfig(f"dt must be positive and finite, got {dt}")

    one = np.zeros((1, 3))
    blocks = {
        "pos": [poses[0].position[None]],
        "quat": [poses[0].orientation[None]],
        "lv": [one],
        "la": [one],
        "lj": [one],
        "av": [one],
        "aa": [one],
        "aj": [one],
    }

    for a, b in zip(poses, poses[1:]):
        delta = b.position - a.position
        dist = float(np.linalg.norm(delta))
        angle = float(quat_angle(a.orientation, b.orientation))
        if angle <= 1e-12:
            angle = 0.0

        # limits bound Euclidean magnitudes, so the arc-length profile
        # along a unit direction inherits them unchanged
        direction = delta / dist if dist > _ZERO_DIST else np.zeros(3)
        trans = SCurve.minimal(dist, limits.v_max, limits.a_max, limits.j_max)
        rot = SCurve.minimal(angle, limits.omega_max, limits.alpha_max, limits.zeta_max)

        duration = max(trans.duration, rot.duration)
        if duration <= 0.0:
            continue
        steps = int(math.ceil(duration / dt - 1e-9))
        grid_duration = steps * dt
        trans = trans.stretched(grid_duration)
        rot = rot.stretched(grid_duration)

        t_local = np.arange(1, steps + 1) * dt
        tp, tv, ta, tj = trans.sample(t_local)
        rp, rv, ra, rj = rot.sample(t_local)

        if angle > 0.0:
            # shortest-arc target and the world-frame rotation axis
            qb = b.orientation if float(np.dot(a.orientation, b.orientation)) >= 0 else -b.orientation
            rel = quat_multiply(qb, quat_conjugate(a.orientation))
            axis = rel[1:] / np.linalg.norm(rel[1:])
            quat_rows = slerp(np.tile(a.orientation, (steps, 1)), np.tile(qb, (steps, 1)), rp / angle)
        else:
            axis = np.zeros(3)
            quat_rows = np.tile(a.orientation, (steps, 1))

        blocks["pos"].append(a.position + np.outer(tp, direction))
        blocks["quat"].append(quat_rows)
        for key, channel in (("lv", tv), ("la", ta), ("lj", tj)):
            blocks[key].append(np.outer(channel, direction))
        for key, channel in (("av", rv), ("aa", ra), ("aj", rj)):
            blocks[key].append(np.outer(channel, axis))

    if len(blocks["pos"]) == 1:
        # every segment was zero length: hold the single pose for one step
        for key in blocks:
            blocks[key].append(blocks[key][0])

    return Trajectory(
        dt=dt,
        positions=np.vstack(blocks["pos"]),
        orientations=np.vstack(blocks["quat"]),
        lin_vel=np.vstack(blocks["lv"]),
        lin_acc=np.vstack(blocks["la"]),
        lin_jerk=np.vstack(blocks["lj"]),
        ang_vel=np.vstack(blocks["av"]),
        ang_acc=np.vstack(blocks["aa"]),
        ang_jerk=np.vstack(blocks["aj"]),
    )
