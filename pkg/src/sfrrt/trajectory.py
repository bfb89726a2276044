"""Uniformly sampled rigid-body trajectories and their CSV format.

A trajectory holds pose plus linear/angular velocity, acceleration and jerk
at every sample. Quaternions are stored sign-continuous along the time axis
(not per-sample canonical) so finite differences stay meaningful; poses
returned as :class:`~sfrrt.se3.Pose` objects are canonicalized there.

The on-disk format is CSV with header
``t,px,py,pz,qw,qx,qy,qz,vx,vy,vz,wx,wy,wz`` in SI units. Accelerations and
jerks are not serialized; reading reconstructs them by finite-differencing
the stored velocities.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from sfrrt.errors import EmptyTrajectory, InvalidConfig, NonFiniteTrajectory
from sfrrt.se3 import Pose, quat_canonical

CSV_HEADER = ["t", "px", "py", "pz", "qw", "qx", "qy", "qz", "vx", "vy", "vz", "wx", "wy", "wz"]


def _as_matrix(name: str, arr, n: int, width: int) -> np.ndarray:
    out = np.asarray(arr, dtype=float)
    if out.shape != (n, width):
        raise InvalidConfig(f"trajectory field {name} must have shape ({n}, {width}), got {out.shape}")
    if not np.all(np.isfinite(out)):
        raise NonFiniteTrajectory(f"trajectory field {name} contains NaN or infinity")
    return out


def make_sign_continuous(quats: np.ndarray) -> np.ndarray:
    """Flip quaternion signs so consecutive rows have nonnegative dot."""
    out = np.array(quats, dtype=float)
    out[0] = quat_canonical(out[0])
    for i in range(1, len(out)):
        if np.dot(out[i], out[i - 1]) < 0:
            out[i] = -out[i]
    return out


@dataclass(frozen=True)
class Trajectory:
    """Samples at a fixed period ``dt`` seconds.

    Attributes:
        dt: sample period, seconds.
        positions: (N, 3) meters.
        orientations: (N, 4) unit quaternions (w, x, y, z), sign-continuous.
        lin_vel / lin_acc / lin_jerk: (N, 3) world-frame translational
            derivatives, SI.
        ang_vel / ang_acc / ang_jerk: (N, 3) world-frame angular
            derivatives, rad-based SI.
    """

    dt: float
    positions: np.ndarray
    orientations: np.ndarray
    lin_vel: np.ndarray
    lin_acc: np.ndarray
    lin_jerk: np.ndarray
    ang_vel: np.ndarray
    ang_acc: np.ndarray
    ang_jerk: np.ndarray

    def __post_init__(self):
        if not (isinstance(self.dt, (int, float)) and np.isfinite(self.dt) and self.dt > 0):
            raise InvalidConfig(f"trajectory dt must be positive and finite, got {self.dt}")
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise InvalidConfig(f"positions must be (N, 3), got {pos.shape}")
        n = pos.shape[0]
        if n == 0:
            raise EmptyTrajectory("trajectory has no samples")
        if not np.all(np.isfinite(pos)):
            raise NonFiniteTrajectory("positions contain NaN or infinity")
        quat = np.asarray(self.orientations, dtype=float)
        if quat.shape != (n, 4):
            raise InvalidConfig(f"orientations must be ({n}, 4), got {quat.shape}")
        if not np.all(np.isfinite(quat)):
            raise NonFiniteTrajectory("orientations contain NaN or infinity")
        norms = np.linalg.norm(quat, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise InvalidConfig("orientation rows must be unit quaternions within 1e-9")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "orientations", quat)
        for name in ("lin_vel", "lin_acc", "lin_jerk", "ang_vel", "ang_acc", "ang_jerk"):
            object.__setattr__(self, name, _as_matrix(name, getattr(self, name), n, 3))

    def __len__(self) -> int:
        return self.positions.shape[0]

    @property
    def duration(self) -> float:
        return (len(self) - 1) * self.dt

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self)) * self.dt

    def pose(self, i: int) -> Pose:
        return Pose(self.positions[i], self.orientations[i])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(CSV_HEADER)
            for i in range(len(self)):
                writer.writerow(
                    [f"{v:.12g}" for v in (
                        i * self.dt,
                        *self.positions[i],
                        *self.orientations[i],
                        *self.lin_vel[i],
                        *self.ang_vel[i],
                    )]
                )

    @classmethod
    def from_csv(cls, path) -> "Trajectory":
        with open(path, newline="") as f:
            reader = csv.reader(f)
            try:
                header = next(reader)
            except StopIteration:
                raise EmptyTrajectory(f"{path} is empty") from None
            if [h.strip() for h in header] != CSV_HEADER:
                raise InvalidConfig(f"{path}: expected header {','.join(CSV_HEADER)}")
            try:
                rows = np.array([[float(v) for v in row] for row in reader if row])
            except ValueError as e:
                raise InvalidConfig(f"{path}: non-numeric cell ({e})") from e
        if rows.size == 0:
            raise EmptyTrajectory(f"{path} has no samples")
        if rows.shape[1] != len(CSV_HEADER):
            raise InvalidConfig(f"{path}: expected {len(CSV_HEADER)} columns, got {rows.shape[1]}")
        if not np.all(np.isfinite(rows)):
            raise NonFiniteTrajectory(f"{path} contains NaN or infinity")
        t = rows[:, 0]
        if len(t) == 1:
            dt = 1.0
        else:
            steps = np.diff(t)
            dt = float(steps[0])
            if dt <= 0 or np.any(np.abs(steps - dt) > 1e-9 + 1e-9 * dt):
                raise InvalidConfig(f"{path}: time column must be uniformly spaced")
        quats = rows[:, 4:8]
        norms = np.linalg.norm(quats, axis=1, keepdims=True)
        if np.any(norms < 1e-9):
            raise InvalidConfig(f"{path}: zero-norm quaternion row")
        quats = make_sign_continuous(quats / norms)
        lin_vel = rows[:, 8:11]
        ang_vel = rows[:, 11:14]
        return cls.from_velocity_samples(dt, rows[:, 1:4], quats, lin_vel, ang_vel)

    @classmethod
    def from_velocity_samples(cls, dt, positions, orientations, lin_vel, ang_vel) -> "Trajectory":
        """Build a trajectory from pose + velocity samples.

        Accelerations and jerks are reconstructed by central finite
        differences of the velocities (np.gradient), which is exact for
        piecewise-quadratic velocity away from phase switches.
        """
        lin_vel = np.asarray(lin_vel, dtype=float)
        ang_vel = np.asarray(ang_vel, dtype=float)
        if len(lin_vel) < 2:
            zero = np.zeros_like(lin_vel)
            return cls(dt, positions, orientations, lin_vel, zero, zero, ang_vel, zero.copy(), zero.copy())
        lin_acc = np.gradient(lin_vel, dt, axis=0)
        lin_jerk = np.gradient(lin_acc, dt, axis=0)
        ang_acc = np.gradient(ang_vel, dt, axis=0)
        ang_jerk = np.gradient(ang_acc, dt, axis=0)
        return cls(dt, positions, orientations, lin_vel, lin_acc, lin_jerk, ang_vel, ang_acc, ang_jerk)


def constant_pose_trajectory(pose: Pose, duration: float, dt: float = 0.01) -> Trajectory:
    """Hold ``pose`` at rest for ``duration`` seconds (at least two samples)."""
    n = max(2, int(round(duration / dt)) + 1)
    zeros = np.zeros((n, 3))
    return Trajectory(
        dt=dt,
        positions=np.tile(pose.position, (n, 1)),
        orientations=np.tile(pose.orientation, (n, 1)),
        lin_vel=zeros,
        lin_acc=zeros.copy(),
        lin_jerk=zeros.copy(),
        ang_vel=zeros.copy(),
        ang_acc=zeros.copy(),
        ang_jerk=zeros.copy(),
    )
