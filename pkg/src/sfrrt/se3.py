"""Pose algebra on SE(3) with unit-quaternion orientations.

Quaternions are stored (w, x, y, z) with the canonical sign w >= 0 (ties
broken toward the first nonzero component being positive), which resolves
the double cover for storage and comparison. All helpers accept leading
batch dimensions so hot loops can stay in numpy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from sfrrt.errors import NonFiniteInput

IDENTITY_QUAT = np.array([1.0, 0.0, 0.0, 0.0])


def quat_canonical(q: np.ndarray) -> np.ndarray:
    """Normalize to unit length and canonical sign. Batch-aware."""
    q = np.asarray(q, dtype=float)
    norm = np.linalg.norm(q, axis=-1, keepdims=True)
    if not np.all(np.isfinite(norm)) or np.any(norm < 1e-12):
        raise NonFiniteInput("quaternion has non-finite components or zero norm")
    q = q / norm
    # sign of the first nonzero component, scanning w, x, y, z
    sign = np.zeros(q.shape[:-1])
    for i in range(4):
        comp = q[..., i]
        sign = np.where(sign == 0, np.sign(comp), sign)
    return q * sign[..., None]


def quat_multiply(q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Hamilton product q1 * q2 (apply q2's rotation first). Batch-aware."""
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    w1, x1, y1, z1 = (q1[..., i] for i in range(4))
    w2, x2, y2, z2 = (q2[..., i] for i in range(4))
    return np.stack(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ],
        axis=-1,
    )


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate vector(s) v by quaternion(s) q. Batch-aware on both."""
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    w, x, y, z = (q[..., i] for i in range(4))
    vx, vy, vz = (v[..., i] for i in range(3))
    # v + 2 (w (u x v) + u x (u x v)), cross products spelled out; this sits
    # on the collision hot path and np.cross is slow for small batches
    ux = y * vz - z * vy
    uy = z * vx - x * vz
    uz = x * vy - y * vx
    rx = vx + 2.0 * (w * ux + y * uz - z * uy)
    ry = vy + 2.0 * (w * uy + z * ux - x * uz)
    rz = vz + 2.0 * (w * uz + x * uy - y * ux)
    return np.stack([rx, ry, rz], axis=-1)


def quat_from_axis_angle(axis, angle) -> np.ndarray:
    """Unit quaternion rotating by ``angle`` about ``axis``. Batch-aware."""
    axis = np.asarray(axis, dtype=float)
    angle = np.asarray(angle, dtype=float)
    axis = axis / np.linalg.norm(axis, axis=-1, keepdims=True)
    half = 0.5 * angle
    return np.concatenate(
        [np.cos(half)[..., None], np.sin(half)[..., None] * axis], axis=-1
    )


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    """3x3 rotation matrix for quaternion(s)."""
    q = np.asarray(q, dtype=float)
    w, x, y, z = (q[..., i] for i in range(4))
    row = lambda *cols: np.stack(cols, axis=-1)
    return np.stack(
        [
            row(1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)),
            row(2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)),
            row(2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)),
        ],
        axis=-2,
    )


def quat_angle(q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Geodesic rotation angle between orientations, in [0, pi]. Batch-aware."""
    dot = np.abs(np.sum(np.asarray(q1, float) * np.asarray(q2, float), axis=-1))
    return 2.0 * np.arccos(np.clip(dot, 0.0, 1.0))


def slerp(q1: np.ndarray, q2: np.ndarray, s) -> np.ndarray:
    """Constant-speed shortest-arc interpolation from q1 (s=0) to q2 (s=1).

    ``s`` may be scalar or batched; falls back to normalized lerp when the
    endpoints are nearly identical.
    """
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    s = np.asarray(s, dtype=float)
    dot = np.sum(q1 * q2, axis=-1)
    q2 = np.where(dot[..., None] < 0, -q2, q2)  # shortest arc
    dot = np.clip(np.abs(dot), 0.0, 1.0)
    theta = np.arccos(dot)
    sin_theta = np.sin(theta)
    near = sin_theta < 1e-9
    safe_sin = np.where(near, 1.0, sin_theta)
    w1 = np.where(near, 1.0 - s, np.sin((1.0 - s) * theta) / safe_sin)
    w2 = np.where(near, s, np.sin(s * theta) / safe_sin)
    out = w1[..., None] * q1 + w2[..., None] * q2
    return out / np.linalg.norm(out, axis=-1, keepdims=True)


def slerp_max_tilt(q1: np.ndarray, q2: np.ndarray, tilt1=None, tilt2=None) -> np.ndarray:
    """Maximum tilt anywhere along the shortest-arc slerp from q1 to q2.

    Exact closed form: under slerp the body z-axis orbits the relative
    rotation axis u on a circle of angular radius psi, and u sits psi_u away
    from vertical, so cos tilt(s) = cos psi_u cos psi + sin psi_u sin psi *
    cos(delta0 + s*phi). The minimum of the cosine term over the swept arc
    is -1 if the arc crosses pi, otherwise the smaller endpoint cosine.
    Nearly degenerate lanes (axis nearly vertical, or z nearly on the axis)
    fall back to the sound orbit bound psi_u + psi; zero-rotation lanes
    return the endpoint tilt. Batch-aware; never underestimates.
    """
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    q1b, q2b = np.broadcast_arrays(q1, q2)
    shape = q1b.shape[:-1]
    qa = q1b.reshape(-1, 4)
    qb = q2b.reshape(-1, 4)
    t1 = tilt_of_quat(qa) if tilt1 is None else np.broadcast_to(tilt1, shape).reshape(-1)
    t2 = tilt_of_quat(qb) if tilt2 is None else np.broadcast_to(tilt2, shape).reshape(-1)
    out = np.maximum(t1, t2)

    dot = np.sum(qa * qb, axis=-1)
    qb = np.where(dot[..., None] < 0, -qb, qb)  # match slerp's shortest arc
    rel = quat_multiply(qb, quat_conjugate(qa))
    v = rel[..., 1:]
    vn = np.sqrt(np.sum(v * v, axis=-1))
    act = vn > 1e-12
    if np.any(act):
        u = v[act] / vn[act, None]
        phi = 2.0 * np.arccos(np.clip(rel[act, 0], -1.0, 1.0))
        z1 = quat_rotate(qa[act], np.array([0.0, 0.0, 1.0]))
        cpsi = np.clip(np.sum(u * z1, axis=-1), -1.0, 1.0)
        cpu = np.clip(u[..., 2], -1.0, 1.0)
        psi = np.arccos(cpsi)
        psi_u = np.arccos(cpu)
        spsi = np.sin(psi)
        spu = np.sin(psi_u)
        total = psi_u + psi
        orbit = np.minimum(total, 2.0 * math.pi - total)

        denom = spsi * spu
        good = denom > 1e-9
        # perpendicular components of z1 and up relative to the axis
        pa = z1 - u * cpsi[..., None]
        pup = -u * cpu[..., None]
        pup[..., 2] += 1.0
        cosd = np.sum(pa * pup, axis=-1)
        # (u x pup) . pa gives the signed azimuth sine (right-handed about u)
        cx = u[..., 1] * pup[..., 2] - u[..., 2] * pup[..., 1]
        cy = u[..., 2] * pup[..., 0] - u[..., 0] * pup[..., 2]
        cz = u[..., 0] * pup[..., 1] - u[..., 1] * pup[..., 0]
        sind = cx * pa[..., 0] + cy * pa[..., 1] + cz * pa[..., 2]
        d0 = np.arctan2(sind, cosd)
        min_cos = np.where(
            d0 + phi >= math.pi, -1.0, np.minimum(np.cos(d0), np.cos(d0 + phi))
        )
        exact = np.arccos(np.clip(cpsi * cpu + denom * min_cos, -1.0, 1.0))
        out[act] = np.maximum(out[act], np.where(good, exact, orbit))
    return out.reshape(shape)


def tilt_of_quat(q: np.ndarray) -> np.ndarray:
    """Angle between the rotated body z axis and world up, in [0, pi].

    The body z axis maps to the third column of the rotation matrix, whose
    z component is 1 - 2(x^2 + y^2); no matrix build needed. Batch-aware.
    """
    q = np.asarray(q, dtype=float)
    cos_tilt = 1.0 - 2.0 * (q[..., 1] ** 2 + q[..., 2] ** 2)
    return np.arccos(np.clip(cos_tilt, -1.0, 1.0))


@dataclass(frozen=True)
class Pose:
    """Rigid-body pose: position in meters, orientation as a unit quaternion.

    The quaternion is normalized and sign-canonicalized on construction.
    """

    position: np.ndarray
    orientation: np.ndarray = field(default_factory=lambda: IDENTITY_QUAT.copy())

    def __post_init__(self):
        p = np.asarray(self.position, dtype=float).reshape(3)
        if not np.all(np.isfinite(p)):
            raise NonFiniteInput(f"pose position must be finite, got {p}")
        q = quat_canonical(np.asarray(self.orientation, dtype=float).reshape(4))
        p.flags.writeable = False
        q.flags.writeable = False
        object.__setattr__(self, "position", p)
        object.__setattr__(self, "orientation", q)

    def __eq__(self, other):
        if not isinstance(other, Pose):
            return NotImplemented
        return np.array_equal(self.position, other.position) and np.array_equal(
            self.orientation, other.orientation
        )

    def isclose(self, other: "Pose", pos_tol: float = 1e-9, rot_tol: float = 1e-9) -> bool:
        return (
            float(np.linalg.norm(self.position - other.position)) <= pos_tol
            and float(quat_angle(self.orientation, other.orientation)) <= rot_tol
        )


def tilt_of(pose: Pose) -> float:
    """Tilt of the container symmetry axis away from world up, radians."""
    return float(tilt_of_quat(pose.orientation))


def interpolate(a: Pose, b: Pose, s: float) -> Pose:
    """Straight-line position, shortest-arc orientation; s in [0, 1]."""
    return Pose(
        position=(1.0 - s) * a.position + s * b.position,
        orientation=slerp(a.orientation, b.orientation, s),
    )
