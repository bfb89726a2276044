"""Workspace description and capsule-vs-primitive collision checking.

The container is collision-checked as a capsule that encloses its frustum
(segment from the bottom center to the rim center, radius equal to the rim
radius). Sphere tests are exact; oriented-box tests minimize a convex
distance function and inflate the capsule radius by 1e-9 m, so they may
report contact a hair early but never miss one. Leaving the workspace box
counts as collision.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from sfrrt.container import ContainerSpec
from sfrrt.errors import InvalidConfig, NonFiniteInput
from sfrrt.se3 import (
    IDENTITY_QUAT,
    Pose,
    quat_angle,
    quat_canonical,
    quat_rotate,
    quat_to_matrix,
    slerp,
)

# Conservative inflation applied to box-capsule contact tests (meters).
BOX_CONTACT_SLACK = 1e-9
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _vec3(name: str, v) -> np.ndarray:
    out = np.asarray(v, dtype=float).reshape(3)
    if not np.all(np.isfinite(out)):
        raise NonFiniteInput(f"{name} must be finite, got {out}")
    return out


@dataclass(frozen=True)
class Sphere:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec3("sphere center", self.center))
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise InvalidConfig(f"sphere radius must be positive, got {self.radius}")

    def to_dict(self) -> dict:
        return {"type": "sphere", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True)
class Box:
    center: np.ndarray
    half_extents: np.ndarray
    orientation: np.ndarray = field(default_factory=lambda: IDENTITY_QUAT.copy())

    def __post_init__(self):
        object.__setattr__(self, "center", _vec3("box center", self.center))
        he = _vec3("box half extents", self.half_extents)
        if np.any(he <= 0):
            raise InvalidConfig(f"box half extents must be positive, got {he}")
        object.__setattr__(self, "half_extents", he)
        object.__setattr__(
            self, "orientation", quat_canonical(np.asarray(self.orientation, float).reshape(4))
        )

    def to_dict(self) -> dict:
        return {
            "type": "box",
            "center": self.center.tolist(),
            "half_extents": self.half_extents.tolist(),
            "orientation": self.orientation.tolist(),
        }


@dataclass(frozen=True)
class ContainerBody:
    """Capsule collision proxy in the container frame.

    The segment runs from ``p0`` (bottom center, the pose origin) to ``p1``
    (rim center); every frustum point is within ``radius`` of it because the
    wall radius never exceeds the rim radius.
    """

    p0: np.ndarray
    p1: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "p0", _vec3("capsule p0", self.p0))
        object.__setattr__(self, "p1", _vec3("capsule p1", self.p1))
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise InvalidConfig(f"capsule radius must be positive, got {self.radius}")

    @classmethod
    def from_spec(cls, c: ContainerSpec) -> "ContainerBody":
        return cls(p0=np.zeros(3), p1=np.array([0.0, 0.0, c.h_c]), radius=c.r_u)


@dataclass(frozen=True)
class Scene:
    """Axis-aligned workspace with primitive obstacles and a planning query.

    Start/goal collision feasibility depends on the container body, so it is
    checked by the planner (InfeasibleQuery), not at construction; here only
    the geometry is validated and start/goal positions must lie in bounds.
    """

    bounds: np.ndarray
    obstacles: tuple
    start: Pose
    goal: Pose
    goal_pos_tol: float = 0.05
    goal_tilt_tol: float = 0.2

    def __post_init__(self):
        b = np.asarray(self.bounds, dtype=float).reshape(2, 3)
        if not np.all(np.isfinite(b)):
            raise NonFiniteInput(f"scene bounds must be finite, got {b}")
        if np.any(b[0] >= b[1]):
            raise InvalidConfig(f"scene bounds must satisfy lo < hi, got {b}")
        b.flags.writeable = False
        object.__setattr__(self, "bounds", b)
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        for ob in self.obstacles:
            if not isinstance(ob, (Sphere, Box)):
                raise InvalidConfig(f"unsupported obstacle type {type(ob).__name__}")
        if not (self.goal_pos_tol > 0 and self.goal_tilt_tol > 0):
            raise InvalidConfig("goal tolerances must be positive")
        for name, pose in (("start", self.start), ("goal", self.goal)):
            if np.any(pose.position < b[0]) or np.any(pose.position > b[1]):
                raise InvalidConfig(f"{name} position {pose.position} outside bounds")


def _segment_endpoints(positions: np.ndarray, quats: np.ndarray, body: ContainerBody):
    """World-frame capsule segment endpoints for a batch of poses."""
    a = positions + quat_rotate(quats, body.p0)
    b = positions + quat_rotate(quats, body.p1)
    return a, b


def _segment_point_dist(a: np.ndarray, b: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Distance from point(s) p to segment(s) ab, batched."""
    d = b - a
    denom = np.maximum(np.sum(d * d, axis=-1), 1e-300)
    t = np.clip(np.sum((p - a) * d, axis=-1) / denom, 0.0, 1.0)
    diff = p - (a + t[..., None] * d)
    return np.sqrt(np.sum(diff * diff, axis=-1))


def _box_frame_dist(a: np.ndarray, b: np.ndarray, he: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Distance from box surface to segment point a + t*(b-a), box frame."""
    p = a + t[..., None] * (b - a)
    outside = np.maximum(np.abs(p) - he, 0.0)
    return np.sqrt(np.sum(outside * outside, axis=-1))


def _golden_step(lo, hi, x1, x2, f1, f2, take1):
    """One proper golden-section contraction; returns state + new probe x."""
    hi = np.where(take1, x2, hi)
    lo = np.where(take1, lo, x1)
    x_keep = np.where(take1, x1, x2)
    f_keep = np.where(take1, f1, f2)
    x_new = np.where(take1, hi - _INV_PHI * (hi - lo), lo + _INV_PHI * (hi - lo))
    return lo, hi, x_keep, f_keep, x_new


def _segment_box_dist(a: np.ndarray, b: np.ndarray, he: np.ndarray, iters: int = 60) -> np.ndarray:
    """Min distance from segments (box frame) to an origin-centered box.

    The distance along the segment is convex in the parameter (each axis
    term max(|p_i(t)| - h_i, 0) is convex, and the Euclidean norm of
    nonnegative convex components is convex), so golden-section search
    converges to the global minimum.
    """
    lo = np.zeros(a.shape[:-1])
    hi = np.ones(a.shape[:-1])
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1 = _box_frame_dist(a, b, he, x1)
    f2 = _box_frame_dist(a, b, he, x2)
    for _ in range(iters):
        take1 = f1 <= f2
        lo, hi, x_keep, f_keep, x_new = _golden_step(lo, hi, x1, x2, f1, f2, take1)
        f_new = _box_frame_dist(a, b, he, x_new)
        x1 = np.where(take1, x_new, x_keep)
        f1 = np.where(take1, f_new, f_keep)
        x2 = np.where(take1, x_keep, x_new)
        f2 = np.where(take1, f_keep, f_new)
    mid = 0.5 * (lo + hi)
    return np.minimum(_box_frame_dist(a, b, he, mid), np.minimum(f1, f2))


def _segment_box_hit(a: np.ndarray, b: np.ndarray, he: np.ndarray, thr: float) -> np.ndarray:
    """Boolean contact test: does any segment point come within thr of the box?

    Same golden-section search as _segment_box_dist, but with certified early
    exit: the distance is ||b-a||-Lipschitz in the parameter, so once
    best - lip * (hi - lo) exceeds thr the lane is provably free, and any
    probe at or below thr settles it as a hit. The residual after the full
    iteration budget is far below the contact slack.
    """
    d = b - a
    lip = np.sqrt(np.sum(d * d, axis=-1))
    lo = np.zeros(a.shape[:-1])
    hi = np.ones(a.shape[:-1])
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1 = _box_frame_dist(a, b, he, x1)
    f2 = _box_frame_dist(a, b, he, x2)
    best = np.minimum(f1, f2)
    for _ in range(48):
        if np.all((best <= thr) | (best - lip * (hi - lo) > thr)):
            break
        take1 = f1 <= f2
        lo, hi, x_keep, f_keep, x_new = _golden_step(lo, hi, x1, x2, f1, f2, take1)
        f_new = _box_frame_dist(a, b, he, x_new)
        x1 = np.where(take1, x_new, x_keep)
        f1 = np.where(take1, f_new, f_keep)
        x2 = np.where(take1, x_keep, x_new)
        f2 = np.where(take1, f_keep, f_new)
        best = np.minimum(best, f_new)
    return best <= thr


def collision_mask(positions: np.ndarray, quats: np.ndarray, body: ContainerBody, scene: Scene) -> np.ndarray:
    """Vectorized collision test for a batch of poses.

    Args:
        positions: (M, 3) world positions of the container bottom center.
        quats: (M, 4) unit quaternions.

    Returns:
        Boolean (M,) array; True means colliding or out of bounds.
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    quats = np.atleast_2d(np.asarray(quats, dtype=float))
    a, b = _segment_endpoints(positions, quats, body)
    lo = scene.bounds[0] + body.radius
    hi = scene.bounds[1] - body.radius
    hit = np.any((a < lo) | (a > hi) | (b < lo) | (b > hi), axis=-1)

    for ob in scene.obstacles:
        free = ~hit
        if not np.any(free):
            break
        if isinstance(ob, Sphere):
            dist = _segment_point_dist(a[free], b[free], ob.center)
            hit[free] |= dist <= ob.radius + body.radius
        else:
            if ob.orientation[0] >= 1.0 - 1e-12:  # axis-aligned fast path
                a_box = a[free] - ob.center
                b_box = b[free] - ob.center
            else:
                rot = quat_to_matrix(ob.orientation)
                a_box = (a[free] - ob.center) @ rot
                b_box = (b[free] - ob.center) @ rot
            thresh = body.radius + BOX_CONTACT_SLACK
            # per-axis and circumsphere lower bounds; midpoint/endpoint upper bound
            min_abs = np.where(
                a_box * b_box < 0, 0.0, np.minimum(np.abs(a_box), np.abs(b_box))
            )
            lower_axis = np.linalg.norm(np.maximum(min_abs - ob.half_extents, 0.0), axis=-1)
            lower_sphere = _segment_point_dist(a_box, b_box, np.zeros(3)) - np.linalg.norm(
                ob.half_extents
            )
            lower = np.maximum(lower_axis, lower_sphere)
            upper = np.minimum(
                np.minimum(
                    _box_frame_dist(a_box, b_box, ob.half_extents, np.zeros(len(a_box))),
                    _box_frame_dist(a_box, b_box, ob.half_extents, np.ones(len(a_box))),
                ),
                _box_frame_dist(a_box, b_box, ob.half_extents, np.full(len(a_box), 0.5)),
            )
            sub_hit = upper <= thresh
            unsure = ~sub_hit & (lower <= thresh)
            if np.any(unsure):
                sub_hit[unsure] = _segment_box_hit(
                    a_box[unsure], b_box[unsure], ob.half_extents, thresh
                )
            hit[free] |= sub_hit
    return hit


def in_collision(pose: Pose, body: ContainerBody, scene: Scene) -> bool:
    """True iff the capsule at ``pose`` intersects an obstacle or exits bounds."""
    return bool(collision_mask(pose.position[None], pose.orientation[None], body, scene)[0])


def interpolation_count(a: Pose, b: Pose, resolution: float, w_rot: float = 0.0) -> int:
    """Number of samples so spacing stays at or below ``resolution``.

    Spacing is measured along the position arc, plus ``w_rot`` times the
    rotation geodesic when a rotation weight is given (so pure rotations
    still get resolved).
    """
    length = float(np.linalg.norm(b.position - a.position))
    if w_rot > 0:
        length += w_rot * float(quat_angle(a.orientation, b.orientation))
    return max(2, int(math.ceil(length / resolution)) + 1)


def segment_poses(a: Pose, b: Pose, n: int):
    """n interpolated (positions, quats) between a and b inclusive."""
    s = np.linspace(0.0, 1.0, n)
    positions = (1.0 - s)[:, None] * a.position + s[:, None] * b.position
    quats = slerp(np.tile(a.orientation, (n, 1)), np.tile(b.orientation, (n, 1)), s)
    return positions, quats


def segment_free(
    a: Pose, b: Pose, body: ContainerBody, scene: Scene, resolution: float, w_rot: float = 0.0
) -> bool:
    """True iff every interpolated sample of the segment is collision-free.

    Samples are spaced at most ``resolution`` apart along the position arc
    (plus weighted rotation if ``w_rot`` > 0), endpoints included.
    """
    if not resolution > 0:
        raise InvalidConfig(f"resolution must be positive, got {resolution}")
    n = interpolation_count(a, b, resolution, w_rot)
    positions, quats = segment_poses(a, b, n)
    return not bool(np.any(collision_mask(positions, quats, body, scene)))


def _pose_from_dict(d: dict) -> Pose:
    return Pose(position=d["position"], orientation=d.get("orientation", IDENTITY_QUAT))


def _obstacle_from_dict(d: dict):
    kind = d.get("type")
    if kind == "sphere":
        return Sphere(center=d["center"], radius=d["radius"])
    if kind == "box":
        return Box(
            center=d["center"],
            half_extents=d["half_extents"],
            orientation=d.get("orientation", IDENTITY_QUAT),
        )
    raise InvalidConfig(f"unknown obstacle type {kind!r}")


def load_scene(path) -> Scene:
    """Read a scene from JSON (bounds, obstacles, start/goal, tolerances)."""
    with open(path) as f:
        data = json.load(f)
    try:
        return Scene(
            bounds=np.array([data["bounds"]["lo"], data["bounds"]["hi"]]),
            obstacles=tuple(_obstacle_from_dict(o) for o in data.get("obstacles", [])),
            start=_pose_from_dict(data["start"]),
            goal=_pose_from_dict(data["goal"]),
            goal_pos_tol=float(data.get("goal_pos_tol", 0.05)),
            goal_tilt_tol=float(data.get("goal_tilt_tol", 0.2)),
        )
    except KeyError as e:
        raise InvalidConfig(f"scene file {path} missing key {e}") from e


def save_scene(scene: Scene, path) -> None:
    data = {
        "bounds": {"lo": scene.bounds[0].tolist(), "hi": scene.bounds[1].tolist()},
        "obstacles": [ob.to_dict() for ob in scene.obstacles],
        "start": {
            "position": scene.start.position.tolist(),
            "orientation": scene.start.orientation.tolist(),
        },
        "goal": {
            "position": scene.goal.position.tolist(),
            "orientation": scene.goal.orientation.tolist(),
        },
        "goal_pos_tol": scene.goal_pos_tol,
        "goal_tilt_tol": scene.goal_tilt_tol,
    }
    with open(path, "w") as f:
        json.dump(data, f, indent=2)
        f.write("\n")
