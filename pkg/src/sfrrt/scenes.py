"""Benchmark scene builders.

These are small, deterministic scene factories used by the demos, the
experiment harness, and the tests. Dimensions are in meters.
"""

from __future__ import annotations

import math

import numpy as np

from sfrrt.container import ContainerSpec
from sfrrt.errors import InvalidConfig
from sfrrt.scene import Box, Scene, Sphere
from sfrrt.se3 import IDENTITY_QUAT, Pose, quat_from_axis_angle

GATE_CONTAINER = ContainerSpec(r_b=0.03, r_u=0.035, h_c=0.12, h_w=0.06)


def empty_scene(
    length: float = 1.0,
    start_tilt: float = 0.0,
    goal_tilt: float = 0.0,
) -> Scene:
    """Obstacle-free corridor with start and goal ``length`` apart in x."""
    margin = 0.25
    bounds = np.array([[-margin, -margin, 0.0], [length + margin, margin, 0.5]])
    y_axis = np.array([0.0, 1.0, 0.0])
    return Scene(
        bounds=bounds,
        obstacles=(),
        start=Pose(np.array([0.0, 0.0, 0.25]), quat_from_axis_angle(y_axis, start_tilt)),
        goal=Pose(np.array([length, 0.0, 0.25]), quat_from_axis_angle(y_axis, goal_tilt)),
    )


def tilt_gate_scene(slot_height: float = 0.179, slot_center: float = 0.25) -> Scene:
    """Wall with a horizontal slot that an upright container cannot pass.

    The slot is sized so the standard gate container (0.12 m tall, 0.035 m
    rim radius) fits only when tilted by roughly 25 degrees or more: its
    vertical extent 0.12*cos(theta) + 2*0.035 must drop below the slot
    height. A 15-degree cap leaves the slot impassable.
    """
    wall_x = 0.5
    half_t = 0.02
    z_lo, z_hi = 0.0, 0.5
    slot_bottom = slot_center - slot_height / 2.0
    slot_top = slot_center + slot_height / 2.0
    lower = Box(
        center=np.array([wall_x, 0.0, (z_lo + slot_bottom) / 2.0]),
        half_extents=np.array([half_t, 0.3, (slot_bottom - z_lo) / 2.0]),
    )
    upper = Box(
        center=np.array([wall_x, 0.0, (slot_top + z_hi) / 2.0]),
        half_extents=np.array([half_t, 0.3, (z_hi - slot_top) / 2.0]),
    )
    return Scene(
        bounds=np.array([[0.0, -0.3, 0.0], [1.0, 0.3, z_hi]]),
        obstacles=(lower, upper),
        start=Pose(np.array([0.15, 0.0, 0.10]), IDENTITY_QUAT),
        goal=Pose(np.array([0.85, 0.0, 0.10]), IDENTITY_QUAT),
    )


def shelf_scene() -> Scene:
    """Pick-and-place between two shelf levels past a support pillar."""
    pillar = Box(
        center=np.array([0.5, 0.0, 0.25]),
        half_extents=np.array([0.05, 0.05, 0.25]),
    )
    lower_shelf = Box(
        center=np.array([0.8, 0.0, 0.04]),
        half_extents=np.array([0.2, 0.3, 0.04]),
    )
    return Scene(
        bounds=np.array([[0.0, -0.35, 0.0], [1.0, 0.35, 0.6]]),
        obstacles=(pillar, lower_shelf),
        start=Pose(np.array([0.15, 0.0, 0.20]), IDENTITY_QUAT),
        goal=Pose(np.array([0.85, 0.0, 0.35]), IDENTITY_QUAT),
    )


def clutter_scene(n_spheres: int = 6, seed: int = 7) -> Scene:
    """Random spherical clutter between start and goal, deterministic in seed."""
    rng = np.random.default_rng(seed)
    obstacles = []
    while len(obstacles) < n_spheres:
        c = rng.uniform([0.3, -0.2, 0.1], [0.7, 0.2, 0.4])
        r = rng.uniform(0.03, 0.07)
        # keep the corridor endpoints reachable
        if np.linalg.norm(c - [0.1, 0.0, 0.25]) < r + 0.22:
            continue
        if np.linalg.norm(c - [0.9, 0.0, 0.25]) < r + 0.22:
            continue
        obstacles.append(Sphere(center=c, radius=float(r)))
    return Scene(
        bounds=np.array([[0.0, -0.3, 0.0], [1.0, 0.3, 0.5]]),
        obstacles=tuple(obstacles),
        start=Pose(np.array([0.1, 0.0, 0.25]), IDENTITY_QUAT),
        goal=Pose(np.array([0.9, 0.0, 0.25]), IDENTITY_QUAT),
    )


SCENE_BUILDERS = {
    "empty": empty_scene,
    "gate": tilt_gate_scene,
    "shelf": shelf_scene,
    "clutter": clutter_scene,
}


def build_scene(name: str) -> Scene:
    try:
        return SCENE_BUILDERS[name]()
    except KeyError:
        raise InvalidConfig(
            f"unknown scene {name!r}; choices: {sorted(SCENE_BUILDERS)}"
        ) from None
