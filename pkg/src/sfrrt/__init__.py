"""Spill-free motion planning for open-top liquid-filled containers."""

from sfrrt import errors
from sfrrt.container import (
    ContainerSpec,
    TiltCase,
    TiltResult,
    conservative_frustum_of,
    fill_height_for_fraction,
    max_tilt_angle,
    tilt_angle_oracle,
)
from sfrrt.planner import Path, PlannerConfig, plan, prune
from sfrrt.scene import Box, Scene, Sphere, load_scene, save_scene
from sfrrt.scenes import build_scene
from sfrrt.se3 import Pose, tilt_of
from sfrrt.spill import (
    AlwaysSpill,
    ClassifierHandle,
    LearnedHandle,
    NeverSpill,
    OracleHandle,
    RandomHandle,
    SloshParams,
    SpillVerdict,
    oracle_label,
    sftp,
    srrt_star,
)
from sfrrt.timeparam import KinematicLimits, SCurve, parameterize, scale_jerk
from sfrrt.trajectory import Trajectory
from sfrrt.validate import ValidationReport, validate_path, validate_trajectory

__version__ = "0.1.0"

__all__ = [
    "AlwaysSpill",
    "Box",
    "ClassifierHandle",
    "ContainerSpec",
    "KinematicLimits",
    "LearnedHandle",
    "NeverSpill",
    "OracleHandle",
    "Path",
    "PlannerConfig",
    "Pose",
    "RandomHandle",
    "SCurve",
    "Scene",
    "SloshParams",
    "Sphere",
    "SpillVerdict",
    "TiltCase",
    "TiltResult",
    "Trajectory",
    "ValidationReport",
    "__version__",
    "build_scene",
    "conservative_frustum_of",
    "errors",
    "fill_height_for_fraction",
    "load_scene",
    "max_tilt_angle",
    "oracle_label",
    "parameterize",
    "plan",
    "prune",
    "save_scene",
    "scale_jerk",
    "sftp",
    "srrt_star",
    "tilt_angle_oracle",
    "tilt_of",
    "validate_path",
    "validate_trajectory",
]
