"""Pose sampling over the spill-free orientation set.

Informed mode draws orientations whose tilt never exceeds the configured
cap: the tilt cosine is uniform on [cos(theta_max), 1] (area-uniform over
the spherical cap of body-z directions), tilt azimuth and spin about the
symmetry axis are uniform on the circle. Uniform mode draws orientations
uniformly over the whole rotation group instead. Positions are uniform in
the workspace box in both modes.

The informed tilt bound is exact by construction up to floating-point
rounding (well below 1e-12 rad); consumers that compare against the cap
should allow that much slack.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from sfrrt.errors import InvalidConfig
from sfrrt.se3 import Pose


class SamplerMode(Enum):
    INFORMED = "informed"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class SamplerConfig:
    """Sampling distribution parameters.

    Attributes:
        theta_max: tilt cap in radians, within [0, pi/2].
        bounds: (2, 3) workspace box, rows lo/hi.
        mode: informed (tilt-capped) or uniform orientations.
        seed: 64-bit seed for the sample stream.
    """

    theta_max: float
    bounds: np.ndarray
    mode: SamplerMode = SamplerMode.INFORMED
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.theta_max) and 0.0 <= self.theta_max <= np.pi / 2):
            raise InvalidConfig(f"theta_max must be in [0, pi/2], got {self.theta_max}")
        b = np.asarray(self.bounds, dtype=float).reshape(2, 3)
        if not np.all(np.isfinite(b)) or np.any(b[0] >= b[1]):
            raise InvalidConfig(f"bounds must be finite with lo < hi, got {b}")
        b.flags.writeable = False
        object.__setattr__(self, "bounds", b)
        if not isinstance(self.mode, SamplerMode):
            raise InvalidConfig(f"mode must be a SamplerMode, got {self.mode!r}")


def informed_quats(rng: np.random.Generator, theta_max: float, n: int) -> np.ndarray:
    """n quaternions with tilt distributed area-uniformly on the cap."""
    cos_tilt = rng.uniform(np.cos(theta_max), 1.0, size=n)
    half = 0.5 * np.arccos(np.clip(cos_tilt, -1.0, 1.0))
    azimuth = rng.uniform(0.0, 2.0 * np.pi, size=n)
    spin_half = 0.5 * rng.uniform(0.0, 2.0 * np.pi, size=n)
    # tilt about the horizontal axis (cos a, sin a, 0), then spin about body z
    s_t, c_t = np.sin(half), np.cos(half)
    s_p, c_p = np.sin(spin_half), np.cos(spin_half)
    return np.stack(
        [
            c_t * c_p,
            s_t * np.cos(azimuth - spin_half),
            s_t * np.sin(azimuth - spin_half),
            c_t * s_p,
        ],
        axis=-1,
    )


def uniform_quats(rng: np.random.Generator, n: int) -> np.ndarray:
    """n quaternions uniform over the rotation group (normalized Gaussians)."""
    q = rng.normal(size=(n, 4))
    return q / np.linalg.norm(q, axis=1, keepdims=True)


class PoseSampler:
    """Seeded stream of workspace poses.

    Draws are deterministic for a given config (same seed, same platform,
    same sequence of calls).
    """

    def __init__(self, cfg: SamplerConfig):
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)

    def sample_batch(self, n: int):
        """Returns (positions (n, 3), quaternions (n, 4))."""
        lo, hi = self.cfg.bounds
        positions = self.rng.uniform(lo, hi, size=(n, 3))
        if self.cfg.mode is SamplerMode.INFORMED:
            quats = informed_quats(self.rng, self.cfg.theta_max, n)
        else:
            quats = uniform_quats(self.rng, n)
        return positions, quats

    def sample(self) -> Pose:
        positions, quats = self.sample_batch(1)
        return Pose(positions[0], quats[0])


def sample_pose(cfg: SamplerConfig, rng: np.random.Generator) -> Pose:
    """One pose from an externally managed generator state."""
    lo, hi = cfg.bounds
    position = rng.uniform(lo, hi, size=3)
    if cfg.mode is SamplerMode.INFORMED:
        quat = informed_quats(rng, cfg.theta_max, 1)[0]
    else:
        quat = uniform_quats(rng, 1)[0]
    return Pose(position, quat)
