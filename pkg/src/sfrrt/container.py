"""Quasi-static tilt geometry for frustum-of-cone containers.

The container is an open-top frustum of a cone (straight or outward-sloping
walls) holding liquid up to a rest fill height. Everything here works on the
2D cross-section through the symmetry axis: the container is a trapezoid, the
liquid a clipped polygon, and "spilling" means the liquid cross-section area
can no longer be conserved below the rim with a horizontal free surface.

Two solvers are provided for the maximum tilt angle: a closed form derived
from area conservation (fast path) and a polygon-clipping bisection oracle
(ground truth). They agree to better than 1e-4 rad and the oracle is the
authority wherever they would not.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import linprog

from sfrrt.errors import Degenerate, EmptyProfile, InvalidContainer, NonFiniteInput

# Polygon areas smaller than this are treated as zero (square meters).
AREA_TOL = 1e-12


class TiltCase(Enum):
    """Shape of the liquid cross-section at the maximum tilt angle."""

    TRAPEZOID_PLUS_TRIANGLE = "TrapezoidPlusTriangle"
    TRIANGLE_ONLY = "TriangleOnly"


@dataclass(frozen=True)
class ContainerSpec:
    """Frustum-of-cone container with a rest fill level.

    Attributes:
        r_b: bottom radius in meters.
        r_u: top (rim) radius in meters, at least ``r_b``.
        h_c: container height in meters.
        h_w: liquid fill height at rest, measured vertically from the
            bottom center, in meters.
    """

    r_b: float
    r_u: float
    h_c: float
    h_w: float

    def __post_init__(self):
        vals = (self.r_b, self.r_u, self.h_c, self.h_w)
        if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in vals):
            raise InvalidContainer(f"container dimensions must be finite numbers, got {vals}")
        if self.r_b <= 0 or self.r_u <= 0 or self.h_c <= 0:
            raise InvalidContainer(
                f"r_b, r_u, h_c must be positive, got r_b={self.r_b} r_u={self.r_u} h_c={self.h_c}"
            )
        if self.r_u < self.r_b:
            raise InvalidContainer(f"inverted frustum rejected: r_u={self.r_u} < r_b={self.r_b}")
        if not 0 <= self.h_w <= self.h_c:
            raise InvalidContainer(f"fill height h_w={self.h_w} outside [0, h_c={self.h_c}]")

    @property
    def wall_slope(self) -> float:
        """Radius increase per unit height, (r_u - r_b)/h_c."""
        return (self.r_u - self.r_b) / self.h_c

    def radius_at(self, z: float) -> float:
        """Wall radius at height ``z`` above the bottom."""
        return self.r_b + self.wall_slope * z

    @property
    def rest_surface_radius(self) -> float:
        """Wall radius at the rest liquid surface."""
        return self.radius_at(self.h_w)

    @property
    def rest_area(self) -> float:
        """Liquid cross-section area at rest (trapezoid up to h_w)."""
        return self.h_w * (self.r_b + self.rest_surface_radius)

    @property
    def fill_fraction(self) -> float:
        """Liquid area as a fraction of the full container cross-section."""
        return self.rest_area / (self.h_c * (self.r_b + self.r_u))

    def to_dict(self) -> dict:
        return {"r_b": self.r_b, "r_u": self.r_u, "h_c": self.h_c, "h_w": self.h_w}


@dataclass(frozen=True)
class TiltResult:
    """Maximum quasi-static tilt angle and how the liquid sits there.

    Attributes:
        theta_max: largest spill-free tilt angle in radians, in [0, pi/2].
        case: liquid cross-section shape at theta_max.
        wet_bottom_width: width of the container bottom still covered by
            liquid at theta_max, in meters. Equals the full bottom width
            2*r_b in the trapezoid-plus-triangle case.
    """

    theta_max: float
    case: TiltCase
    wet_bottom_width: float


def max_tilt_angle(c: ContainerSpec) -> TiltResult:
    """Closed-form maximum spill-free tilt angle of ``c``.

    Derived from 2D area conservation. With the free surface pinned at the
    low rim corner, the conserved liquid area determines either

    * the surface-bottom intersection (liquid is a single triangle;
      ``wet_bottom_width`` = 2*A_rest/h_c must fit inside the bottom), or
    * the surface height y_L on the high wall (liquid spans the whole
      bottom), via A_rest = r_b*h_c + r_u*y_L,

    and the tilt angle follows from the surface slope. An empty container
    (h_w = 0) never spills and returns pi/2 exactly.

    Raises:
        InvalidContainer: on invalid dimensions (via ContainerSpec).
    """
    area = c.rest_area
    if area <= AREA_TOL:
        # Below the area tolerance the container counts as empty; note the
        # limit h_w -> 0+ differs from h_w = 0 for flared cups (wall angle
        # vs pi/2), and the oracle resolves the same way.
        return TiltResult(theta_max=math.pi / 2, case=TiltCase.TRIANGLE_ONLY, wet_bottom_width=0.0)

    bottom_slab = c.r_b * c.h_c
    if area <= bottom_slab:
        # Triangle only: surface runs from the low rim corner to the bottom.
        wet = 2.0 * area / c.h_c
        theta = math.atan2(c.h_c, (c.r_u - c.r_b) + wet)
        return TiltResult(theta_max=theta, case=TiltCase.TRIANGLE_ONLY, wet_bottom_width=wet)

    # Trapezoid plus triangle: surface meets the high wall at height y_L.
    # For a brim-full container y_L == h_c analytically; rounding in the
    # division can overshoot by an ulp, so clamp the rise at zero.
    y_l = (area - bottom_slab) / c.r_u
    theta = math.atan2(max(0.0, c.h_c - y_l), c.r_u + c.r_b + c.wall_slope * y_l)
    return TiltResult(
        theta_max=theta, case=TiltCase.TRAPEZOID_PLUS_TRIANGLE, wet_bottom_width=2.0 * c.r_b
    )


def _clip_below(poly: np.ndarray, a: float, b: float, rhs: float) -> np.ndarray:
    """Clip polygon to the half-plane a*x + b*y <= rhs (Sutherland-Hodgman)."""
    out = []
    n = len(poly)
    side = poly @ np.array([a, b]) - rhs
    for i in range(n):
        j = (i + 1) % n
        pi, pj = poly[i], poly[j]
        si, sj = side[i], side[j]
        if si <= 0:
            out.append(pi)
            if sj > 0:
                out.append(pi + (si / (si - sj)) * (pj - pi))
        elif sj <= 0:
            out.append(pi + (si / (si - sj)) * (pj - pi))
    return np.array(out) if out else np.empty((0, 2))


def _poly_area(poly: np.ndarray) -> float:
    """Shoelace area of a CCW polygon."""
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _cross_section(c: ContainerSpec) -> np.ndarray:
    """Container cross-section trapezoid, counter-clockwise."""
    return np.array(
        [(-c.r_b, 0.0), (c.r_b, 0.0), (c.r_u, c.h_c), (-c.r_u, c.h_c)]
    )


def retained_area(c: ContainerSpec, theta: float) -> float:
    """Largest liquid area the container holds at tilt ``theta``.

    The free surface is horizontal in the world and passes through the low
    rim corner; in container coordinates that is the line of constant world
    height -x*sin(theta) + z*cos(theta) through (r_u, h_c). Everything at or
    below it is retained.
    """
    s, co = math.sin(theta), math.cos(theta)
    clipped = _clip_below(_cross_section(c), -s, co, -c.r_u * s + c.h_c * co)
    return _poly_area(clipped)


def tilt_angle_oracle(c: ContainerSpec, tol: float = 1e-6) -> TiltResult:
    """Numeric ground truth for :func:`max_tilt_angle`.

    Bisects the tilt angle on the predicate "retained area at the low rim
    >= rest area". The retained set shrinks monotonically with tilt (each
    point's world height relative to the pivot corner grows with theta:
    the derivative (r_u - x)cos + (h_c - z)sin is nonnegative over the
    trapezoid), so bisection is valid. The returned angle is the feasible
    (lower) end of the final bracket.

    Args:
        c: container to solve.
        tol: absolute tolerance on the returned angle, radians.
    """
    if not tol > 0:
        raise Degenerate(f"oracle tolerance must be positive, got {tol}")
    area = c.rest_area

    def holds(theta: float) -> bool:
        return retained_area(c, theta) + AREA_TOL >= area

    lo, hi = 0.0, math.pi / 2
    if holds(hi):
        lo = hi
    else:
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if holds(mid):
                lo = mid
            else:
                hi = mid

    wet = 2.0 * area / c.h_c
    if area <= c.r_b * c.h_c:
        return TiltResult(theta_max=lo, case=TiltCase.TRIANGLE_ONLY, wet_bottom_width=wet)
    return TiltResult(
        theta_max=lo, case=TiltCase.TRAPEZOID_PLUS_TRIANGLE, wet_bottom_width=2.0 * c.r_b
    )


def conservative_frustum_of(heights, radii, h_w: float) -> ContainerSpec:
    """Largest frustum inscribed in a rotationally symmetric wall profile.

    The profile is a piecewise-linear radius-vs-height sampling of the true
    container wall. The inscribed frustum maximizes the 2D cross-section
    area (r_b + r_u)*h_c subject to its wall staying inside the profile;
    because both walls are piecewise linear, enforcing the constraint at the
    sample heights is exact. Solved as a linear program.

    For profiles that are already frustums or cylinders the reduction is
    exact (same container, same tilt angle). For curved profiles it is an
    approximation: the returned frustum holds less liquid at the same fill
    height, which can overstate the tilt limit by a degree or two for
    gently curved cups and more for strongly flared ones. Treat the result
    as a simplification, not a certified lower bound, when the profile wall
    is curved.

    Args:
        heights: strictly increasing sample heights, meters. The bottom of
            the returned frustum sits at ``heights[0]``.
        radii: positive wall radius at each sample height.
        h_w: rest fill height of the returned container, measured from the
            profile bottom.

    Raises:
        EmptyProfile: no samples.
        NonFiniteInput: NaN or infinity in the profile.
        Degenerate: heights not strictly increasing, or no valid frustum
            fits (profile pinches to zero radius at an end).
    """
    z = np.asarray(heights, dtype=float)
    r = np.asarray(radii, dtype=float)
    if z.size == 0 or r.size == 0:
        raise EmptyProfile("wall profile has no samples")
    if z.shape != r.shape or z.ndim != 1:
        raise Degenerate(f"heights and radii must be equal-length 1D, got {z.shape} vs {r.shape}")
    if not (np.isfinite(z).all() and np.isfinite(r).all()):
        raise NonFiniteInput("wall profile contains NaN or infinity")
    if z.size < 2:
        raise Degenerate("wall profile needs at least two samples")
    if not (np.diff(z) > 0).all():
        raise Degenerate("profile heights must be strictly increasing")
    if (r <= 1e-9).any():
        raise Degenerate("profile radii must be positive (and above 1e-9 m)")

    z = z - z[0]
    h_c = float(z[-1])
    t = z / h_c

    # max r_b + r_u  s.t.  (1-t_i) r_b + t_i r_u <= r_i  and  r_b <= r_u
    a_ub = np.column_stack([1.0 - t, t])
    a_ub = np.vstack([a_ub, [1.0, -1.0]])
    b_ub = np.append(r, 0.0)
    res = linprog(c=[-1.0, -1.0], A_ub=a_ub, b_ub=b_ub, bounds=[(1e-9, None)] * 2, method="highs")
    if not res.success:
        raise Degenerate(f"no frustum fits the profile: {res.message}")
    r_b, r_u = res.x

    # Snap to the profile's own endpoints when they are optimal (exact
    # fixed point for profiles that are already frustums).
    cand = np.array([r[0], r[-1]])
    if cand[0] <= cand[1] and (a_ub[:-1] @ cand <= r + 1e-12).all() and cand.sum() >= r_b + r_u - 1e-9:
        r_b, r_u = cand

    return ContainerSpec(r_b=float(r_b), r_u=float(r_u), h_c=h_c, h_w=float(h_w))


def fill_height_for_fraction(r_b: float, r_u: float, h_c: float, fraction: float) -> float:
    """Fill height whose rest area is ``fraction`` of the full cross-section.

    Inverts h*(2*r_b + s*h) = fraction*(r_b + r_u)*h_c for h (quadratic in h,
    linear for cylinders). Useful for comparing containers at equal fill.

    Raises:
        InvalidConfig: fraction outside [0, 1].
    """
    from sfrrt.errors import InvalidConfig

    if not 0.0 <= fraction <= 1.0:
        raise InvalidConfig(f"fill fraction must be in [0, 1], got {fraction}")
    target = fraction * (r_b + r_u) * h_c
    s = (r_u - r_b) / h_c
    if s < 1e-15:
        return target / (2.0 * r_b)
    h = (-2.0 * r_b + math.sqrt(4.0 * r_b * r_b + 4.0 * s * target)) / (2.0 * s)
    return min(h, h_c)


def load_container(path) -> ContainerSpec:
    """Read a container from a JSON file with keys r_b, r_u, h_c, h_w (meters)."""
    with open(path) as f:
        data = json.load(f)
    try:
        return ContainerSpec(
            r_b=float(data["r_b"]), r_u=float(data["r_u"]),
            h_c=float(data["h_c"]), h_w=float(data["h_w"]),
        )
    except KeyError as e:
        raise InvalidContainer(f"container file {path} missing key {e}") from e


def save_container(c: ContainerSpec, path) -> None:
    """Write ``c`` as JSON."""
    with open(path, "w") as f:
        json.dump(c.to_dict(), f, indent=2)
        f.write("\n")
