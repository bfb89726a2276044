"""Spill labeling and the jerk-reduction trajectory search.

Ground truth for "does this motion spill" combines two terms evaluated at
every trajectory sample:

* quasi-static surface tilt: the angle between the container symmetry axis
  and the apparent-up direction normalize(g*z_world - a_linear), i.e. where
  a steady liquid surface normal would point under that acceleration;
* slosh transient: a damped pendulum of natural frequency sqrt(g/L),
  linearized about the container axis and integrated in the container frame
  with an exact zero-order-hold discretization. Its angular lag behind the
  quasi-static equilibrium, scaled by a gain, models the surface overshoot.

The motion spills when the combined effective tilt exceeds the container's
maximum spill-free tilt angle anywhere along the trajectory. The search
loop (``sftp``) lowers the jerk bound geometrically and returns the first
time parameterization a classifier accepts.

Linearization limits, by design: angular-rate coupling between the body
frame and the pendulum is neglected, and samples where the apparent
gravity nearly vanishes (free fall) are labeled as violations outright
since no surface orientation exists there.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.signal import lfilter, lfiltic

from sfrrt.container import ContainerSpec, max_tilt_angle
from sfrrt.errors import (
    InvalidConfig,
    NonFiniteTrajectory,
    NoSpillFreeTrajectory,
)
from sfrrt.planner import Path, PlannerConfig, plan, prune
from sfrrt.scene import Scene
from sfrrt.se3 import quat_conjugate, quat_rotate
from sfrrt.timeparam import DEFAULT_DT, KinematicLimits, parameterize, scale_jerk
from sfrrt.trajectory import Trajectory

GRAVITY = 9.81
DEFAULT_RATE = 2.0
# Default jerk floor divisor: sftp gives up once the bound drops below
# j_max / JERK_FLOOR_DIV.
JERK_FLOOR_DIV = 1024.0
# Apparent gravity below this fraction of g counts as free fall.
_FREE_FALL_FRAC = 1e-9


@dataclass(frozen=True)
class SloshParams:
    """Pendulum surrogate constants.

    Attributes:
        length: pendulum length in meters; None means half the container
            height of whatever container the label is computed for.
        zeta: damping ratio, in [0, 1).
        kappa: gain from pendulum deflection to surface tilt contribution.
        step: upper bound on the integration interval in seconds; sample
            intervals longer than this are subdivided with linearly
            interpolated acceleration input.
        epsilon: spill margin in radians; the verdict is "spilled" once the
            margin drops below it.
    """

    length: float | None = None
    zeta: float = 0.05
    kappa: float = 1.0
    step: float = 0.01
    epsilon: float = 0.0

    def __post_init__(self):
        if self.length is not None and not (np.isfinite(self.length) and self.length > 0):
            raise InvalidConfig(f"pendulum length must be positive, got {self.length}")
        if not (np.isfinite(self.zeta) and 0.0 <= self.zeta < 1.0):
            raise InvalidConfig(f"damping ratio must be in [0, 1), got {self.zeta}")
        if not (np.isfinite(self.kappa) and self.kappa >= 0.0):
            raise InvalidConfig(f"slosh gain must be nonnegative, got {self.kappa}")
        if not (np.isfinite(self.step) and self.step > 0.0):
            raise InvalidConfig(f"integration step must be positive, got {self.step}")
        if not (np.isfinite(self.epsilon) and self.epsilon >= 0.0):
            raise InvalidConfig(f"spill margin must be nonnegative, got {self.epsilon}")

    def resolved_length(self, container: ContainerSpec) -> float:
        return self.length if self.length is not None else 0.5 * container.h_c


@dataclass(frozen=True)
class SpillVerdict:
    """Label for one trajectory.

    ``margin`` is the minimum over time of (max spill-free tilt - effective
    tilt), in radians; negative means the surface was past the rim at some
    sample. ``spilled`` holds exactly when the margin is below the epsilon
    the labeler was configured with. ``first_violation_time`` is the first
    sample time that violated, or None (never violated, or the backend has
    no per-sample trace).
    """

    spilled: bool
    margin: float
    first_violation_time: float | None = None


def _pendulum_filter(omega: float, zeta: float, h: float):
    """Discrete transfer function of the driven pendulum at step ``h``.

    Continuous dynamics eta'' + 2*zeta*omega*eta' + omega^2*eta =
    omega^2*u, discretized exactly under zero-order-hold input via the
    block matrix exponential. Returns (b, a) for :func:`scipy.signal.lfilter`.
    """
    blk = np.zeros((3, 3))
    blk[0, 1] = 1.0
    blk[1, 0] = -omega * omega
    blk[1, 1] = -2.0 * zeta * omega
    blk[1, 2] = omega * omega
    m = expm(blk * h)
    ad, bd = m[:2, :2], m[:2, 2]
    b = np.array([0.0, bd[0], ad[0, 1] * bd[1] - ad[1, 1] * bd[0]])
    a = np.array([1.0, -(ad[0, 0] + ad[1, 1]), ad[0, 0] * ad[1, 1] - ad[0, 1] * ad[1, 0]])
    return b, a


def _effective_tilt(traj: Trajectory, container: ContainerSpec, p: SloshParams) -> np.ndarray:
    """Per-sample effective surface tilt (quasi-static + slosh), radians."""
    acc = np.asarray(traj.lin_acc, dtype=float)
    quats = np.asarray(traj.orientations, dtype=float)
    if not (np.all(np.isfinite(acc)) and np.all(np.isfinite(quats))):
        raise NonFiniteTrajectory("trajectory contains NaN or infinity")

    apparent = np.array([0.0, 0.0, GRAVITY]) - acc
    norm = np.linalg.norm(apparent, axis=1)
    free_fall = norm < _FREE_FALL_FRAC * GRAVITY
    norm = np.where(free_fall, 1.0, norm)
    up_world = apparent / norm[:, None]

    # Apparent up in the container frame; its z gives the quasi-static
    # angle, its xy direction the plane the liquid leans in.
    up_body = quat_rotate(quat_conjugate(quats), up_world)
    quasi = np.arccos(np.clip(up_body[:, 2], -1.0, 1.0))
    lean = np.linalg.norm(up_body[:, :2], axis=1)
    direction = up_body[:, :2] / np.where(lean < 1e-15, 1.0, lean)[:, None]
    u = quasi[:, None] * direction

    if len(traj) == 1:
        deflection = np.zeros(1)
    else:
        n_sub = max(1, int(math.ceil(traj.dt / p.step - 1e-9)))
        drive = u
        if n_sub > 1:
            t_fine = np.arange((len(u) - 1) * n_sub + 1) / n_sub
            base = np.arange(len(u), dtype=float)
            drive = np.column_stack(
                [np.interp(t_fine, base, u[:, k]) for k in range(2)]
            )
        omega = math.sqrt(GRAVITY / p.resolved_length(container))
        b, a = _pendulum_filter(omega, p.zeta, traj.dt / n_sub)
        # Start at the equilibrium for the initial drive so a motionless
        # container has zero slosh for all time.
        dc = (b[1] + b[2]) / (1.0 + a[1] + a[2])
        zi = np.stack(
            [lfiltic(b, a, [dc * u0, dc * u0], [u0, u0]) for u0 in u[0]], axis=1
        )
        eta, _ = lfilter(b, a, drive, axis=0, zi=zi)
        eta = eta[::n_sub]
        deflection = np.linalg.norm(eta - u, axis=1)

    eff = quasi + p.kappa * deflection
    return np.where(free_fall, math.pi, eff)


def oracle_label(
    traj: Trajectory, container: ContainerSpec, p: SloshParams = SloshParams()
) -> SpillVerdict:
    """Label a trajectory by simulating the pendulum surrogate.

    Deterministic. The margin is theta_max minus the worst effective tilt;
    the trajectory spills when the margin drops below ``p.epsilon``.

    Raises:
        NonFiniteTrajectory: NaN or infinity in the sampled channels.
    """
    theta_max = max_tilt_angle(container).theta_max
    eff = _effective_tilt(traj, container, p)
    margin = float(theta_max - eff.max())
    violated = eff > theta_max - p.epsilon
    first = float(traj.times[int(np.argmax(violated))]) if violated.any() else None
    return SpillVerdict(spilled=margin < p.epsilon, margin=margin, first_violation_time=first)


class ClassifierHandle(ABC):
    """One backing spill classifier; ``label`` is the single entry point."""

    kind: str = "abstract"

    @abstractmethod
    def label(self, traj: Trajectory, container: ContainerSpec) -> SpillVerdict:
        raise NotImplementedError


class OracleHandle(ClassifierHandle):
    """Pendulum-surrogate ground truth."""

    kind = "oracle"

    def __init__(self, params: SloshParams = SloshParams()):
        self.params = params

    def label(self, traj, container):
        return oracle_label(traj, container, self.params)


class LearnedHandle(ClassifierHandle):
    """Transformer classifier; spilled when the spill probability tops 0.5.

    The margin is the negated logit, so it is positive exactly when the
    model calls the trajectory spill-free.
    """

    kind = "learned"

    def __init__(self, model, bounds):
        self.model = model
        self.bounds = np.asarray(bounds, dtype=float)

    def label(self, traj, container):
        from sfrrt.sfc import encode, forward

        prob = forward(self.model, encode(traj, container, self.bounds))
        margin = float(np.log1p(-prob) - np.log(prob))
        return SpillVerdict(spilled=prob > 0.5, margin=margin, first_violation_time=None)


class RandomHandle(ClassifierHandle):
    """Accepts each query independently at random; reproducible per seed."""

    kind = "random"

    def __init__(self, seed: int, accept_prob: float = 0.5):
        if not 0.0 <= accept_prob <= 1.0:
            raise InvalidConfig(f"accept probability must be in [0, 1], got {accept_prob}")
        self.seed = seed
        self.accept_prob = accept_prob
        self._rng = np.random.default_rng(seed)

    def label(self, traj, container):
        spilled = bool(self._rng.random() >= self.accept_prob)
        return SpillVerdict(spilled=spilled, margin=-1.0 if spilled else 1.0)


class AlwaysSpill(ClassifierHandle):
    kind = "always_spill"

    def label(self, traj, container):
        return SpillVerdict(spilled=True, margin=-math.inf)


class NeverSpill(ClassifierHandle):
    kind = "never_spill"

    def label(self, traj, container):
        return SpillVerdict(spilled=False, margin=math.inf)


def classify(h: ClassifierHandle, traj: Trajectory, container: ContainerSpec) -> SpillVerdict:
    """Dispatch one spill query to the handle's backing classifier."""
    if not isinstance(h, ClassifierHandle):
        raise InvalidConfig(f"expected a ClassifierHandle, got {type(h).__name__}")
    return h.label(traj, container)


def sftp(
    path: Path,
    limits: KinematicLimits,
    h: ClassifierHandle,
    container: ContainerSpec,
    *,
    rate: float = DEFAULT_RATE,
    j_floor: float | None = None,
    dt: float = DEFAULT_DT,
) -> Trajectory:
    """First trajectory in the descending-jerk sequence the classifier accepts.

    Candidates are time parameterizations of ``path`` with jerk bounds
    j_max, j_max/rate, j_max/rate^2, ... (linear and angular bounds scale
    together); each is classified in turn and the first spill-free one is
    returned. The query count is one plus the number of rejections.

    Args:
        path: waypoint path, or any pose sequence ``parameterize`` accepts.
        limits: kinematic limits of the first (fastest) candidate.
        h: classifier consulted after each parameterization.
        container: container the classifier labels against.
        rate: jerk decrease factor between candidates, > 1.
        j_floor: give up once the jerk bound is at or below this;
            defaults to limits.j_max / 1024.
        dt: trajectory sample interval.

    Raises:
        NoSpillFreeTrajectory: every candidate down to the floor rejected.
        InvalidConfig: bad rate or floor.
    """
    if not (np.isfinite(rate) and rate > 1.0):
        raise InvalidConfig(f"jerk decrease factor must exceed 1, got {rate}")
    if j_floor is None:
        j_floor = limits.j_max / JERK_FLOOR_DIV
    if not (np.isfinite(j_floor) and j_floor > 0.0):
        raise InvalidConfig(f"jerk floor must be positive, got {j_floor}")

    k = 0
    while limits.j_max / rate**k > j_floor * (1.0 + 1e-9):
        candidate = parameterize(path, scale_jerk(limits, rate**k), dt=dt)
        if not classify(h, candidate, container).spilled:
            return candidate
        k += 1
    raise NoSpillFreeTrajectory(
        f"all {k} candidates rejected before the jerk bound fell below {j_floor:.6g}"
    )


def srrt_star(
    scene: Scene,
    container: ContainerSpec,
    limits: KinematicLimits,
    h: ClassifierHandle,
    cfg: PlannerConfig = PlannerConfig(),
    *,
    rate: float = DEFAULT_RATE,
    j_floor: float | None = None,
    dt: float = DEFAULT_DT,
    stop_on_first: bool = False,
) -> Trajectory:
    """Plan, prune, then search jerk bounds: the full spill-free pipeline.

    The returned trajectory is collision-free along the planned path,
    respects the tilt cap and kinematic limits, and was accepted by the
    classifier.

    Raises:
        InfeasibleQuery, NoPathFound: from planning.
        NoSpillFreeTrajectory: classifier rejected every jerk bound.
    """
    path = plan(scene, container, cfg, stop_on_first=stop_on_first)
    path = prune(path, scene, container, cfg)
    return sftp(path, limits, h, container, rate=rate, j_floor=j_floor, dt=dt)
