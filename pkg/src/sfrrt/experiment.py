"""Seeded benchmark harness with independent re-verification.

Each run plans, prunes, and time-parameterizes under one of four modes,
then re-checks the result with the validator and the quasi-static +
slosh oracle regardless of which classifier guided the search. Success
means a trajectory came back and survived that re-check, so a mode that
gambles on unsafe jerk bounds scores lower even when it returns quickly.

Modes:
    sfrrt     informed sampling, classifier-guided jerk (the full pipeline)
    sfrrt_u   uniform sampling, otherwise identical
    sfrrt_r   informed sampling, coin-flip jerk acceptance
    tiltcap15 informed sampling with a 15 degree planner tilt cap
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace

import numpy as np

from sfrrt.container import ContainerSpec, fill_height_for_fraction, max_tilt_angle
from sfrrt.errors import (
    InfeasibleQuery,
    InvalidConfig,
    NoPathFound,
    NoSpillFreeTrajectory,
)
from sfrrt.planner import PlannerConfig, plan, prune
from sfrrt.sampling import SamplerMode
from sfrrt.scenes import GATE_CONTAINER, build_scene
from sfrrt.se3 import tilt_of_quat
from sfrrt.spill import (
    ClassifierHandle,
    OracleHandle,
    RandomHandle,
    SloshParams,
    oracle_label,
    sftp,
)
from sfrrt.timeparam import KinematicLimits
from sfrrt.validate import validate_trajectory

MODES = ("sfrrt", "sfrrt_u", "sfrrt_r", "tiltcap15")

EXPERIMENT_SCENES = ("empty", "shelf", "clutter")

# one container body at three fill levels; the body geometry is shared so
# only the spill dynamics and tilt limit change between them
_R, _H = 0.04, 0.10
EXPERIMENT_CONTAINERS = {
    "cyl30": ContainerSpec(_R, _R, _H, fill_height_for_fraction(_R, _R, _H, 0.30)),
    "cyl50": ContainerSpec(_R, _R, _H, fill_height_for_fraction(_R, _R, _H, 0.50)),
    "cyl80": ContainerSpec(_R, _R, _H, fill_height_for_fraction(_R, _R, _H, 0.80)),
}

BENCH_LIMITS = KinematicLimits(
    v_max=0.5, a_max=2.0, j_max=20.0, omega_max=2.0, alpha_max=4.0, zeta_max=40.0
)

# wider envelope for the fill sweep so the jerk search has room to
# differentiate fills instead of accepting everything at full jerk
TREND_LIMITS = KinematicLimits(
    v_max=1.0, a_max=4.0, j_max=300.0, omega_max=2.0, alpha_max=4.0, zeta_max=100.0
)

# stronger slosh coupling for the sweep separates adjacent fill levels
TREND_PARAMS = SloshParams(kappa=2.0)

TILT_CAP_15 = math.radians(15.0)


@dataclass(frozen=True)
class RunResult:
    """Outcome of one seeded run, with metrics from the executed trajectory."""

    scene: str
    container: str
    mode: str
    repeat: int
    seed: int
    success: bool
    reason: str
    duration: float
    max_tilt: float
    mean_velocity: float
    margin: float

    def as_row(self) -> dict:
        return {
            "scene": self.scene,
            "container": self.container,
            "mode": self.mode,
            "repeat": self.repeat,
            "seed": self.seed,
            "success": int(self.success),
            "reason": self.reason,
            "duration_s": _fmt(self.duration),
            "max_tilt_rad": _fmt(self.max_tilt),
            "mean_velocity_mps": _fmt(self.mean_velocity),
            "margin_rad": _fmt(self.margin),
        }


RUN_FIELDS = (
    "scene",
    "container",
    "mode",
    "repeat",
    "seed",
    "success",
    "reason",
    "duration_s",
    "max_tilt_rad",
    "mean_velocity_mps",
    "margin_rad",
)

SUMMARY_FIELDS = (
    "scene",
    "container",
    "mode",
    "runs",
    "successes",
    "success_rate",
    "mean_duration_s",
    "mean_max_tilt_deg",
    "mean_velocity_mps",
)


def _fmt(x: float) -> str:
    return "" if math.isnan(x) else f"{x:.6f}"


def _mode_cfg(mode: str, cfg: PlannerConfig, seed: int) -> PlannerConfig:
    if mode not in MODES:
        raise InvalidConfig(f"unknown mode {mode!r}, expected one of {MODES}")
    sampler = SamplerMode.UNIFORM if mode == "sfrrt_u" else SamplerMode.INFORMED
    cap = TILT_CAP_15 if mode == "tiltcap15" else cfg.theta_cap
    return replace(cfg, seed=seed, sampler_mode=sampler, theta_cap=cap)


def _mode_handle(mode: str, seed: int, handle: ClassifierHandle | None) -> ClassifierHandle:
    if mode == "sfrrt_r":
        return RandomHandle(seed)
    return handle if handle is not None else OracleHandle()


def run_single(
    scene_name: str,
    container_name: str,
    mode: str,
    repeat: int,
    *,
    scene=None,
    container: ContainerSpec | None = None,
    limits: KinematicLimits = BENCH_LIMITS,
    cfg: PlannerConfig = PlannerConfig(),
    seed: int = 0,
    handle: ClassifierHandle | None = None,
    params: SloshParams = SloshParams(),
    dt: float = 0.01,
    stop_on_first: bool = True,
    keep_trajectory: bool = False,
):
    """Run one seeded pipeline pass and re-verify it independently.

    Returns ``(RunResult, trajectory_or_None)``; the trajectory is kept
    only when requested so large sweeps stay cheap.
    """
    scene = build_scene(scene_name) if scene is None else scene
    container = EXPERIMENT_CONTAINERS[container_name] if container is None else container
    run_seed = seed + repeat
    run_cfg = _mode_cfg(mode, cfg, run_seed)
    run_handle = _mode_handle(mode, run_seed, handle)

    traj = None
    reason = ""
    try:
        path = plan(scene, container, run_cfg, stop_on_first=stop_on_first)
        path = prune(path, scene, container, run_cfg)
        traj = sftp(path, limits, run_handle, container, dt=dt)
    except (NoPathFound, InfeasibleQuery) as e:
        reason = f"no path: {e}"
    except NoSpillFreeTrajectory as e:
        reason = f"no safe jerk: {e}"

    success = False
    duration = max_tilt = mean_velocity = margin = float("nan")
    if traj is not None:
        duration = traj.duration
        max_tilt = float(tilt_of_quat(traj.orientations).max())
        mean_velocity = float(np.linalg.norm(traj.lin_vel, axis=1).mean())
        verdict = oracle_label(traj, container, params)
        margin = verdict.margin
        report = validate_trajectory(
            traj, scene, container, limits=limits, theta_cap=run_cfg.theta_cap
        )
        if verdict.spilled:
            reason = f"oracle re-check: spill, margin {margin:.4f} rad"
        elif not report.ok:
            reason = "validator: " + "; ".join(report.violations)
        else:
            success = True

    result = RunResult(
        scene=scene_name,
        container=container_name,
        mode=mode,
        repeat=repeat,
        seed=run_seed,
        success=success,
        reason=reason,
        duration=duration,
        max_tilt=max_tilt,
        mean_velocity=mean_velocity,
        margin=margin,
    )
    return result, (traj if keep_trajectory else None)


def run_experiment(
    scenes=EXPERIMENT_SCENES,
    containers=None,
    modes=("sfrrt",),
    repeats: int = 5,
    *,
    seed: int = 0,
    limits: KinematicLimits = BENCH_LIMITS,
    cfg: PlannerConfig = PlannerConfig(),
    handle: ClassifierHandle | None = None,
    params: SloshParams = SloshParams(),
    dt: float = 0.01,
    stop_on_first: bool = True,
    collect_profiles: bool = False,
    progress=None,
):
    """Sweep (scene, container, mode, repeat) in deterministic order.

    Returns ``(results, profiles)``: per-run results plus, when
    ``collect_profiles`` is set, long-format tilt-over-time rows suitable
    for plotting.
    """
    if containers is None:
        containers = EXPERIMENT_CONTAINERS
    if repeats < 1:
        raise InvalidConfig("repeats must be at least 1")
    results = []
    profiles = []
    total = len(scenes) * len(containers) * len(modes) * repeats
    for scene_name in scenes:
        scene = build_scene(scene_name)
        for container_name, container in containers.items():
            for mode in modes:
                for repeat in range(repeats):
                    result, traj = run_single(
                        scene_name,
                        container_name,
                        mode,
                        repeat,
                        scene=scene,
                        container=container,
                        limits=limits,
                        cfg=cfg,
                        seed=seed,
                        handle=handle,
                        params=params,
                        dt=dt,
                        stop_on_first=stop_on_first,
                        keep_trajectory=collect_profiles,
                    )
                    results.append(result)
                    if traj is not None:
                        tilts = tilt_of_quat(traj.orientations)
                        for t, tilt in zip(traj.times, tilts):
                            profiles.append(
                                {
                                    "scene": scene_name,
                                    "container": container_name,
                                    "mode": mode,
                                    "repeat": repeat,
                                    "t": float(t),
                                    "tilt_rad": float(tilt),
                                }
                            )
                    if progress is not None:
                        progress(len(results), total)
    return results, profiles


def aggregate(results) -> list:
    """Summarize runs per (scene, container, mode), in first-seen order."""
    groups: dict = {}
    for r in results:
        groups.setdefault((r.scene, r.container, r.mode), []).append(r)
    rows = []
    for (scene_name, container_name, mode), runs in groups.items():
        wins = [r for r in runs if r.success]
        rows.append(
            {
                "scene": scene_name,
                "container": container_name,
                "mode": mode,
                "runs": len(runs),
                "successes": len(wins),
                "success_rate": len(wins) / len(runs),
                "mean_duration_s": (
                    float(np.mean([r.duration for r in wins])) if wins else float("nan")
                ),
                "mean_max_tilt_deg": (
                    float(np.degrees(np.mean([r.max_tilt for r in wins])))
                    if wins
                    else float("nan")
                ),
                "mean_velocity_mps": (
                    float(np.mean([r.mean_velocity for r in wins])) if wins else float("nan")
                ),
            }
        )
    return rows


def results_csv(results) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=RUN_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in results:
        writer.writerow(r.as_row())
    return buf.getvalue()


def summary_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        out = dict(row)
        for key in ("success_rate", "mean_duration_s", "mean_max_tilt_deg", "mean_velocity_mps"):
            val = float(row[key])
            out[key] = "" if math.isnan(val) else f"{val:.4f}"
        writer.writerow(out)
    return buf.getvalue()


def profiles_csv(profiles) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(
        buf,
        fieldnames=("scene", "container", "mode", "repeat", "t", "tilt_rad"),
        lineterminator="\n",
    )
    writer.writeheader()
    for row in profiles:
        out = dict(row)
        out["t"] = f"{row['t']:.4f}"
        out["tilt_rad"] = f"{row['tilt_rad']:.6f}"
        writer.writerow(out)
    return buf.getvalue()


def summary_table(rows) -> str:
    """Fixed-width text table of the aggregate rows."""
    header = f"{'scene':<9}{'container':<11}{'mode':<11}{'succ':>9}{'dur s':>9}{'tilt deg':>10}{'vel m/s':>10}"
    lines = [header, "-" * len(header)]
    for row in rows:
        succ = f"{row['successes']}/{row['runs']}"
        dur = "-" if math.isnan(row["mean_duration_s"]) else f"{row['mean_duration_s']:.2f}"
        tilt = "-" if math.isnan(row["mean_max_tilt_deg"]) else f"{row['mean_max_tilt_deg']:.1f}"
        vel = "-" if math.isnan(row["mean_velocity_mps"]) else f"{row['mean_velocity_mps']:.3f}"
        lines.append(
            f"{row['scene']:<9}{row['container']:<11}{row['mode']:<11}{succ:>9}{dur:>9}{tilt:>10}{vel:>10}"
        )
    return "\n".join(lines) + "\n"


def gate_ablation(
    repeats: int = 20,
    *,
    seed: int = 0,
    max_iterations: int = 15000,
    limits: KinematicLimits = BENCH_LIMITS,
    params: SloshParams = SloshParams(),
    dt: float = 0.01,
    modes=("sfrrt", "sfrrt_u", "sfrrt_r"),
    progress=None,
):
    """Sampler and jerk-policy ablation on the gate scene.

    Goal biasing is disabled so the comparison isolates the samplers:
    biased draws can drag any tree through the slot regardless of how its
    orientations are distributed, which would mask the effect under test.
    Returns ``(results, summary_rows)``.
    """
    cfg = PlannerConfig(
        max_iterations=max_iterations, theta_cap=math.radians(45.0), goal_bias=0.0
    )
    results, _ = run_experiment(
        scenes=("gate",),
        containers={"gate_cup": GATE_CONTAINER},
        modes=modes,
        repeats=repeats,
        seed=seed,
        limits=limits,
        cfg=cfg,
        params=params,
        dt=dt,
        stop_on_first=True,
        progress=progress,
    )
    return results, aggregate(results)


def fill_speed_trend(
    scene_name: str = "empty",
    fills=(0.30, 0.50, 0.80),
    *,
    repeats: int = 5,
    seed: int = 0,
    limits: KinematicLimits = TREND_LIMITS,
    cfg: PlannerConfig = PlannerConfig(),
    params: SloshParams = TREND_PARAMS,
    dt: float = 0.01,
) -> list:
    """Mean executed velocity per fill level, on identical planned paths.

    The planner tilt cap is pinned to the fullest container's limit so
    every fill shares the same seeded path and the jerk search is the only
    thing that differs. The jerk bound a fuller container can carry is
    never larger, so mean velocity is non-increasing in fill.
    """
    if not fills or any(not 0.0 < f < 1.0 for f in fills):
        raise InvalidConfig("fills must be fractions strictly between 0 and 1")
    containers = {
        f: ContainerSpec(_R, _R, _H, fill_height_for_fraction(_R, _R, _H, f)) for f in fills
    }
    tightest = min(max_tilt_angle(c).theta_max for c in containers.values())
    scene = build_scene(scene_name)
    handle = OracleHandle(params)
    plan_cfg = replace(cfg, theta_cap=tightest)

    sums = {f: {"velocity": 0.0, "duration": 0.0, "jerk": 0.0} for f in fills}
    for repeat in range(repeats):
        run_cfg = replace(plan_cfg, seed=seed + repeat)
        ref = containers[max(fills)]
        path = prune(plan(scene, ref, run_cfg, stop_on_first=True), scene, ref, run_cfg)
        for f in fills:
            traj = sftp(path, limits, handle, containers[f], dt=dt)
            sums[f]["velocity"] += float(np.linalg.norm(traj.lin_vel, axis=1).mean())
            sums[f]["duration"] += traj.duration
            sums[f]["jerk"] += float(np.abs(traj.lin_jerk).max())
    return [
        {
            "fill": f,
            "theta_max_deg": float(np.degrees(max_tilt_angle(containers[f]).theta_max)),
            "mean_velocity_mps": sums[f]["velocity"] / repeats,
            "mean_duration_s": sums[f]["duration"] / repeats,
            "mean_peak_jerk": sums[f]["jerk"] / repeats,
        }
        for f in sorted(fills)
    ]
