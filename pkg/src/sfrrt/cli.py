"""Command-line interface.

Subcommands cover the full pipeline: container tilt queries, spill-free
planning, trajectory labeling, dataset generation, classifier evaluation,
and the benchmark/ablation harness. Every run is deterministic for a
given flag set and seed. Verbosity is controlled by the SFRRT_LOG
environment variable (standard logging level names).

Exit codes: 0 success, 2 invalid input, 3 no path found, 4 no spill-free
trajectory at any jerk bound.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys

import numpy as np

from sfrrt.assets import resolve_container, resolve_scene
from sfrrt.container import max_tilt_angle
from sfrrt.dataset import DATASET_BOUNDS, generate_dataset, read_dataset, write_dataset
from sfrrt.errors import (
    InvalidConfig,
    NoPathFound,
    NoSpillFreeTrajectory,
    SfrrtError,
)
from sfrrt.experiment import (
    BENCH_LIMITS,
    EXPERIMENT_CONTAINERS,
    EXPERIMENT_SCENES,
    MODES,
    aggregate,
    fill_speed_trend,
    gate_ablation,
    profiles_csv,
    results_csv,
    run_experiment,
    summary_csv,
    summary_table,
)
from sfrrt.planner import PlannerConfig, plan, prune
from sfrrt.sampling import SamplerMode
from sfrrt.sfc import forward, load_weights
from sfrrt.spill import (
    LearnedHandle,
    OracleHandle,
    RandomHandle,
    SloshParams,
    oracle_label,
    sftp,
)
from sfrrt.timeparam import KinematicLimits
from sfrrt.trajectory import Trajectory
from sfrrt.validate import validate_trajectory

log = logging.getLogger("sfrrt")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NO_PATH = 3
EXIT_NO_SPILL_FREE = 4


def _setup_logging() -> None:
    name = os.environ.get("SFRRT_LOG", "WARNING").upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _load_limits(path: str | None) -> KinematicLimits:
    if path is None:
        return BENCH_LIMITS
    with open(path) as f:
        data = json.load(f)
    try:
        return KinematicLimits(
            v_max=float(data["v_max"]),
            a_max=float(data["a_max"]),
            j_max=float(data["j_max"]),
            omega_max=float(data["omega_max"]),
            alpha_max=float(data["alpha_max"]),
            zeta_max=float(data["zeta_max"]),
        )
    except KeyError as e:
        raise InvalidConfig(f"limits file {path} missing key {e}") from e


def _classifier(policy: str, weights: str | None, seed: int):
    if policy == "oracle":
        return OracleHandle()
    if policy == "random":
        return RandomHandle(seed)
    if policy == "sfc":
        if weights is None:
            raise InvalidConfig("--jerk-policy sfc requires --weights")
        return LearnedHandle(load_weights(weights), bounds=DATASET_BOUNDS)
    raise InvalidConfig(f"unknown jerk policy {policy!r}")


def _write_path_csv(path, fname: str) -> None:
    with open(fname, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["x", "y", "z", "qw", "qx", "qy", "qz"])
        for pose in path.poses:
            writer.writerow(
                [f"{v:.12g}" for v in (*pose.position, *pose.orientation)]
            )


def cmd_tiltangle(args) -> int:
    spec = resolve_container(args.container)
    result = max_tilt_angle(spec)
    print(f"theta_max_deg={math.degrees(result.theta_max):.6f}")
    print(f"theta_max_rad={result.theta_max:.9f}")
    print(f"case={result.case.name.lower()}")
    return EXIT_OK


def cmd_plan(args) -> int:
    scene = resolve_scene(args.scene)
    container = resolve_container(args.container)
    limits = _load_limits(args.limits)
    cap = math.radians(args.tilt_cap) if args.tilt_cap is not None else None
    cfg = PlannerConfig(
        max_iterations=args.iters,
        theta_cap=cap,
        seed=args.seed,
        sampler_mode=SamplerMode(args.sampler),
    )
    handle = _classifier(args.jerk_policy, args.weights, args.seed)

    def progress(it, cost):
        log.info("iteration %d: best path cost %.4f", it, cost)

    path = plan(scene, container, cfg, stop_on_first=args.first, progress=progress)
    path = prune(path, scene, container, cfg)
    log.info("path with %d waypoints, cost %.4f", len(path.poses), path.cost)
    traj = sftp(path, limits, handle, container, dt=args.dt)

    verdict = oracle_label(traj, container, SloshParams())
    report = validate_trajectory(
        traj, scene, container, limits=limits, theta_cap=cfg.theta_cap
    )
    if verdict.spilled or not report.ok:
        problems = list(report.violations)
        if verdict.spilled:
            problems.insert(0, f"oracle margin {verdict.margin:.4f} rad")
        raise SfrrtError("refusing to emit a trajectory that fails re-validation: " + "; ".join(problems))

    traj.to_csv(args.out)
    if args.path_out is not None:
        _write_path_csv(path, args.path_out)
    print(
        f"wrote {args.out}: duration {traj.duration:.3f} s, "
        f"{len(traj.positions)} samples, oracle margin {verdict.margin:.4f} rad"
    )
    return EXIT_OK


def cmd_label(args) -> int:
    traj = Trajectory.from_csv(args.traj)
    container = resolve_container(args.container)
    if args.backend == "oracle":
        verdict = oracle_label(traj, container, SloshParams())
    else:
        if args.weights is None:
            raise InvalidConfig("--backend model requires --weights")
        handle = LearnedHandle(load_weights(args.weights), bounds=DATASET_BOUNDS)
        verdict = handle.label(traj, container)
    print(f"spilled={str(verdict.spilled).lower()}")
    print(f"margin={verdict.margin:.9f}")
    if verdict.first_violation_time is not None:
        print(f"first_violation_time={verdict.first_violation_time:.4f}")
    return EXIT_OK


def cmd_dataset(args) -> int:
    containers = None
    if args.containers:
        containers = [resolve_container(c) for c in args.containers.split(",")]

    def progress(done, total):
        if done % max(total // 10, 1) == 0:
            log.info("dataset: %d/%d records", done, total)

    ds = generate_dataset(
        args.n,
        seed=args.seed,
        containers=containers,
        planner_pool=args.planner_pool,
        progress=progress,
    )
    write_dataset(ds, args.out)
    print(
        f"wrote {args.out}: {len(ds)} records, "
        f"spill fraction {ds.spill_fraction:.3f}"
    )
    return EXIT_OK


def cmd_eval(args) -> int:
    ds = read_dataset(args.dataset)
    if len(ds) == 0:
        raise InvalidConfig(f"dataset {args.dataset} holds no records")
    actual = ds.labels == 1
    if args.backend == "model":
        if args.weights is None:
            raise InvalidConfig("--backend model requires --weights")
        model = load_weights(args.weights)
        probs = np.array(
            [forward(model, ds.record(i).encoded) for i in range(len(ds))]
        )
        predicted = probs > 0.5
    elif args.backend == "margin":
        # stored oracle margins: a perfect reference predictor used to
        # sanity-check the metric plumbing
        predicted = ds.margins < 0.0
    else:
        predicted = np.random.default_rng(args.seed).uniform(size=len(ds)) < 0.5

    tp = int(np.sum(predicted & actual))
    tn = int(np.sum(~predicted & ~actual))
    fp = int(np.sum(predicted & ~actual))
    fn = int(np.sum(~predicted & actual))
    accuracy = (tp + tn) / len(ds)
    fn_rate = fn / max(tp + fn, 1)
    print(f"records={len(ds)}")
    print(f"accuracy={accuracy:.4f}")
    print("confusion matrix (rows: actual spill/safe, cols: predicted spill/safe):")
    print(f"  spill: tp={tp} fn={fn}")
    print(f"  safe:  fp={fp} tn={tn}")
    print(f"false_negative_rate={fn_rate:.4f}")
    return EXIT_OK


def _write(fname: str, text: str) -> None:
    with open(fname, "w") as f:
        f.write(text)
    log.info("wrote %s", fname)


def cmd_experiment(args) -> int:
    out = args.out or "."
    os.makedirs(out, exist_ok=True)

    if args.preset == "gate-ablation":
        results, rows = gate_ablation(repeats=args.repeats, seed=args.seed)
        _write(os.path.join(out, "runs.csv"), results_csv(results))
        _write(os.path.join(out, "summary.csv"), summary_csv(rows))
        print(summary_table(rows))
        return EXIT_OK

    if args.preset == "fill-speed":
        rows = fill_speed_trend(repeats=args.repeats, seed=args.seed)
        fname = os.path.join(out, "fill_speed.csv")
        with open(fname, "w", newline="") as f:
            writer = csv.DictWriter(
                f,
                fieldnames=(
                    "fill",
                    "theta_max_deg",
                    "mean_velocity_mps",
                    "mean_duration_s",
                    "mean_peak_jerk",
                ),
                lineterminator="\n",
            )
            writer.writeheader()
            for row in rows:
                writer.writerow({k: f"{v:.6f}" for k, v in row.items()})
        log.info("wrote %s", fname)
        for row in rows:
            print(
                f"fill {row['fill']:.0%}: mean velocity {row['mean_velocity_mps']:.4f} m/s, "
                f"duration {row['mean_duration_s']:.3f} s"
            )
        return EXIT_OK

    scenes = tuple(args.scenes.split(",")) if args.scenes else EXPERIMENT_SCENES
    if args.containers:
        containers = {name: resolve_container(name) for name in args.containers.split(",")}
    else:
        containers = EXPERIMENT_CONTAINERS
    modes = tuple(args.modes.split(",")) if args.modes else ("sfrrt",)
    limits = _load_limits(args.limits)
    cfg = PlannerConfig(max_iterations=args.iters)
    handle = None
    if args.weights is not None:
        handle = LearnedHandle(load_weights(args.weights), bounds=DATASET_BOUNDS)

    def progress(done, total):
        log.info("experiment: %d/%d runs", done, total)

    results, profiles = run_experiment(
        scenes,
        containers,
        modes,
        args.repeats,
        seed=args.seed,
        limits=limits,
        cfg=cfg,
        handle=handle,
        dt=args.dt,
        collect_profiles=args.profiles,
        progress=progress,
    )
    rows = aggregate(results)
    _write(os.path.join(out, "runs.csv"), results_csv(results))
    _write(os.path.join(out, "summary.csv"), summary_csv(rows))
    if args.profiles:
        _write(os.path.join(out, "tilt_profiles.csv"), profiles_csv(profiles))
    print(summary_table(rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sfrrt",
        description="Spill-free motion planning for liquid-filled containers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tiltangle", help="maximum safe tilt of a container")
    p.add_argument("--container", required=True, help="asset name or JSON file")
    p.set_defaults(func=cmd_tiltangle)

    p = sub.add_parser("plan", help="plan a spill-free trajectory")
    p.add_argument("--scene", required=True, help="scene name or JSON file")
    p.add_argument("--container", required=True, help="asset name or JSON file")
    p.add_argument("--out", default="traj.csv", help="trajectory CSV output")
    p.add_argument("--path-out", default=None, help="pruned waypoint CSV output")
    p.add_argument("--sampler", choices=("informed", "uniform"), default="informed")
    p.add_argument("--tilt-cap", type=float, default=None, metavar="DEG")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=5000)
    p.add_argument("--first", action="store_true", help="stop at the first solution")
    p.add_argument(
        "--jerk-policy", choices=("oracle", "sfc", "random"), default="oracle"
    )
    p.add_argument("--weights", default=None, help="SFCW weights for --jerk-policy sfc")
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--limits", default=None, metavar="FILE", help="kinematic limits JSON")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("label", help="classify a trajectory CSV")
    p.add_argument("--traj", required=True, help="trajectory CSV")
    p.add_argument("--container", required=True)
    p.add_argument("--backend", choices=("oracle", "model"), default="oracle")
    p.add_argument("--weights", default=None, help="SFCW weights for --backend model")
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("dataset", help="generate an oracle-labeled dataset")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default="dataset.sfcd")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--containers", default=None, help="comma-separated names/files")
    p.add_argument("--planner-pool", type=int, default=4)
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("eval", help="evaluate a classifier on a dataset")
    p.add_argument("--dataset", required=True, help="SFCD dataset file")
    p.add_argument("--backend", choices=("model", "margin", "random"), default="model")
    p.add_argument("--weights", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("experiment", help="benchmark and ablation harness")
    p.add_argument("--preset", choices=("gate-ablation", "fill-speed"), default=None)
    p.add_argument("--scenes", default=None, help="comma-separated scene names")
    p.add_argument("--containers", default=None, help="comma-separated container names")
    p.add_argument("--modes", default=None, help=f"comma-separated from {MODES}")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=2000)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--limits", default=None, metavar="FILE")
    p.add_argument("--weights", default=None, help="SFCW weights for the sfc jerk policy")
    p.add_argument("--profiles", action="store_true", help="emit tilt-over-time CSV")
    p.add_argument("--out", default=".", help="output directory for CSV files")
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NoPathFound as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NO_PATH
    except NoSpillFreeTrajectory as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NO_SPILL_FREE
    except (SfrrtError, OSError, json.JSONDecodeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
