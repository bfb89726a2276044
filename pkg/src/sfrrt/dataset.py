"""Synthetic labeled-trajectory corpus for training the spill classifier.

Records pair a fixed-length trajectory encoding with an oracle verdict.
The generator mixes four motion families: straight transports, zig-zag
sweeps, tilt-and-hold motions (including past the spill limit and fully
inverted), and time parameterizations of actual planner paths, each over
randomized containers and kinematic limits. Class quotas keep the corpus
near 50/50 spilled vs safe.

File format "SFCD": 4-byte magic, record count u32, then packed records
{tokens 100x8 float32 row-major, properties 4 float32, label u8 (1 =
spilled), oracle margin float32}, all little-endian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sfrrt.container import ContainerSpec
from sfrrt.errors import BadMagic, InvalidConfig, TruncatedFile
from sfrrt.planner import PlannerConfig, plan, prune
from sfrrt.scenes import GATE_CONTAINER, SCENE_BUILDERS
from sfrrt.se3 import Pose, quat_from_axis_angle
from sfrrt.sfc import SEQ_LEN, EncodedTrajectory, encode
from sfrrt.spill import oracle_label
from sfrrt.timeparam import KinematicLimits, parameterize
from sfrrt.trajectory import constant_pose_trajectory

DATASET_MAGIC = b"SFCD"
# One workspace box for every encoding, covering all benchmark scenes, so
# a model trained on this corpus sees the same normalization at plan time.
DATASET_BOUNDS = np.array([[-0.25, -0.35, 0.0], [1.25, 0.35, 0.6]])

RECORD_DTYPE = np.dtype(
    [
        ("tokens", "<f4", (SEQ_LEN, 8)),
        ("props", "<f4", (4,)),
        ("label", "u1"),
        ("margin", "<f4"),
    ]
)


@dataclass(frozen=True)
class DatasetRecord:
    """One encoded trajectory with its oracle outcome."""

    encoded: EncodedTrajectory
    spilled: bool
    margin: float

    def __post_init__(self):
        if self.spilled != (self.margin < 0.0):
            raise InvalidConfig(
                f"label {self.spilled} inconsistent with margin {self.margin}"
            )


@dataclass
class Dataset:
    """Column-oriented record arrays; ``labels`` uses 1 for spilled."""

    tokens: np.ndarray
    props: np.ndarray
    labels: np.ndarray
    margins: np.ndarray

    def __post_init__(self):
        self.tokens = np.ascontiguousarray(self.tokens, dtype=np.float32)
        self.props = np.ascontiguousarray(self.props, dtype=np.float32)
        self.labels = np.ascontiguousarray(self.labels, dtype=np.uint8)
        self.margins = np.ascontiguousarray(self.margins, dtype=np.float32)
        n = self.tokens.shape[0]
        if self.tokens.ndim != 3 or self.tokens.shape[1:] != (SEQ_LEN, 8):
            raise InvalidConfig(f"tokens must be (n, {SEQ_LEN}, 8), got {self.tokens.shape}")
        if self.props.shape != (n, 4) or self.labels.shape != (n,) or self.margins.shape != (n,):
            raise InvalidConfig("dataset column lengths disagree")
        if not np.all((self.labels == 0) | (self.labels == 1)):
            raise InvalidConfig("labels must be 0 or 1")
        if np.any((self.margins < 0.0) != (self.labels == 1)):
            raise InvalidConfig("labels inconsistent with margin signs")

    def __len__(self) -> int:
        return self.tokens.shape[0]

    @property
    def spill_fraction(self) -> float:
        return float(self.labels.mean()) if len(self) else 0.0

    def record(self, i: int) -> DatasetRecord:
        return DatasetRecord(
            encoded=EncodedTrajectory(tokens=self.tokens[i], props=self.props[i]),
            spilled=bool(self.labels[i]),
            margin=float(self.margins[i]),
        )


def write_dataset(ds: Dataset, path) -> None:
    arr = np.empty(len(ds), dtype=RECORD_DTYPE)
    arr["tokens"] = ds.tokens
    arr["props"] = ds.props
    arr["label"] = ds.labels
    arr["margin"] = ds.margins
    with open(path, "wb") as f:
        f.write(DATASET_MAGIC)
        f.write(len(ds).to_bytes(4, "little"))
        f.write(arr.tobytes())


def read_dataset(path) -> Dataset:
    """Read an SFCD file.

    Raises:
        BadMagic: wrong magic bytes.
        TruncatedFile: size does not match the declared record count.
    """
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:4] != DATASET_MAGIC:
        raise BadMagic(f"{path} is not a dataset file")
    if len(raw) < 8:
        raise TruncatedFile(f"{path} ends inside the header")
    count = int.from_bytes(raw[4:8], "little")
    expected = 8 + count * RECORD_DTYPE.itemsize
    if len(raw) != expected:
        raise TruncatedFile(
            f"{path} holds {len(raw)} bytes, expected {expected} for {count} records"
        )
    arr = np.frombuffer(raw[8:], dtype=RECORD_DTYPE)
    return Dataset(
        tokens=arr["tokens"], props=arr["props"], labels=arr["label"], margins=arr["margin"]
    )


def _build_container(rng) -> ContainerSpec:
    r_b = float(rng.uniform(0.02, 0.055))
    r_u = float(r_b * rng.uniform(1.0, 1.6))
    h_c = float(rng.uniform(0.07, 0.16))
    h_w = float(rng.uniform(0.0, h_c))
    return ContainerSpec(r_b=r_b, r_u=r_u, h_c=h_c, h_w=h_w)


def _random_limits(rng) -> KinematicLimits:
    return KinematicLimits(
        v_max=float(rng.uniform(0.3, 1.5)),
        a_max=float(rng.uniform(1.0, 8.0)),
        j_max=float(2.0 ** rng.uniform(-1.0, 9.0)),
        omega_max=float(rng.uniform(0.8, 4.0)),
        alpha_max=float(rng.uniform(2.0, 16.0)),
        zeta_max=float(2.0 ** rng.uniform(0.0, 9.0)),
    )


def _random_point(rng) -> np.ndarray:
    lo = DATASET_BOUNDS[0] + [0.05, 0.05, 0.05]
    hi = DATASET_BOUNDS[1] - [0.05, 0.05, 0.05]
    return rng.uniform(lo, hi)


def _mild_tilt(rng) -> np.ndarray:
    phi = rng.uniform(0.0, 2.0 * np.pi)
    return quat_from_axis_angle([np.cos(phi), np.sin(phi), 0.0], rng.uniform(0.0, 0.35))


def _straight(rng):
    return [Pose(_random_point(rng), _mild_tilt(rng)), Pose(_random_point(rng), _mild_tilt(rng))]


def _zigzag(rng):
    start, goal = _random_point(rng), _random_point(rng)
    k = int(rng.integers(3, 7))
    poses = []
    for i in range(k):
        s = i / (k - 1)
        p = start + s * (goal - start)
        if 0 < i < k - 1:
            p = p + [0.0, (1 if i % 2 else -1) * rng.uniform(0.05, 0.25), rng.uniform(-0.05, 0.05)]
            p = np.clip(p, DATASET_BOUNDS[0] + 0.02, DATASET_BOUNDS[1] - 0.02)
        poses.append(Pose(p, _mild_tilt(rng)))
    return poses


def _tilt_hold(rng, container):
    # spans gentle tilts through fully inverted holds
    phi = rng.uniform(0.0, 2.0 * np.pi)
    angle = float(rng.uniform(0.0, np.pi))
    q = quat_from_axis_angle([np.cos(phi), np.sin(phi), 0.0], angle)
    pos = _random_point(rng)
    if rng.random() < 0.5:
        return constant_pose_trajectory(Pose(pos, q), float(rng.uniform(0.4, 2.0)))
    return [Pose(pos), Pose(pos, q)]


def _planner_pool(pool_size: int, seed: int):
    paths = []
    names = sorted(SCENE_BUILDERS)
    cfgs = {
        "empty": 400,
        "gate": 4000,
        "shelf": 1500,
        "clutter": 1500,
    }
    for i in range(pool_size):
        name = names[i % len(names)]
        scene = SCENE_BUILDERS[name]()
        cfg = PlannerConfig(max_iterations=cfgs[name], seed=seed + i)
        try:
            path = plan(scene, GATE_CONTAINER, cfg, stop_on_first=True)
            paths.append(tuple(prune(path, scene, GATE_CONTAINER, cfg).poses))
        except Exception:
            continue
    return paths


def generate_dataset(
    n: int, seed: int = 0, containers=None, planner_pool: int = 4, progress=None
) -> Dataset:
    """Build ``n`` oracle-labeled records, balanced to half spilled.

    Candidates are drawn from the motion families until each label quota
    (n // 2 spilled, the rest safe) fills; the output is deterministic for
    a given seed and arguments.

    Args:
        n: record count, > 0.
        seed: generator seed.
        containers: optional ContainerSpec pool; random specs otherwise.
        planner_pool: number of seeded planner paths mixed in (0 disables
            the planner family).
        progress: optional callable invoked as progress(done, total).
    """
    if not (isinstance(n, (int, np.integer)) and n > 0):
        raise InvalidConfig(f"record count must be a positive integer, got {n}")
    rng = np.random.default_rng(seed)
    pool = _planner_pool(planner_pool, seed) if planner_pool else []
    families = ["straight", "zigzag", "hold"] + (["planner"] if pool else [])
    weights = np.array([0.3, 0.25, 0.3, 0.15][: len(families)])
    weights = weights / weights.sum()

    quota = {True: n // 2, False: n - n // 2}
    cols = {"tokens": [], "props": [], "labels": [], "margins": []}
    draws, max_draws = 0, 200 * n + 1000
    while (quota[True] or quota[False]) and draws < max_draws:
        draws += 1
        container = (
            containers[int(rng.integers(len(containers)))] if containers else _build_container(rng)
        )
        family = families[int(rng.choice(len(families), p=weights))]
        if family == "straight":
            source = _straight(rng)
        elif family == "zigzag":
            source = _zigzag(rng)
        elif family == "hold":
            source = _tilt_hold(rng, container)
        else:
            source = list(pool[int(rng.integers(len(pool)))])

        if isinstance(source, list):
            try:
                traj = parameterize(source, _random_limits(rng), dt=0.01)
            except InvalidConfig:
                continue
        else:
            traj = source

        verdict = oracle_label(traj, container)
        if not quota[verdict.spilled]:
            continue
        quota[verdict.spilled] -= 1
        enc = encode(traj, container, DATASET_BOUNDS)
        cols["tokens"].append(enc.tokens.astype(np.float32))
        cols["props"].append(enc.props.astype(np.float32))
        cols["labels"].append(np.uint8(verdict.spilled))
        cols["margins"].append(np.float32(verdict.margin))
        if progress is not None:
            progress(n - quota[True] - quota[False], n)
    if quota[True] or quota[False]:
        raise InvalidConfig(
            f"generator stalled: {quota[True]} spilled and {quota[False]} safe records missing"
        )
    return Dataset(
        tokens=np.stack(cols["tokens"]),
        props=np.stack(cols["props"]),
        labels=np.array(cols["labels"]),
        margins=np.array(cols["margins"]),
    )
