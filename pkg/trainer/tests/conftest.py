import numpy as np
import pytest

from sfc_trainer.data import MAGIC, RECORD_DTYPE


def make_dataset(path, n: int, seed: int = 0) -> np.ndarray:
    """Write a synthetic dataset file; labels follow a learnable rule.

    A record is labeled spilled when its mean container tilt (derived from
    the quaternion columns) exceeds a per-record geometric budget, so the
    classes are separable from the stored features.
    """
    rng = np.random.default_rng(seed)
    records = np.zeros(n, dtype=RECORD_DTYPE)
    for i in range(n):
        pos = rng.uniform(-1.0, 1.0, (100, 3))
        angle = rng.uniform(0.0, 1.2) * np.ones(100) + rng.normal(0.0, 0.05, 100)
        quat = np.stack(
            [np.cos(angle / 2), np.sin(angle / 2), np.zeros(100), np.zeros(100)],
            axis=1,
        )
        quat /= np.linalg.norm(quat, axis=1, keepdims=True)
        tokens = np.column_stack([pos, quat, np.full(100, 0.05)])
        props = rng.uniform(0.01, 0.15, 4)
        margin = props[2] * 4.0 - abs(angle).mean()
        records[i]["tokens"] = tokens
        records[i]["props"] = props
        records[i]["label"] = 1 if margin < 0 else 0
        records[i]["margin"] = margin
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(int(n).to_bytes(4, "little"))
        f.write(records.tobytes())
    return records


@pytest.fixture
def toy_dataset(tmp_path):
    path = tmp_path / "toy.sfcd"
    make_dataset(path, 60, seed=1)
    return path
