"""Reader for the shared binary trajectory-classification dataset format.

Layout, little-endian: magic ``SFCD``, record count u32, then fixed-size
records of a 100x8 float32 token matrix (normalized position, unit
quaternion, resample interval), 4 container property floats (r_b, r_u,
h_c, h_w in meters), one label byte (1 = spilled) and a float32 margin.
"""

from dataclasses import dataclass

import numpy as np

MAGIC = b"SFCD"
SEQ_LEN = 100
TOKEN_DIM = 8
N_PROPS = 4

RECORD_DTYPE = np.dtype(
    [
        ("tokens", "<f4", (SEQ_LEN, TOKEN_DIM)),
        ("props", "<f4", (N_PROPS,)),
        ("label", "u1"),
        ("margin", "<f4"),
    ]
)


class DatasetFormatError(ValueError):
    """Raised when a dataset file does not match the shared format."""


@dataclass(frozen=True)
class TrajectoryDataset:
    """In-memory dataset columns, ready to feed a training loop."""

    tokens: np.ndarray
    props: np.ndarray
    labels: np.ndarray
    margins: np.ndarray

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def spill_fraction(self) -> float:
        return float(self.labels.mean()) if len(self.labels) else 0.0


def read_dataset(path) -> TrajectoryDataset:
    """Load a dataset file, validating magic, count and exact size.

    Raises:
        DatasetFormatError: wrong magic, truncated data or trailing bytes.
    """
    with open(path, "rb") as f:
        blob = f.read()
    if blob[:4] != MAGIC:
        raise DatasetFormatError(f"{path} is not a trajectory dataset file")
    count = int.from_bytes(blob[4:8], "little")
    expected = 8 + count * RECORD_DTYPE.itemsize
    if len(blob) != expected:
        raise DatasetFormatError(
            f"{path} holds {len(blob)} bytes, expected {expected} for {count} records"
        )
    records = np.frombuffer(blob, dtype=RECORD_DTYPE, count=count, offset=8)
    labels = records["label"]
    if np.any(labels > 1):
        raise DatasetFormatError("labels must be 0 or 1")
    return TrajectoryDataset(
        tokens=np.ascontiguousarray(records["tokens"]),
        props=np.ascontiguousarray(records["props"]),
        labels=labels.astype(np.int64),
        margins=np.ascontiguousarray(records["margin"]),
    )
