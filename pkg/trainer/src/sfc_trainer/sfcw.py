"""Shared binary weight file format, writer and reader.

Layout, all integers little-endian u32: magic ``SFCW``, format version,
metadata byte length, metadata (UTF-8 ``name=value`` lines), tensor
count, then per tensor {name length, name bytes, rank, dims, row-major
float32 data}. Tensors are written in sorted-name order so identical
models serialize to identical bytes.
"""

import io

import numpy as np

from sfc_trainer.model import META_FIELDS

MAGIC = b"SFCW"
FORMAT_VERSION = 1


class WeightFormatError(ValueError):
    """Raised when a weight file does not match the shared format."""


def write_weights(meta: dict, tensors: dict, path) -> None:
    missing = [n for n in META_FIELDS if n not in meta]
    if missing:
        raise WeightFormatError(f"metadata missing fields {missing}")
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(FORMAT_VERSION.to_bytes(4, "little"))
    text = "\n".join(f"{name}={int(meta[name])}" for name in META_FIELDS).encode()
    buf.write(len(text).to_bytes(4, "little"))
    buf.write(text)
    buf.write(len(tensors).to_bytes(4, "little"))
    for name in sorted(tensors):
        t = np.ascontiguousarray(tensors[name], dtype="<f4")
        if not np.all(np.isfinite(t)):
            raise WeightFormatError(f"tensor {name} contains NaN or infinity")
        nb = name.encode()
        buf.write(len(nb).to_bytes(4, "little"))
        buf.write(nb)
        buf.write(t.ndim.to_bytes(4, "little"))
        for d in t.shape:
            buf.write(int(d).to_bytes(4, "little"))
        buf.write(t.tobytes())
    with open(path, "wb") as f:
        f.write(buf.getvalue())


def _read_exact(f, n: int, what: str) -> bytes:
    data = f.read(n)
    if len(data) != n:
        raise WeightFormatError(f"file ended while reading {what}")
    return data


def _read_u32(f, what: str) -> int:
    return int.from_bytes(_read_exact(f, 4, what), "little")


def read_weights(path):
    """Load (metadata dict, name -> float32 tensor dict) from a weight file."""
    with open(path, "rb") as f:
        if _read_exact(f, 4, "magic") != MAGIC:
            raise WeightFormatError(f"{path} is not a classifier weight file")
        version = _read_u32(f, "version")
        if version != FORMAT_VERSION:
            raise WeightFormatError(f"unsupported format version {version}")
        meta_raw = _read_exact(f, _read_u32(f, "metadata length"), "metadata")
        meta = {}
        for line in meta_raw.decode().splitlines():
            if line.strip():
                name, _, val = line.partition("=")
                meta[name.strip()] = int(val)
        missing = [n for n in META_FIELDS if n not in meta]
        if missing:
            raise WeightFormatError(f"metadata missing fields {missing}")
        tensors = {}
        for _ in range(_read_u32(f, "tensor count")):
            name = _read_exact(f, _read_u32(f, "name length"), "tensor name").decode()
            rank = _read_u32(f, "rank")
            dims = tuple(_read_u32(f, f"{name} dim") for _ in range(rank))
            count = int(np.prod(dims, dtype=np.int64)) if dims else 1
            raw = _read_exact(f, 4 * count, f"{name} data")
            tensors[name] = np.frombuffer(raw, dtype="<f4").reshape(dims).copy()
        if f.read(1):
            raise WeightFormatError(f"{path} has trailing bytes")
    return meta, tensors
