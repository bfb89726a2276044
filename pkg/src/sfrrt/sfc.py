"""Trajectory encoding and from-scratch transformer inference for the
spill classifier, plus the weight file format shared with the trainer.

The network is a pre-norm transformer encoder over a fixed-length token
sequence (one token per resampled trajectory step), mean-pooled, then a
two-layer ReLU head over the pooled vector concatenated with the container
properties, ending in a sigmoid. Positional information comes from an
additive table stored with the weights (sinusoidal unless a trainer
overrode it); attention and embedding projections carry no biases, the
feed-forward blocks, layer norms, and head do. Weights are float32;
arithmetic runs in float64 so inference is deterministic across platforms.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from sfrrt.container import ContainerSpec
from sfrrt.errors import (
    BadMagic,
    EmptyTrajectory,
    EncodingError,
    ShapeMismatch,
    TruncatedFile,
    VersionUnsupported,
)
from sfrrt.se3 import quat_canonical, slerp
from sfrrt.trajectory import Trajectory

MAGIC = b"SFCW"
FORMAT_VERSION = 1
SEQ_LEN = 100
_LN_EPS = 1e-5

# Metadata integers, in serialization order.
_META_FIELDS = (
    "d_model",
    "n_heads",
    "n_layers",
    "seq_len",
    "n_props",
    "in_dim",
    "ff_hidden",
    "head_hidden",
)


def sinusoidal_table(seq_len: int, d_model: int) -> np.ndarray:
    """Classic fixed sin/cos positional encodings, float32 (seq_len, d_model)."""
    pos = np.arange(seq_len, dtype=np.float64)[:, None]
    i = np.arange(d_model, dtype=np.float64)[None, :]
    angle = pos / np.power(10000.0, (i // 2) * 2.0 / d_model)
    table = np.where(i % 2 == 0, np.sin(angle), np.cos(angle))
    return table.astype(np.float32)


def _tensor_shapes(
    d_model: int, n_heads: int, n_layers: int, seq_len: int, n_props: int,
    in_dim: int, ff_hidden: int, head_hidden: int,
) -> dict:
    shapes = {
        "embed.weight": (in_dim, d_model),
        "pos.table": (seq_len, d_model),
        "head.w1": (d_model + n_props, head_hidden),
        "head.b1": (head_hidden,),
        "head.w2": (head_hidden, 1),
        "head.b2": (1,),
    }
    for i in range(n_layers):
        p = f"layers.{i}."
        shapes[p + "attn.wq"] = (d_model, d_model)
        shapes[p + "attn.wk"] = (d_model, d_model)
        shapes[p + "attn.wv"] = (d_model, d_model)
        shapes[p + "attn.wo"] = (d_model, d_model)
        shapes[p + "ff.w1"] = (d_model, ff_hidden)
        shapes[p + "ff.b1"] = (ff_hidden,)
        shapes[p + "ff.w2"] = (ff_hidden, d_model)
        shapes[p + "ff.b2"] = (d_model,)
        shapes[p + "ln1.gain"] = (d_model,)
        shapes[p + "ln1.bias"] = (d_model,)
        shapes[p + "ln2.gain"] = (d_model,)
        shapes[p + "ln2.bias"] = (d_model,)
    return shapes


@dataclass
class SfcModel:
    """Architecture metadata plus a flat name -> float32 tensor table."""

    d_model: int = 32
    n_heads: int = 2
    n_layers: int = 2
    seq_len: int = SEQ_LEN
    n_props: int = 4
    in_dim: int = 8
    ff_hidden: int = 64
    head_hidden: int = 64
    tensors: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in _META_FIELDS:
            v = getattr(self, name)
            if not (isinstance(v, (int, np.integer)) and v > 0):
                raise ShapeMismatch(f"{name} must be a positive integer, got {v!r}")
            setattr(self, name, int(v))
        if self.d_model % self.n_heads != 0:
            raise ShapeMismatch(
                f"d_model {self.d_model} not divisible by n_heads {self.n_heads}"
            )
        expected = self.expected_shapes()
        unknown = set(self.tensors) - set(expected)
        if unknown:
            raise ShapeMismatch(f"unexpected tensors {sorted(unknown)}")
        missing = set(expected) - set(self.tensors)
        if missing:
            raise TruncatedFile(f"missing tensors {sorted(missing)}")
        fixed = {}
        for name, shape in expected.items():
            t = np.ascontiguousarray(self.tensors[name], dtype=np.float32)
            if t.shape != shape:
                raise ShapeMismatch(f"{name} has shape {t.shape}, expected {shape}")
            if not np.all(np.isfinite(t)):
                raise ShapeMismatch(f"{name} contains NaN or infinity")
            fixed[name] = t
        self.tensors = fixed

    def expected_shapes(self) -> dict:
        return _tensor_shapes(*(getattr(self, n) for n in _META_FIELDS))

    @classmethod
    def initialized(cls, seed: int = 0, **dims) -> "SfcModel":
        """Model with scaled-normal weights, zero biases, unit layer-norm
        gains, and the sinusoidal positional table. Used for tests and as
        the training starting point."""
        meta = {n: getattr(cls, n) for n in _META_FIELDS}
        meta.update(dims)
        rng = np.random.default_rng(seed)
        tensors = {}
        for name, shape in _tensor_shapes(*(meta[n] for n in _META_FIELDS)).items():
            if name == "pos.table":
                tensors[name] = sinusoidal_table(meta["seq_len"], meta["d_model"])
            elif name.endswith((".bias", ".b1", ".b2")):
                tensors[name] = np.zeros(shape, dtype=np.float32)
            elif name.endswith(".gain"):
                tensors[name] = np.ones(shape, dtype=np.float32)
            else:
                scale = 1.0 / math.sqrt(shape[0])
                tensors[name] = rng.normal(0.0, scale, shape).astype(np.float32)
        return cls(**meta, tensors=tensors)

    def __eq__(self, other):
        if not isinstance(other, SfcModel):
            return NotImplemented
        if any(getattr(self, n) != getattr(other, n) for n in _META_FIELDS):
            return False
        return set(self.tensors) == set(other.tensors) and all(
            np.array_equal(self.tensors[k], other.tensors[k]) for k in self.tensors
        )


@dataclass(frozen=True)
class EncodedTrajectory:
    """Fixed-length token matrix plus container property vector.

    Token columns: normalized position (3), canonical-sign unit quaternion
    (4), resampling interval in seconds (1, constant). Properties:
    [r_b, r_u, h_c, h_w] in meters.
    """

    tokens: np.ndarray
    props: np.ndarray

    def __post_init__(self):
        tok = np.asarray(self.tokens, dtype=float)
        props = np.asarray(self.props, dtype=float)
        if tok.ndim != 2 or tok.shape[1] != 8:
            raise ShapeMismatch(f"tokens must be (N, 8), got {tok.shape}")
        if props.shape != (4,):
            raise ShapeMismatch(f"props must be (4,), got {props.shape}")
        if not (np.all(np.isfinite(tok)) and np.all(np.isfinite(props))):
            raise EncodingError("encoded trajectory contains NaN or infinity")
        # tolerance admits float32 round-tripped rows (dataset records)
        if np.any(np.abs(np.linalg.norm(tok[:, 3:7], axis=1) - 1.0) > 1e-6):
            raise EncodingError("quaternion token columns must be unit norm")
        object.__setattr__(self, "tokens", tok)
        object.__setattr__(self, "props", props)


def encode(
    traj: Trajectory, container: ContainerSpec, bounds, n_steps: int = SEQ_LEN
) -> EncodedTrajectory:
    """Resample a trajectory to a fixed-length classifier input.

    Uniform-in-time resampling to ``n_steps`` rows: positions interpolate
    linearly and are normalized to [-1, 1] by the workspace bounds,
    orientations follow the geodesic between bracketing samples, and the
    last column holds the constant resampling interval duration/(n-1).

    Raises:
        EmptyTrajectory: no samples.
        EncodingError: degenerate bounds or non-finite result.
    """
    if len(traj) == 0:
        raise EmptyTrajectory("cannot encode an empty trajectory")
    if n_steps < 2:
        raise EncodingError(f"need at least two resampled steps, got {n_steps}")
    b = np.asarray(bounds, dtype=float).reshape(2, 3)
    span = b[1] - b[0]
    if not (np.all(np.isfinite(b)) and np.all(span > 0)):
        raise EncodingError(f"workspace bounds must be finite with lo < hi, got {b}")

    t_src = traj.times
    t_tgt = np.linspace(0.0, traj.duration, n_steps)
    pos = np.column_stack(
        [np.interp(t_tgt, t_src, traj.positions[:, k]) for k in range(3)]
    )

    if len(traj) == 1:
        quats = np.tile(traj.orientations[0], (n_steps, 1))
    else:
        hi = np.clip(np.searchsorted(t_src, t_tgt, side="right"), 1, len(traj) - 1)
        lo = hi - 1
        gap = t_src[hi] - t_src[lo]
        s = (t_tgt - t_src[lo]) / np.where(gap <= 0, 1.0, gap)
        quats = slerp(traj.orientations[lo], traj.orientations[hi], np.clip(s, 0.0, 1.0))
    quats = quat_canonical(quats)

    pos_n = 2.0 * (pos - b[0]) / span - 1.0
    dt_col = np.full(n_steps, traj.duration / (n_steps - 1))
    tokens = np.column_stack([pos_n, quats, dt_col])
    props = np.array([container.r_b, container.r_u, container.h_c, container.h_w])
    return EncodedTrajectory(tokens=tokens, props=props)


def _layer_norm(z: np.ndarray, gain: np.ndarray, bias: np.ndarray) -> np.ndarray:
    mean = z.mean(axis=-1, keepdims=True)
    var = z.var(axis=-1, keepdims=True)
    return (z - mean) / np.sqrt(var + _LN_EPS) * gain + bias


def _softmax_rows(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _forward(m: SfcModel, x: EncodedTrajectory, collect):
    if not isinstance(x, EncodedTrajectory):
        raise ShapeMismatch(f"expected an EncodedTrajectory, got {type(x).__name__}")
    if x.tokens.shape[0] != m.seq_len:
        raise ShapeMismatch(
            f"model expects {m.seq_len} tokens, encoding has {x.tokens.shape[0]}"
        )
    if x.tokens.shape[1] != m.in_dim or x.props.shape[0] != m.n_props:
        raise ShapeMismatch(
            f"model expects token width {m.in_dim} and {m.n_props} properties, "
            f"got {x.tokens.shape[1]} and {x.props.shape[0]}"
        )
    t = {k: v.astype(np.float64) for k, v in m.tensors.items()}
    d_head = m.d_model // m.n_heads

    h = x.tokens @ t["embed.weight"] + t["pos.table"]
    for i in range(m.n_layers):
        p = f"layers.{i}."
        z = _layer_norm(h, t[p + "ln1.gain"], t[p + "ln1.bias"])
        q = (z @ t[p + "attn.wq"]).reshape(m.seq_len, m.n_heads, d_head).swapaxes(0, 1)
        k = (z @ t[p + "attn.wk"]).reshape(m.seq_len, m.n_heads, d_head).swapaxes(0, 1)
        v = (z @ t[p + "attn.wv"]).reshape(m.seq_len, m.n_heads, d_head).swapaxes(0, 1)
        attn = _softmax_rows(q @ k.swapaxes(1, 2) / math.sqrt(d_head))
        if collect is not None:
            collect.append(attn)
        mixed = (attn @ v).swapaxes(0, 1).reshape(m.seq_len, m.d_model)
        h = h + mixed @ t[p + "attn.wo"]
        z = _layer_norm(h, t[p + "ln2.gain"], t[p + "ln2.bias"])
        h = h + np.maximum(z @ t[p + "ff.w1"] + t[p + "ff.b1"], 0.0) @ t[p + "ff.w2"] + t[p + "ff.b2"]

    feat = np.concatenate([h.mean(axis=0), x.props])
    hidden = np.maximum(feat @ t["head.w1"] + t["head.b1"], 0.0)
    logit = float((hidden @ t["head.w2"])[0] + t["head.b2"][0])
    return float(expit(logit))


def forward(m: SfcModel, x: EncodedTrajectory) -> float:
    """Spill probability in (0, 1) for one encoded trajectory.

    Raises:
        ShapeMismatch: encoding does not fit the model architecture.
    """
    return _forward(m, x, None)


def forward_instrumented(m: SfcModel, x: EncodedTrajectory):
    """Like :func:`forward` but also returns the per-layer attention maps,
    each (n_heads, seq_len, seq_len) with rows summing to one."""
    maps = []
    prob = _forward(m, x, maps)
    return prob, maps


def spill_margin(prob: float) -> float:
    """Signed safety margin from a spill probability: positive means the
    classifier calls the trajectory spill-free at the 0.5 threshold."""
    p = min(max(float(prob), 1e-12), 1.0 - 1e-12)
    return math.log((1.0 - p) / p)


def _read_exact(f, n: int, what: str) -> bytes:
    data = f.read(n)
    if len(data) != n:
        raise TruncatedFile(f"file ended while reading {what}")
    return data


def _read_u32(f, what: str) -> int:
    return int.from_bytes(_read_exact(f, 4, what), "little")


def save_weights(m: SfcModel, path) -> None:
    """Write the model in the shared binary format (see load_weights)."""
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(FORMAT_VERSION.to_bytes(4, "little"))
    meta = "\n".join(f"{name}={getattr(m, name)}" for name in _META_FIELDS).encode()
    buf.write(len(meta).to_bytes(4, "little"))
    buf.write(meta)
    buf.write(len(m.tensors).to_bytes(4, "little"))
    for name in sorted(m.tensors):
        nb = name.encode()
        t = m.tensors[name]
        buf.write(len(nb).to_bytes(4, "little"))
        buf.write(nb)
        buf.write(t.ndim.to_bytes(4, "little"))
        for d in t.shape:
            buf.write(int(d).to_bytes(4, "little"))
        buf.write(np.ascontiguousarray(t, dtype="<f4").tobytes())
    with open(path, "wb") as f:
        f.write(buf.getvalue())


def load_weights(path) -> SfcModel:
    """Read a model written by :func:`save_weights` or the trainer.

    Layout, all integers little-endian u32: magic "SFCW", format version,
    metadata byte length, metadata (UTF-8 ``name=value`` lines), tensor
    count, then per tensor {name length, name, rank, dims, row-major
    float32 data}.

    Raises:
        BadMagic, VersionUnsupported, TruncatedFile, ShapeMismatch.
    """
    with open(path, "rb") as f:
        if _read_exact(f, 4, "magic") != MAGIC:
            raise BadMagic(f"{path} is not a classifier weight file")
        version = _read_u32(f, "version")
        if version != FORMAT_VERSION:
            raise VersionUnsupported(f"format version {version}, supported: {FORMAT_VERSION}")
        meta_raw = _read_exact(f, _read_u32(f, "metadata length"), "metadata")
        meta = {}
        for line in meta_raw.decode().splitlines():
            if line.strip():
                name, _, val = line.partition("=")
                meta[name.strip()] = int(val)
        missing = [n for n in _META_FIELDS if n not in meta]
        if missing:
            raise ShapeMismatch(f"metadata missing fields {missing}")

        tensors = {}
        for _ in range(_read_u32(f, "tensor count")):
            name = _read_exact(f, _read_u32(f, "tensor name length"), "tensor name").decode()
            rank = _read_u32(f, "tensor rank")
            dims = tuple(_read_u32(f, f"{name} dim") for _ in range(rank))
            count = int(np.prod(dims, dtype=np.int64)) if dims else 1
            raw = _read_exact(f, 4 * count, f"{name} data")
            tensors[name] = np.frombuffer(raw, dtype="<f4").reshape(dims)
        if f.read(1):
            raise ShapeMismatch(f"{path} has trailing bytes after the last tensor")
    return SfcModel(**{n: meta[n] for n in _META_FIELDS}, tensors=tensors)
