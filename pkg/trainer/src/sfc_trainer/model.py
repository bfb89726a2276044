"""Reference transformer for the spill classifier, in PyTorch.

The architecture must stay in lockstep with the inference runtime: token
embedding without bias plus a fixed additive sinusoidal position table,
pre-norm encoder blocks (bias-free attention projections, biased
feed-forward and layer norms), no final layer norm, mean pooling over the
sequence, container properties concatenated before a biased two-layer
ReLU head. Weight matrices are kept in (in, out) orientation so the
exported tensors match the shared weight file layout directly.
"""

import math

import numpy as np
import torch
from torch import nn

DEFAULTS = {
    "d_model": 32,
    "n_heads": 2,
    "n_layers": 2,
    "seq_len": 100,
    "n_props": 4,
    "in_dim": 8,
    "ff_hidden": 64,
    "head_hidden": 64,
}

META_FIELDS = tuple(DEFAULTS)
LN_EPS = 1e-5


def sinusoidal_table(seq_len: int, d_model: int) -> np.ndarray:
    """Fixed sin/cos position encodings, float32 (seq_len, d_model)."""
    pos = np.arange(seq_len, dtype=np.float64)[:, None]
    i = np.arange(d_model, dtype=np.float64)[None, :]
    angle = pos / np.power(10000.0, (i // 2) * 2.0 / d_model)
    return np.where(i % 2 == 0, np.sin(angle), np.cos(angle)).astype(np.float32)


def _scaled_normal(gen: torch.Generator, shape) -> nn.Parameter:
    std = 1.0 / math.sqrt(shape[0])
    return nn.Parameter(torch.randn(shape, generator=gen) * std)


class EncoderBlock(nn.Module):
    def __init__(
        self, d_model: int, n_heads: int, ff_hidden: int, gen: torch.Generator,
        dropout: float = 0.0,
    ):
        super().__init__()
        self.n_heads = n_heads
        self.d_head = d_model // n_heads
        self.dropout = dropout
        self.wq = _scaled_normal(gen, (d_model, d_model))
        self.wk = _scaled_normal(gen, (d_model, d_model))
        self.wv = _scaled_normal(gen, (d_model, d_model))
        self.wo = _scaled_normal(gen, (d_model, d_model))
        self.ff_w1 = _scaled_normal(gen, (d_model, ff_hidden))
        self.ff_b1 = nn.Parameter(torch.zeros(ff_hidden))
        self.ff_w2 = _scaled_normal(gen, (ff_hidden, d_model))
        self.ff_b2 = nn.Parameter(torch.zeros(d_model))
        self.ln1_gain = nn.Parameter(torch.ones(d_model))
        self.ln1_bias = nn.Parameter(torch.zeros(d_model))
        self.ln2_gain = nn.Parameter(torch.ones(d_model))
        self.ln2_bias = nn.Parameter(torch.zeros(d_model))

    def forward(self, h: torch.Tensor) -> torch.Tensor:
        bsz, seq, d_model = h.shape
        z = torch.nn.functional.layer_norm(h, (d_model,), self.ln1_gain, self.ln1_bias, LN_EPS)
        q = (z @ self.wq).view(bsz, seq, self.n_heads, self.d_head).transpose(1, 2)
        k = (z @ self.wk).view(bsz, seq, self.n_heads, self.d_head).transpose(1, 2)
        v = (z @ self.wv).view(bsz, seq, self.n_heads, self.d_head).transpose(1, 2)
        attn = torch.softmax(q @ k.transpose(-2, -1) / math.sqrt(self.d_head), dim=-1)
        mixed = (attn @ v).transpose(1, 2).reshape(bsz, seq, d_model)
        h = h + torch.nn.functional.dropout(mixed @ self.wo, self.dropout, self.training)
        z = torch.nn.functional.layer_norm(h, (d_model,), self.ln2_gain, self.ln2_bias, LN_EPS)
        ff = torch.relu(z @ self.ff_w1 + self.ff_b1) @ self.ff_w2 + self.ff_b2
        return h + torch.nn.functional.dropout(ff, self.dropout, self.training)


class SfcNet(nn.Module):
    """Trainable spill classifier; forward returns logits.

    ``dropout`` regularizes training only (residual branches and head
    hidden layer); evaluation and the exported weights are unaffected, so
    inference parity with the runtime holds regardless of its value.
    """

    def __init__(self, seed: int = 0, dropout: float = 0.0, **dims):
        super().__init__()
        unknown = set(dims) - set(DEFAULTS)
        if unknown:
            raise ValueError(f"unknown architecture fields {sorted(unknown)}")
        if not 0.0 <= dropout < 1.0:
            raise ValueError(f"dropout must be in [0, 1), got {dropout!r}")
        self.dropout = dropout
        self.meta = {**DEFAULTS, **dims}
        for name, v in self.meta.items():
            if not (isinstance(v, int) and v > 0):
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if self.meta["d_model"] % self.meta["n_heads"] != 0:
            raise ValueError("d_model must divide evenly into heads")

        m = self.meta
        gen = torch.Generator().manual_seed(seed)
        self.embed = _scaled_normal(gen, (m["in_dim"], m["d_model"]))
        table = torch.from_numpy(sinusoidal_table(m["seq_len"], m["d_model"]).copy())
        self.register_buffer("pos_table", table)
        self.blocks = nn.ModuleList(
            EncoderBlock(m["d_model"], m["n_heads"], m["ff_hidden"], gen, dropout)
            for _ in range(m["n_layers"])
        )
        self.head_w1 = _scaled_normal(gen, (m["d_model"] + m["n_props"], m["head_hidden"]))
        self.head_b1 = nn.Parameter(torch.zeros(m["head_hidden"]))
        self.head_w2 = _scaled_normal(gen, (m["head_hidden"], 1))
        self.head_b2 = nn.Parameter(torch.zeros(1))

    def forward(self, tokens: torch.Tensor, props: torch.Tensor) -> torch.Tensor:
        h = tokens @ self.embed + self.pos_table
        for block in self.blocks:
            h = block(h)
        feat = torch.cat([h.mean(dim=1), props], dim=-1)
        hidden = torch.relu(feat @ self.head_w1 + self.head_b1)
        hidden = torch.nn.functional.dropout(hidden, self.dropout, self.training)
        return (hidden @ self.head_w2 + self.head_b2).squeeze(-1)

    def export_tensors(self) -> dict:
        """Name -> float32 numpy array, in the shared weight file naming."""
        out = {
            "embed.weight": self.embed,
            "pos.table": self.pos_table,
            "head.w1": self.head_w1,
            "head.b1": self.head_b1,
            "head.w2": self.head_w2,
            "head.b2": self.head_b2,
        }
        for i, blk in enumerate(self.blocks):
            p = f"layers.{i}."
            out[p + "attn.wq"] = blk.wq
            out[p + "attn.wk"] = blk.wk
            out[p + "attn.wv"] = blk.wv
            out[p + "attn.wo"] = blk.wo
            out[p + "ff.w1"] = blk.ff_w1
            out[p + "ff.b1"] = blk.ff_b1
            out[p + "ff.w2"] = blk.ff_w2
            out[p + "ff.b2"] = blk.ff_b2
            out[p + "ln1.gain"] = blk.ln1_gain
            out[p + "ln1.bias"] = blk.ln1_bias
            out[p + "ln2.gain"] = blk.ln2_gain
            out[p + "ln2.bias"] = blk.ln2_bias
        return {
            name: t.detach().cpu().numpy().astype(np.float32) for name, t in out.items()
        }

    @classmethod
    def from_tensors(cls, meta: dict, tensors: dict) -> "SfcNet":
        """Rebuild a net from weight-file metadata and tensor table."""
        net = cls(**{k: int(v) for k, v in meta.items()})
        mapping = net.export_tensors()
        missing = set(mapping) - set(tensors)
        extra = set(tensors) - set(mapping)
        if missing or extra:
            raise ValueError(f"tensor names mismatch: missing {sorted(missing)}, extra {sorted(extra)}")
        with torch.no_grad():
            net.embed.copy_(torch.from_numpy(tensors["embed.weight"].copy()))
            net.pos_table.copy_(torch.from_numpy(tensors["pos.table"].copy()))
            net.head_w1.copy_(torch.from_numpy(tensors["head.w1"].copy()))
            net.head_b1.copy_(torch.from_numpy(tensors["head.b1"].copy()))
            net.head_w2.copy_(torch.from_numpy(tensors["head.w2"].copy()))
            net.head_b2.copy_(torch.from_numpy(tensors["head.b2"].copy()))
            for i, blk in enumerate(net.blocks):
                p = f"layers.{i}."
                blk.wq.copy_(torch.from_numpy(tensors[p + "attn.wq"].copy()))
                blk.wk.copy_(torch.from_numpy(tensors[p + "attn.wk"].copy()))
                blk.wv.copy_(torch.from_numpy(tensors[p + "attn.wv"].copy()))
                blk.wo.copy_(torch.from_numpy(tensors[p + "attn.wo"].copy()))
                blk.ff_w1.copy_(torch.from_numpy(tensors[p + "ff.w1"].copy()))
                blk.ff_b1.copy_(torch.from_numpy(tensors[p + "ff.b1"].copy()))
                blk.ff_w2.copy_(torch.from_numpy(tensors[p + "ff.w2"].copy()))
                blk.ff_b2.copy_(torch.from_numpy(tensors[p + "ff.b2"].copy()))
                blk.ln1_gain.copy_(torch.from_numpy(tensors[p + "ln1.gain"].copy()))
                blk.ln1_bias.copy_(torch.from_numpy(tensors[p + "ln1.bias"].copy()))
                blk.ln2_gain.copy_(torch.from_numpy(tensors[p + "ln2.gain"].copy()))
                blk.ln2_bias.copy_(torch.from_numpy(tensors[p + "ln2.bias"].copy()))
        return net
