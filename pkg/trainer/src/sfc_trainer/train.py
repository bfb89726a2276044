"""Training loop: binary cross-entropy over logits, adaptive-moment
optimizer, fixed split, deterministic per seed (single-process CPU; the
usual caveat that framework kernels may reorder reductions across
versions applies, so determinism is guaranteed per torch build)."""

import logging
from dataclasses import dataclass

import numpy as np
import torch

from sfc_trainer.data import read_dataset
from sfc_trainer.model import SfcNet
from sfc_trainer.sfcw import write_weights

log = logging.getLogger(__name__)

EVAL_BATCH = 512


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 400
    batch_size: int = 32
    lr: float = 1e-3
    split: float = 0.75
    seed: int = 0
    weight_decay: float = 1e-3
    input_noise: float = 0.0
    dropout: float = 0.0

    def __post_init__(self):
        if not (isinstance(self.epochs, int) and self.epochs > 0):
            raise ValueError(f"epochs must be a positive integer, got {self.epochs!r}")
        if not (isinstance(self.batch_size, int) and self.batch_size > 0):
            raise ValueError(f"batch size must be a positive integer, got {self.batch_size!r}")
        if not (np.isfinite(self.lr) and self.lr > 0):
            raise ValueError(f"learning rate must be positive, got {self.lr!r}")
        if not 0.0 < self.split < 1.0:
            raise ValueError(f"train fraction must be in (0, 1), got {self.split!r}")
        if not 0.0 <= self.weight_decay < 1.0:
            raise ValueError(f"weight decay must be in [0, 1), got {self.weight_decay!r}")
        if not (np.isfinite(self.input_noise) and 0.0 <= self.input_noise < 1.0):
            raise ValueError(f"input noise must be in [0, 1), got {self.input_noise!r}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout must be in [0, 1), got {self.dropout!r}")


def _accuracy(net: SfcNet, tokens, props, labels) -> float:
    hits = 0
    with torch.no_grad():
        for s in range(0, len(labels), EVAL_BATCH):
            logits = net(tokens[s : s + EVAL_BATCH], props[s : s + EVAL_BATCH])
            hits += int(((logits > 0).long() == labels[s : s + EVAL_BATCH]).sum())
    return hits / max(len(labels), 1)


def train(dataset_path, cfg: TrainConfig, weights_out, progress=None) -> dict:
    """Train on a dataset file and write the weight file.

    Returns a metrics dict (record counts, final loss, train/validation
    accuracy); identical for identical inputs and seed. ``progress`` is
    called as progress(epoch, mean_loss) after each epoch when given.

    Regularization: L2 decay on matrix weights plus Gaussian noise added
    to each training batch (``input_noise`` standard deviation; inputs in
    normalized units). Evaluation always sees clean inputs.
    """
    # Long CPU runs otherwise decay optimizer state through the subnormal
    # float range, where x86 arithmetic is microcoded and ~10x slower.
    torch.set_flush_denormal(True)
    ds = read_dataset(dataset_path)
    n_train = int(round(cfg.split * len(ds)))
    if n_train < 1 or len(ds) - n_train < 1:
        raise ValueError(
            f"split {cfg.split} leaves an empty side for {len(ds)} records"
        )
    perm = np.random.default_rng(cfg.seed).permutation(len(ds))
    tr, va = perm[:n_train], perm[n_train:]

    def side(idx):
        return (
            torch.from_numpy(ds.tokens[idx]),
            torch.from_numpy(ds.props[idx]),
            torch.from_numpy(ds.labels[idx]),
        )

    x_tr, p_tr, y_tr = side(tr)
    x_va, p_va, y_va = side(va)

    torch.manual_seed(cfg.seed)
    net = SfcNet(seed=cfg.seed, dropout=cfg.dropout)
    # decay skips layer-norm parameters and biases, the usual convention
    decayed, plain = [], []
    for name, param in net.named_parameters():
        (plain if ("ln" in name or name.endswith(("_b1", "_b2", "bias"))) else decayed).append(param)
    opt = torch.optim.Adam(
        [
            {"params": decayed, "weight_decay": cfg.weight_decay},
            {"params": plain, "weight_decay": 0.0},
        ],
        lr=cfg.lr,
    )
    loss_fn = torch.nn.BCEWithLogitsLoss()
    net.train()
    y_float = y_tr.float()
    gen = torch.Generator().manual_seed(cfg.seed)

    final_loss = float("nan")
    for epoch in range(cfg.epochs):
        order = torch.randperm(n_train, generator=gen)
        total = 0.0
        for s in range(0, n_train, cfg.batch_size):
            idx = order[s : s + cfg.batch_size]
            xb, pb = x_tr[idx], p_tr[idx]
            if cfg.input_noise > 0.0:
                xb = xb + cfg.input_noise * torch.randn(xb.shape, generator=gen)
                pb = pb + cfg.input_noise * torch.randn(pb.shape, generator=gen)
            loss = loss_fn(net(xb, pb), y_float[idx])
            opt.zero_grad()
            loss.backward()
            opt.step()
            total += float(loss.detach()) * len(idx)
        final_loss = total / n_train
        if progress is not None:
            progress(epoch, final_loss)
        if (epoch + 1) % 25 == 0 or epoch == 0:
            log.info("epoch %d/%d loss %.4f", epoch + 1, cfg.epochs, final_loss)

    net.eval()
    metrics = {
        "records": len(ds),
        "train_records": n_train,
        "val_records": len(ds) - n_train,
        "epochs": cfg.epochs,
        "final_loss": round(final_loss, 6),
        "train_accuracy": round(_accuracy(net, x_tr, p_tr, y_tr), 6),
        "val_accuracy": round(_accuracy(net, x_va, p_va, y_va), 6),
    }
    write_weights(net.meta, net.export_tensors(), weights_out)
    return metrics
