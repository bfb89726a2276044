"""Golden inference vectors for cross-component parity checks.

A golden file is JSON: format tag, count, then records of {tokens (100x8),
props (4), label, probability}. Probabilities come from this package's own
forward pass run in float64, giving the inference runtime a reference to
match within tolerance.
"""

import json

import numpy as np
import torch

from sfc_trainer.data import read_dataset
from sfc_trainer.model import SfcNet
from sfc_trainer.sfcw import read_weights

FORMAT_TAG = "sfc-goldens"
MIN_GOLDENS = 20


def export_goldens(weights_path, dataset_path, k: int, out_path) -> dict:
    """Write ``k`` golden records drawn from both label classes.

    Records are taken in file order, alternating classes (k//2 spilled,
    the rest safe), so a given dataset and k always produce the same file.

    Raises:
        ValueError: k below the minimum, or a class has too few records.
    """
    if not (isinstance(k, int) and k >= MIN_GOLDENS):
        raise ValueError(f"need at least {MIN_GOLDENS} golden vectors, got {k!r}")
    ds = read_dataset(dataset_path)
    spilled = np.flatnonzero(ds.labels == 1)
    safe = np.flatnonzero(ds.labels == 0)
    n_spill = k // 2
    n_safe = k - n_spill
    if len(spilled) < n_spill or len(safe) < n_safe:
        raise ValueError(
            f"dataset has {len(spilled)} spilled / {len(safe)} safe records, "
            f"need {n_spill}/{n_safe} for {k} goldens"
        )
    picks = np.concatenate([spilled[:n_spill], safe[:n_safe]])

    meta, tensors = read_weights(weights_path)
    net = SfcNet.from_tensors(meta, tensors).double()
    net.eval()
    with torch.no_grad():
        logits = net(
            torch.from_numpy(ds.tokens[picks]).double(),
            torch.from_numpy(ds.props[picks]).double(),
        )
        probs = torch.sigmoid(logits).numpy()

    records = [
        {
            "tokens": ds.tokens[i].astype(float).tolist(),
            "props": ds.props[i].astype(float).tolist(),
            "label": int(ds.labels[i]),
            "probability": float(p),
        }
        for i, p in zip(picks, probs)
    ]
    doc = {"format": FORMAT_TAG, "version": 1, "count": k, "records": records}
    with open(out_path, "w") as f:
        json.dump(doc, f)
    return doc
