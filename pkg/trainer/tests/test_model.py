import numpy as np
import pytest
import torch

from sfc_trainer.model import DEFAULTS, SfcNet, sinusoidal_table


def rand_batch(n=3, seed=0):
    rng = np.random.default_rng(seed)
    pos = rng.uniform(-1, 1, (n, 100, 3))
    q = rng.normal(size=(n, 100, 4))
    q /= np.linalg.norm(q, axis=2, keepdims=True)
    dt = np.full((n, 100, 1), 0.05)
    tokens = np.concatenate([pos, q, dt], axis=2).astype(np.float32)
    props = rng.uniform(0.01, 0.2, (n, 4)).astype(np.float32)
    return torch.from_numpy(tokens), torch.from_numpy(props)


def test_forward_shape_and_finiteness():
    net = SfcNet(seed=0)
    tokens, props = rand_batch(5)
    logits = net(tokens, props)
    assert logits.shape == (5,)
    assert torch.isfinite(logits).all()


def test_same_seed_same_weights():
    a = SfcNet(seed=4).export_tensors()
    b = SfcNet(seed=4).export_tensors()
    c = SfcNet(seed=5).export_tensors()
    assert all(np.array_equal(a[k], b[k]) for k in a)
    assert any(not np.array_equal(a[k], c[k]) for k in a)


def test_position_table_fixed_sinusoidal():
    net = SfcNet(seed=0)
    expected = sinusoidal_table(100, DEFAULTS["d_model"])
    np.testing.assert_array_equal(net.pos_table.numpy(), expected)
    assert all(not name.startswith("pos") for name, _ in net.named_parameters())


def test_export_names_cover_architecture():
    net = SfcNet(seed=0)
    names = set(net.export_tensors())
    assert "embed.weight" in names and "pos.table" in names
    for i in range(DEFAULTS["n_layers"]):
        for suffix in ("attn.wq", "attn.wo", "ff.w1", "ff.b2", "ln1.gain", "ln2.bias"):
            assert f"layers.{i}.{suffix}" in names
    assert {"head.w1", "head.b1", "head.w2", "head.b2"} <= names
    assert len(names) == 6 + 12 * DEFAULTS["n_layers"]


def test_dim_validation():
    with pytest.raises(ValueError, match="heads"):
        SfcNet(d_model=30, n_heads=4)
    with pytest.raises(ValueError, match="positive"):
        SfcNet(n_layers=0)
    with pytest.raises(ValueError, match="unknown"):
        SfcNet(bogus=3)


def test_from_tensors_round_trip():
    net = SfcNet(seed=7)
    rebuilt = SfcNet.from_tensors(net.meta, net.export_tensors())
    tokens, props = rand_batch(2, seed=1)
    with torch.no_grad():
        np.testing.assert_array_equal(net(tokens, props).numpy(), rebuilt(tokens, props).numpy())


def test_from_tensors_name_mismatch():
    net = SfcNet(seed=0)
    tensors = net.export_tensors()
    tensors.pop("head.w2")
    with pytest.raises(ValueError, match="mismatch"):
        SfcNet.from_tensors(net.meta, tensors)


def test_gradients_reach_every_parameter():
    net = SfcNet(seed=0)
    tokens, props = rand_batch(4)
    loss = torch.nn.functional.binary_cross_entropy_with_logits(
        net(tokens, props), torch.tensor([0.0, 1.0, 0.0, 1.0])
    )
    loss.backward()
    for name, param in net.named_parameters():
        assert param.grad is not None and torch.isfinite(param.grad).all(), name
