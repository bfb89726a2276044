import numpy as np
import pytest

from sfc_trainer.model import SfcNet
from sfc_trainer.sfcw import WeightFormatError, read_weights, write_weights


@pytest.fixture
def net():
    return SfcNet(seed=2)


def test_round_trip_bit_exact(tmp_path, net):
    path = tmp_path / "w.sfcw"
    tensors = net.export_tensors()
    write_weights(net.meta, tensors, path)
    meta, loaded = read_weights(path)
    assert meta == net.meta
    assert set(loaded) == set(tensors)
    for name in tensors:
        np.testing.assert_array_equal(loaded[name], tensors[name])


def test_rewrite_is_byte_identical(tmp_path, net):
    a, b = tmp_path / "a.sfcw", tmp_path / "b.sfcw"
    write_weights(net.meta, net.export_tensors(), a)
    meta, tensors = read_weights(a)
    write_weights(meta, tensors, b)
    assert a.read_bytes() == b.read_bytes()


def test_missing_metadata_rejected(tmp_path, net):
    meta = dict(net.meta)
    meta.pop("ff_hidden")
    with pytest.raises(WeightFormatError, match="ff_hidden"):
        write_weights(meta, net.export_tensors(), tmp_path / "w.sfcw")


def test_nonfinite_tensor_rejected(tmp_path, net):
    tensors = net.export_tensors()
    tensors["head.b2"] = np.array([np.nan], dtype=np.float32)
    with pytest.raises(WeightFormatError, match="head.b2"):
        write_weights(net.meta, tensors, tmp_path / "w.sfcw")


def test_bad_magic(tmp_path):
    path = tmp_path / "w.sfcw"
    path.write_bytes(b"XXXX" + b"\x00" * 12)
    with pytest.raises(WeightFormatError, match="not a classifier weight"):
        read_weights(path)


def test_truncated_tensor_data(tmp_path, net):
    path = tmp_path / "w.sfcw"
    write_weights(net.meta, net.export_tensors(), path)
    blob = path.read_bytes()
    path.write_bytes(blob[:-40])
    with pytest.raises(WeightFormatError, match="ended"):
        read_weights(path)


def test_trailing_bytes_rejected(tmp_path, net):
    path = tmp_path / "w.sfcw"
    write_weights(net.meta, net.export_tensors(), path)
    path.write_bytes(path.read_bytes() + b"\x00")
    with pytest.raises(WeightFormatError, match="trailing"):
        read_weights(path)


def test_unsupported_version(tmp_path, net):
    path = tmp_path / "w.sfcw"
    write_weights(net.meta, net.export_tensors(), path)
    blob = bytearray(path.read_bytes())
    blob[4:8] = (9).to_bytes(4, "little")
    path.write_bytes(bytes(blob))
    with pytest.raises(WeightFormatError, match="version"):
        read_weights(path)
