import struct

import pytest
import torch

from src.core.checkpoint import MAGIC, decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint
from src.core.errors import CheckpointError


def sample_tensors():
    return {
        "b/weight": torch.arange(6, dtype=torch.float32).view(2, 3),
        "a/bias": torch.tensor([0.5, -0.25], dtype=torch.float64),
        "opt/0/step": torch.tensor(3.0),
        "counts": torch.tensor([1, 2, 3], dtype=torch.int64),
        "flags": torch.tensor([True, False]),
    }


class TestCheckpointFormat:
    def test_decode_restores_everything(self):
        header = {"step": 2, "config": {"batch_size": 4}}
        decoded_header, tensors = decode_checkpoint(encode_checkpoint(header, sample_tensors()))
        assert decoded_header == header
        for name, value in sample_tensors().items():
            assert tensors[name].dtype == value.dtype
            assert torch.equal(tensors[name], value)

    def test_reencoding_is_byte_identical(self):
        data = encode_checkpoint({"z": 1, "a": [1, 2]}, sample_tensors())
        assert encode_checkpoint(*decode_checkpoint(data)) == data

    def test_layout_prefix(self):
        data = encode_checkpoint({}, {})
        assert data[:4] == MAGIC
        assert struct.unpack("<H", data[4:6]) == (1,)

    def test_bad_magic(self):
        data = encode_checkpoint({}, sample_tensors())
        with pytest.raises(CheckpointError, match="magic"):
            decode_checkpoint(b"XXXX" + data[4:])

    def test_unknown_version(self):
        data = bytearray(encode_checkpoint({}, {}))
        data[4:6] = struct.pack("<H", 99)
        with pytest.raises(CheckpointError, match="version"):
            decode_checkpoint(bytes(data))

    def test_truncated(self):
        data = encode_checkpoint({}, sample_tensors())
        with pytest.raises(CheckpointError, match="truncated"):
            decode_checkpoint(data[:-3])

    def test_trailing_bytes(self):
        with pytest.raises(CheckpointError):
            decode_checkpoint(encode_checkpoint({}, {}) + b"\x00")

    def test_unsupported_dtype(self):
        with pytest.raises(CheckpointError):
            encode_checkpoint({}, {"x": torch.zeros(2, dtype=torch.int16)})

    def test_save_and_load(self, tmp_path):
        path = tmp_path / "nested" / "ckpt.hpg"
        save_checkpoint(str(path), {"k": "v"}, sample_tensors())
        header, tensors = load_checkpoint(str(path))
        assert header == {"k": "v"}
        assert set(tensors) == set(sample_tensors())
        assert not path.with_name("ckpt.hpg.tmp").exists()

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_checkpoint(str(tmp_path / "absent.hpg"))
