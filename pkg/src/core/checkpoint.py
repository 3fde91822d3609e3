"""
Versioned little-endian checkpoint files.

Layout:
    magic      4 bytes  b"HPG1"
    version    u16
    header     u32 length + UTF-8 JSON (sorted keys, compact separators)
    count      u32
    tensors    count x (u16 name length, UTF-8 name, 2-byte dtype code,
               u8 rank, rank x u64 dims, raw little-endian data)

Tensors are stored in name order, so encoding is canonical and
load followed by save reproduces the file byte for byte.
"""
import io
import json
import os
import struct
from pathlib import Path
from typing import Any, BinaryIO, Dict, Mapping, Tuple

import numpy as np
import torch

from .errors import CheckpointError

MAGIC = b"HPG1"
VERSION = 1

DTYPE_CODES = {
    torch.float32: (b"f4", np.dtype("<f4")),
    torch.float64: (b"f8", np.dtype("<f8")),
    torch.int64: (b"i8", np.dtype("<i8")),
    torch.bool: (b"b1", np.dtype("?")),
}
CODE_DTYPES = {code: (torch_dtype, np_dtype) for torch_dtype, (code, np_dtype) in DTYPE_CODES.items()}


def _read_exact(stream: BinaryIO, n: int) -> bytes:
    data = stream.read(n)
    if len(data) != n:
        raise CheckpointError("Checkpoint is truncated")
    return data


def encode_checkpoint(header: Mapping[str, Any], tensors: Mapping[str, torch.Tensor]) -> bytes:
    """
    Serialize a header and named tensors.

    Args:
        header: JSON-serializable metadata
        tensors: Tensors by name

    Returns:
        File contents
    """
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(struct.pack("<H", VERSION))
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    out.write(struct.pack("<I", len(header_bytes)))
    out.write(header_bytes)
    out.write(struct.pack("<I", len(tensors)))
    for name in sorted(tensors):
        tensor = tensors[name].detach().cpu().contiguous()
        if tensor.dtype not in DTYPE_CODES:
            raise CheckpointError(f"Unsupported tensor dtype {tensor.dtype} for '{name}'")
        code, np_dtype = DTYPE_CODES[tensor.dtype]
        name_bytes = name.encode("utf-8")
        out.write(struct.pack("<H", len(name_bytes)))
        out.write(name_bytes)
        out.write(code)
        out.write(struct.pack("<B", tensor.ndim))
        out.write(struct.pack(f"<{tensor.ndim}Q", *tensor.shape))
        out.write(tensor.numpy().astype(np_dtype, copy=False).tobytes())
    return out.getvalue()


def decode_checkpoint(data: bytes) -> Tuple[Dict[str, Any], Dict[str, torch.Tensor]]:
    """
    Parse file contents produced by ``encode_checkpoint``.

    Raises:
        CheckpointError: On a bad magic, unknown version or dtype code, or truncation
    """
    stream = io.BytesIO(data)
    if _read_exact(stream, 4) != MAGIC:
        raise CheckpointError("Not a checkpoint file (bad magic)")
    (version,) = struct.unpack("<H", _read_exact(stream, 2))
    if version != VERSION:
        raise CheckpointError(f"Unsupported checkpoint version {version}")
    (header_len,) = struct.unpack("<I", _read_exact(stream, 4))
    try:
        header = json.loads(_read_exact(stream, header_len).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"Corrupt checkpoint header: {e}") from e
    (count,) = struct.unpack("<I", _read_exact(stream, 4))

    tensors: Dict[str, torch.Tensor] = {}
    for _ in range(count):
        (name_len,) = struct.unpack("<H", _read_exact(stream, 2))
        name = _read_exact(stream, name_len).decode("utf-8")
        code = _read_exact(stream, 2)
        if code not in CODE_DTYPES:
            raise CheckpointError(f"Unknown dtype code {code!r} for '{name}'")
        torch_dtype, np_dtype = CODE_DTYPES[code]
        (rank,) = struct.unpack("<B", _read_exact(stream, 1))
        shape = struct.unpack(f"<{rank}Q", _read_exact(stream, 8 * rank))
        n_bytes = int(np.prod(shape, dtype=np.int64)) * np_dtype.itemsize
        values = np.frombuffer(_read_exact(stream, n_bytes), dtype=np_dtype).reshape(shape)
        tensors[name] = torch.from_numpy(values.copy()).to(torch_dtype)
    if stream.read(1):
        raise CheckpointError("Trailing bytes after the last tensor")
    return header, tensors


def save_checkpoint(path: str, header: Mapping[str, Any], tensors: Mapping[str, torch.Tensor]):
    """
    Write a checkpoint, replacing ``path`` only once the file is complete.

    Raises:
        OSError: If the file cannot be written (disk full included)
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    tmp = target.with_name(target.name + ".tmp")
    with open(tmp, "wb") as f:
        f.write(encode_checkpoint(header, tensors))
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, target)


def load_checkpoint(path: str) -> Tuple[Dict[str, Any], Dict[str, torch.Tensor]]:
    """Read a checkpoint file"""
    if not Path(path).exists():
        raise FileNotFoundError(f"Checkpoint not found: {path}")
    with open(path, "rb") as f:
        return decode_checkpoint(f.read())
