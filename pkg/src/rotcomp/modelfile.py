"""Binary model container.

Layout (all integers little-endian u32):

    magic "RDM1" (4 bytes)
    version = 1
    config blob length, then UTF-8 `key=value` lines
    tensor count
    per tensor: name length, UTF-8 name, rank, one u32 per dim,
                then prod(dims) IEEE-754 binary32 LE values, row-major

The config blob identifies the model kind and its architecture; readers
validate tensor shapes against it before accepting the file.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

__all__ = [
    "MAGIC",
    "VERSION",
    "ModelFileError",
    "ModelMagicError",
    "ModelVersionError",
    "ModelTruncatedError",
    "ModelShapeError",
    "write_model_blob",
    "read_model_blob",
    "save_model_file",
    "load_model_file",
]

MAGIC = b"RDM1"
VERSION = 1


class ModelFileError(ValueError):
    """Base class for model container failures."""


class ModelMagicError(ModelFileError):
    """File does not start with the container magic."""


class ModelVersionError(ModelFileError):
    """Container version is not supported."""


class ModelTruncatedError(ModelFileError):
    """File ends before the declared content is complete."""


class ModelShapeError(ModelFileError):
    """Tensor shapes disagree with the embedded config."""


def write_model_blob(config: dict, tensors: dict[str, np.ndarray]) -> bytes:
    """Serialize a config dict and named float tensors."""
    lines = "".join(f"{k}={v}\n" for k, v in config.items())
    blob = lines.encode("utf-8")
    parts = [MAGIC, struct.pack("<I", VERSION), struct.pack("<I", len(blob)), blob]
    parts.append(struct.pack("<I", len(tensors)))
    for name, tensor in tensors.items():
        arr = np.ascontiguousarray(tensor, dtype="<f4")
        encoded = name.encode("utf-8")
        parts.append(struct.pack("<I", len(encoded)))
        parts.append(encoded)
        parts.append(struct.pack("<I", arr.ndim))
        for dim in arr.shape:
            parts.append(struct.pack("<I", dim))
        parts.append(arr.tobytes())
    return b"".join(parts)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ModelTruncatedError(
                f"file truncated: wanted {n} bytes at offset {self.pos}, "
                f"have {len(self.data) - self.pos}"
            )
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]


def read_model_blob(data: bytes) -> tuple[dict, dict[str, np.ndarray]]:
    """Parse a container; the magic is checked before anything else."""
    if data[:4] != MAGIC:
        raise ModelMagicError(f"bad magic {data[:4]!r}, expected {MAGIC!r}")
    reader = _Reader(data)
    reader.take(4)
    version = reader.u32()
    if version != VERSION:
        raise ModelVersionError(f"unsupported container version {version}")
    blob = reader.take(reader.u32())
    config = {}
    for line in blob.decode("utf-8").splitlines():
        if not line.strip():
            continue
        if "=" not in line:
            raise ModelFileError(f"malformed config line {line!r}")
        key, value = line.split("=", 1)
        config[key] = value

    tensors = {}
    for _ in range(reader.u32()):
        name = reader.take(reader.u32()).decode("utf-8")
        rank = reader.u32()
        dims = tuple(reader.u32() for _ in range(rank))
        count = int(np.prod(dims, dtype=np.int64)) if dims else 1
        raw = reader.take(4 * count)
        tensors[name] = np.frombuffer(raw, dtype="<f4").reshape(dims).astype(float)
    return config, tensors


def save_model_file(path, config: dict, tensors: dict[str, np.ndarray]) -> None:
    Path(path).write_bytes(write_model_blob(config, tensors))


def load_model_file(path) -> tuple[dict, dict[str, np.ndarray]]:
    return read_model_blob(Path(path).read_bytes())
