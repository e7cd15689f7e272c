"""The ``.rwgt`` score-tensor file format.

Layout (all integers little-endian)::

    magic     4 bytes   b"RWGT"
    version   uint32    1
    meta_len  uint64    length of the metadata block in bytes
    metadata  meta_len  UTF-8 JSON, sorted keys, compact separators
    payload   float64   A * N * E scores, C order (episodes contiguous per sample)
"""

from __future__ import annotations

import json
import os
import struct

import numpy as np

from . import __version__
from .harness import ScoreTensor
from .policy import arch_from_dict

MAGIC = b"RWGT"
VERSION = 1
_HEADER = struct.Struct("<4sIQ")


class TensorFormatError(ValueError):
    pass


class BadMagicError(TensorFormatError):
    pass


class UnsupportedVersionError(TensorFormatError):
    pass


class TruncatedPayloadError(TensorFormatError):
    def __init__(self, expected: int, actual: int, what: str = "payload"):
        super().__init__(f"truncated {what}: expected {expected} bytes, found {actual}")
        self.expected = expected
        self.actual = actual


class OutputUnwritableError(OSError):
    pass


def _metadata(tensor: ScoreTensor) -> dict:
    a, n, e = tensor.shape
    return {
        "env": tensor.env_name,
        "architectures": [arch.describe() for arch in tensor.architectures],
        "n_architectures": a,
        "n_samples": n,
        "n_episodes": e,
        "master_seed": int(tensor.master_seed),
        "runtime_seconds": None if tensor.runtimes is None else [float(t) for t in tensor.runtimes],
        "created": tensor.created,
        "tool_version": tensor.tool_version,
        "extra": tensor.extra,
    }


def encode(tensor: ScoreTensor) -> bytes:
    meta = json.dumps(_metadata(tensor), sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")
    payload = tensor.scores.astype("<f8", copy=False).tobytes(order="C")
    return _HEADER.pack(MAGIC, VERSION, len(meta)) + meta + payload


def decode(data: bytes) -> ScoreTensor:
    if len(data) < _HEADER.size:
        if data[:4] != MAGIC[: len(data[:4])]:
            raise BadMagicError(f"bad magic {data[:4]!r}, expected {MAGIC!r}")
        raise TruncatedPayloadError(_HEADER.size, len(data), "header")
    magic, version, meta_len = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported format version {version} (this build reads {VERSION})")
    start = _HEADER.size
    if len(data) < start + meta_len:
        raise TruncatedPayloadError(meta_len, len(data) - start, "metadata")
    try:
        meta = json.loads(data[start : start + meta_len].decode("utf-8"))
        shape = (int(meta["n_architectures"]), int(meta["n_samples"]), int(meta["n_episodes"]))
        archs = [arch_from_dict(d) for d in meta["architectures"]]
    except (UnicodeDecodeError, ValueError, KeyError, TypeError) as exc:
        raise TensorFormatError(f"corrupt metadata: {exc}") from None
    if len(archs) != shape[0]:
        raise TensorFormatError(f"metadata lists {len(archs)} architectures but n_architectures={shape[0]}")
    body = data[start + meta_len :]
    expected = 8 * shape[0] * shape[1] * shape[2]
    if len(body) < expected:
        raise TruncatedPayloadError(expected, len(body))
    if len(body) > expected:
        raise TensorFormatError(f"{len(body) - expected} unexpected trailing bytes after payload")
    scores = np.frombuffer(body, dtype="<f8").astype(np.float64).reshape(shape)
    return ScoreTensor(
        env_name=meta["env"],
        architectures=archs,
        scores=scores,
        master_seed=int(meta["master_seed"]),
        runtimes=meta.get("runtime_seconds"),
        created=meta.get("created"),
        tool_version=meta.get("tool_version", __version__),
        extra=meta.get("extra") or {},
    )


def write_tensor(tensor: ScoreTensor, destination) -> int:
    """Write ``tensor`` to a path or binary stream; returns the byte count."""
    data = encode(tensor)
    if hasattr(destination, "write"):
        destination.write(data)
        return len(data)
    try:
        with open(os.fspath(destination), "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise OutputUnwritableError(exc.errno, f"cannot write {destination}: {exc.strerror}") from exc
    return len(data)


def read_tensor(source) -> ScoreTensor:
    if isinstance(source, (bytes, bytearray, memoryview)):
        return decode(bytes(source))
    if hasattr(source, "read"):
        return decode(source.read())
    with open(os.fspath(source), "rb") as fh:
        return decode(fh.read())

