"""FEMB writer and reader.

The format is a fixed binary layout, little-endian throughout:

    magic    4 bytes  b"FEMB"
    version  u32      1
    kind     u8       1 = embeddings (d >= 1), 2 = scores (d = 1)
    n        u32      row count
    d        u32      feature dimension
    indices  n x u32  frame index per row, strictly increasing
    payload  n x d    float32, row-major

No padding, no trailer: a valid file has exactly the advertised
length. Payloads are float32 on disk and in memory, so write/read
cycles are byte-identical.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, UsageError

MAGIC = b"FEMB"
VERSION = 1
KIND_EMBEDDINGS = 1
KIND_SCORES = 2

HEADER = struct.Struct("<4sIBII")

EMBEDDINGS_SUFFIX = ".emb.femb"
SCORES_SUFFIX = ".score.femb"


@dataclass(frozen=True)
class FembFile:
    """Decoded file content. values has shape (n, d), float32."""

    kind: int
    frame_indices: tuple[int, ...]
    values: np.ndarray


def _checked_indices(frame_indices) -> np.ndarray:
    arr = np.asarray(frame_indices)
    if arr.ndim != 1 or arr.size == 0:
        raise UsageError("frame_indices must be a non-empty 1-D sequence")
    if not np.issubdtype(arr.dtype, np.integer):
        raise UsageError("frame_indices must be integers")
    if (arr < 0).any() or (arr > 0xFFFFFFFF).any():
        raise UsageError("frame indices must fit in u32")
    if arr.size > 1 and not (np.diff(arr.astype(np.int64)) > 0).all():
        raise UsageError("frame indices must be strictly increasing")
    return arr.astype("<u4")


def encode_femb(kind: int, frame_indices, values) -> bytes:
    """Serialize one file. values: (n, d) for embeddings, (n,) or
    (n, 1) for scores."""
    if kind not in (KIND_EMBEDDINGS, KIND_SCORES):
        raise UsageError(f"kind must be 1 or 2, got {kind}")
    indices = _checked_indices(frame_indices)
    payload = np.asarray(values, dtype="<f4")
    if kind == KIND_SCORES:
        if payload.ndim == 1:
            payload = payload.reshape(-1, 1)
        if payload.ndim != 2 or payload.shape[1] != 1:
            raise UsageError(f"scores must be one value per frame, got shape {payload.shape}")
    if payload.ndim != 2 or payload.shape[0] != indices.size or payload.shape[1] < 1:
        raise UsageError(
            f"values shape {payload.shape} does not match {indices.size} frame indices"
        )
    if not np.isfinite(payload).all():
        raise UsageError("values contain NaN or Inf")
    n, d = payload.shape
    return b"".join(
        [
            HEADER.pack(MAGIC, VERSION, kind, n, d),
            indices.tobytes(),
            np.ascontiguousarray(payload).tobytes(),
        ]
    )


def write_femb(path: str | Path, kind: int, frame_indices, values) -> None:
    Path(path).write_bytes(encode_femb(kind, frame_indices, values))


def parse_femb(blob: bytes) -> FembFile:
    if len(blob) < HEADER.size:
        raise FormatError(f"too short for a header: {len(blob)} bytes")
    magic, version, kind, n, d = HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    if kind not in (KIND_EMBEDDINGS, KIND_SCORES):
        raise FormatError(f"unknown kind {kind}")
    if n < 1 or d < 1:
        raise FormatError(f"declared shape {n}x{d} must be at least 1x1")
    if kind == KIND_SCORES and d != 1:
        raise FormatError(f"score files require d=1, got d={d}")
    expected = HEADER.size + 4 * n + 4 * n * d
    if len(blob) != expected:
        raise FormatError(f"length {len(blob)}, declared content needs {expected}")
    indices = np.frombuffer(blob, dtype="<u4", count=n, offset=HEADER.size)
    values = np.frombuffer(blob, dtype="<f4", count=n * d, offset=HEADER.size + 4 * n)
    if n > 1 and not (np.diff(indices.astype(np.int64)) > 0).all():
        raise FormatError("frame indices not strictly increasing")
    if not np.isfinite(values).all():
        raise FormatError("payload contains NaN or Inf")
    return FembFile(kind, tuple(int(i) for i in indices), values.reshape(n, d).copy())


def read_femb(path: str | Path) -> FembFile:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    try:
        return parse_femb(blob)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None
