"""FEMB: bit-exact binary transport for per-frame embeddings and scores.

Layout (all integers little-endian):

    magic    4 bytes  b"FEMB"
    version  u32      1
    kind     u8       1 = embeddings (d >= 1), 2 = scores (d = 1)
    n        u32      row count
    d        u32      feature dimension
    indices  n x u32  frame index per row, strictly increasing
    payload  n x d    float32, row-major

Payload floats are stored and returned as float32 so a read/write cycle
is byte-identical.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import FembFormatError
from .types import EmbeddingMatrix, ScoreVector

MAGIC = b"FEMB"
VERSION = 1
KIND_EMBEDDINGS = 1
KIND_SCORES = 2

_HEADER = struct.Struct("<4sIBII")

EMBEDDINGS_SUFFIX = ".emb.femb"
SCORES_SUFFIX = ".score.femb"


def write_femb(data: EmbeddingMatrix | ScoreVector) -> bytes:
    if isinstance(data, EmbeddingMatrix):
        kind, n, d = KIND_EMBEDDINGS, data.n, data.d
        payload = data.data
    elif isinstance(data, ScoreVector):
        kind, n, d = KIND_SCORES, data.n, 1
        payload = data.scores
    else:
        raise FembFormatError(
            f"expected EmbeddingMatrix or ScoreVector, got {type(data).__name__}"
        )
    parts = [
        _HEADER.pack(MAGIC, VERSION, kind, n, d),
        np.asarray(data.source_indices, dtype="<u4").tobytes(),
        np.ascontiguousarray(payload, dtype="<f4").tobytes(),
    ]
    return b"".join(parts)


def parse_femb(blob: bytes) -> EmbeddingMatrix | ScoreVector:
    if len(blob) < _HEADER.size:
        raise FembFormatError(
            f"file too short for header: {len(blob)} < {_HEADER.size} bytes"
        )
    magic, version, kind, n, d = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise FembFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FembFormatError(f"unsupported version {version}, expected {VERSION}")
    if kind not in (KIND_EMBEDDINGS, KIND_SCORES):
        raise FembFormatError(f"unknown kind {kind}")
    if n < 1 or d < 1:
        raise FembFormatError(f"declared shape {n}x{d} must be at least 1x1")
    if kind == KIND_SCORES and d != 1:
        raise FembFormatError(f"score files require d=1, got d={d}")
    expected = _HEADER.size + 4 * n + 4 * n * d
    if len(blob) != expected:
        raise FembFormatError(
            f"file length {len(blob)} does not match declared "
            f"{n}x{d} content ({expected} bytes)"
        )
    offset = _HEADER.size
    indices = np.frombuffer(blob, dtype="<u4", count=n, offset=offset)
    offset += 4 * n
    payload = np.frombuffer(blob, dtype="<f4", count=n * d, offset=offset)
    if n > 1 and not (np.diff(indices.astype(np.int64)) > 0).all():
        raise FembFormatError("frame indices not strictly increasing")
    if not np.isfinite(payload).all():
        raise FembFormatError("payload contains NaN or Inf")
    index_list = [int(i) for i in indices]
    if kind == KIND_EMBEDDINGS:
        return EmbeddingMatrix(index_list, payload.reshape(n, d))
    return ScoreVector(index_list, payload.copy())


def read_femb(path: str | Path) -> EmbeddingMatrix | ScoreVector:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise FembFormatError(f"cannot read {path}: {exc}") from exc
    try:
        return parse_femb(blob)
    except FembFormatError as exc:
        raise FembFormatError(f"{path}: {exc}") from None
