"""framebridge: produces frame embeddings and importance scores as
FEMB files for adaptive frame samplers, and serves models behind the
line-JSON adapter wire protocol."""

from framebridge.embed import (
    EMBED_DIM,
    ClipBackend,
    PixelProjectionBackend,
    embed_video,
    make_embed_backend,
    write_embeddings,
)
from framebridge.errors import (
    BridgeError,
    DecodeError,
    FormatError,
    UsageError,
    WeightsError,
)
from framebridge.femb import (
    EMBEDDINGS_SUFFIX,
    KIND_EMBEDDINGS,
    KIND_SCORES,
    SCORES_SUFFIX,
    FembFile,
    encode_femb,
    parse_femb,
    read_femb,
    write_femb,
)
from framebridge.score import (
    CstaBackend,
    MotionScoreBackend,
    make_score_backend,
    score_video,
    write_scores,
)
from framebridge.serve import build_model, serve
from framebridge.video import VideoReader, checked_pool_indices, read_frames

__all__ = [
    "EMBED_DIM",
    "EMBEDDINGS_SUFFIX",
    "KIND_EMBEDDINGS",
    "KIND_SCORES",
    "SCORES_SUFFIX",
    "BridgeError",
    "ClipBackend",
    "CstaBackend",
    "DecodeError",
    "FembFile",
    "FormatError",
    "MotionScoreBackend",
    "PixelProjectionBackend",
    "UsageError",
    "VideoReader",
    "WeightsError",
    "build_model",
    "checked_pool_indices",
    "embed_video",
    "encode_femb",
    "make_embed_backend",
    "make_score_backend",
    "parse_femb",
    "read_femb",
    "read_frames",
    "score_video",
    "serve",
    "write_embeddings",
    "write_femb",
    "write_scores",
]
