"""Deterministic frame sampling and frame-accurate video QA evaluation.

Sampling strategies (uniform FPS budget, single frame, SVD+MaxVol
information cover, score-ranked) all emit SelectionManifest objects
with exact integer frame indices and millisecond timestamps, so the
same video and config always reproduce byte-identical artifacts.
"""

from framepick.errors import (
    AdapterError,
    AdapterTimeout,
    DatasetError,
    DecodeError,
    DegenerateInputError,
    FembFormatError,
    FramepickError,
    ManifestError,
    ProtocolError,
    ValidationError,
)
from framepick.femb import (
    EMBEDDINGS_SUFFIX,
    SCORES_SUFFIX,
    parse_femb,
    read_femb,
    write_femb,
)
from framepick.frames import extract_frames, frame_path
from framepick.linalg import (
    MaxVolSelection,
    SvdResult,
    full_svd,
    maxvol_rect,
    maxvol_square,
    truncated_svd,
)
from framepick.samplers import (
    sample_maxinfo,
    sample_scored,
    sample_single,
    sample_uniform_fps,
)
from framepick.types import (
    MANIFEST_SUFFIX,
    EmbeddingMatrix,
    SamplingConfig,
    ScoreVector,
    SelectionManifest,
    Strategy,
    VideoMeta,
    parse_manifest,
)

__version__ = "0.1.0"

__all__ = [
    "AdapterError",
    "AdapterTimeout",
    "DatasetError",
    "DecodeError",
    "DegenerateInputError",
    "EMBEDDINGS_SUFFIX",
    "EmbeddingMatrix",
    "FembFormatError",
    "FramepickError",
    "MANIFEST_SUFFIX",
    "ManifestError",
    "MaxVolSelection",
    "ProtocolError",
    "SCORES_SUFFIX",
    "SamplingConfig",
    "ScoreVector",
    "SelectionManifest",
    "Strategy",
    "SvdResult",
    "ValidationError",
    "VideoMeta",
    "extract_frames",
    "frame_path",
    "full_svd",
    "maxvol_rect",
    "maxvol_square",
    "parse_femb",
    "parse_manifest",
    "read_femb",
    "sample_maxinfo",
    "sample_scored",
    "sample_single",
    "sample_uniform_fps",
    "truncated_svd",
    "write_femb",
    "__version__",
]
