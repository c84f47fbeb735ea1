"""Core domain types: video metadata, sampling configuration, selection
manifests, and per-frame feature containers.

All types are immutable after construction and validate their invariants
eagerly. Manifest serialization is canonical: a fixed top-level key order,
alphabetically sorted strategy parameters, UTF-8, no insignificant
whitespace, one trailing newline. Two structurally equal manifests
therefore serialize to identical bytes.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

import numpy as np

from .errors import ManifestError, ValidationError

MANIFEST_SUFFIX = ".manifest.json"


def round_half_up(x: float) -> int:
    """Round to the nearest integer; exact halves round up."""
    return math.floor(x + 0.5)


class Strategy(enum.Enum):
    UNIFORM_FPS = "uniform_fps"
    SINGLE_FIRST = "single_first"
    SINGLE_CENTER = "single_center"
    MAXINFO = "maxinfo"
    SCORED = "scored"


# Table-style display names used in reports (First, Center, FPS, MaxInfo, CSTA).
STRATEGY_DISPLAY = {
    Strategy.SINGLE_FIRST.value: "First",
    Strategy.SINGLE_CENTER.value: "Center",
    Strategy.UNIFORM_FPS.value: "FPS",
    Strategy.MAXINFO.value: "MaxInfo",
    Strategy.SCORED.value: "CSTA",
}


@dataclass(frozen=True)
class VideoMeta:
    """Identifies a video and its 0-based frame-index space."""

    video_id: str
    frame_count: int
    native_fps: float
    duration_s: float

    def __post_init__(self) -> None:
        if not self.video_id:
            raise ValidationError("video_id must be a non-empty string")
        if self.frame_count < 1:
            raise ValidationError(
                f"frame_count must be >= 1, got {self.frame_count}"
            )
        if not (self.native_fps > 0 and math.isfinite(self.native_fps)):
            raise ValidationError(f"native_fps must be > 0, got {self.native_fps}")
        if not (self.duration_s > 0 and math.isfinite(self.duration_s)):
            raise ValidationError(f"duration_s must be > 0, got {self.duration_s}")
        expected = round_half_up(self.native_fps * self.duration_s)
        if abs(self.frame_count - expected) > 1:
            raise ValidationError(
                f"inconsistent video metadata for {self.video_id!r}: "
                f"frame_count={self.frame_count} but fps*duration rounds to "
                f"{expected} (tolerance is 1 frame)"
            )


def derive_frame_count(
    video_id: str,
    frame_count: int | None = None,
    native_fps: float | None = None,
    duration_s: float | None = None,
) -> VideoMeta:
    """Complete a partial metadata triple into a validated VideoMeta.

    At least two of (frame_count, native_fps, duration_s) must be given;
    the missing one is derived. Supplying all three checks the +/-1 frame
    consistency tolerance.
    """
    known = sum(v is not None for v in (frame_count, native_fps, duration_s))
    if known < 2:
        raise ValidationError(
            f"video {video_id!r}: need at least two of "
            "frame_count/native_fps/duration_s"
        )
    if frame_count is None:
        assert native_fps is not None and duration_s is not None
        frame_count = round_half_up(native_fps * duration_s)
    elif native_fps is None:
        assert duration_s is not None
        native_fps = frame_count / duration_s
    elif duration_s is None:
        duration_s = frame_count / native_fps
    return VideoMeta(
        video_id=video_id,
        frame_count=frame_count,
        native_fps=native_fps,
        duration_s=duration_s,
    )


@dataclass(frozen=True)
class SamplingConfig:
    """Parameters shared by the sampling strategies.

    Defaults reproduce the benchmark configuration FPS:2:4:96 with a
    1000-frame pool for the adaptive strategies and a 15% score cut.
    """

    strategy: Strategy
    rate_r: float = 2.0
    n_min: int = 4
    n_max: int = 96
    pool_n: int = 1000
    svd_energy: float = 0.90
    maxvol_delta: float = 0.01
    rect_growth_delta: float = 0.05
    rect_cap_factor: int = 2
    score_fraction: float = 0.15

    def __post_init__(self) -> None:
        if not isinstance(self.strategy, Strategy):
            raise ValidationError(f"unknown strategy {self.strategy!r}")
        if not self.rate_r > 0:
            raise ValidationError(f"rate_r must be > 0, got {self.rate_r}")
        if self.n_min < 1 or self.n_max < 1:
            raise ValidationError("n_min and n_max must be >= 1")
        if self.n_min > self.n_max:
            raise ValidationError(
                f"n_min ({self.n_min}) must not exceed n_max ({self.n_max})"
            )
        if self.pool_n < 1:
            raise ValidationError(f"pool_n must be >= 1, got {self.pool_n}")
        if not 0 < self.svd_energy <= 1:
            raise ValidationError(
                f"svd_energy must be in (0, 1], got {self.svd_energy}"
            )
        if not self.maxvol_delta > 0:
            raise ValidationError(
                f"maxvol_delta must be > 0, got {self.maxvol_delta}"
            )
        if self.rect_growth_delta < 0:
            raise ValidationError(
                f"rect_growth_delta must be >= 0, got {self.rect_growth_delta}"
            )
        if self.rect_cap_factor < 1:
            raise ValidationError(
                f"rect_cap_factor must be >= 1, got {self.rect_cap_factor}"
            )
        if not 0 < self.score_fraction <= 1:
            raise ValidationError(
                f"score_fraction must be in (0, 1], got {self.score_fraction}"
            )


def timestamps_ms_for(indices: Iterable[int], native_fps: float) -> tuple[int, ...]:
    """Millisecond timestamps for frame indices, rounded half-up."""
    return tuple(round_half_up(1000.0 * i / native_fps) for i in indices)


# Fixed top-level key order of the canonical manifest document.
_MANIFEST_KEYS = (
    "video_id",
    "strategy",
    "frame_count",
    "native_fps",
    "params",
    "frame_indices",
    "timestamps_ms",
)

_PARAM_SCALARS = (bool, int, float, str)


@dataclass(frozen=True)
class SelectionManifest:
    """Deterministic output of a sampling strategy for one video."""

    video_id: str
    strategy: Strategy
    frame_count: int
    native_fps: float
    params: Mapping[str, Any] = field(default_factory=dict)
    frame_indices: tuple[int, ...] = ()
    timestamps_ms: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "frame_indices", tuple(self.frame_indices))
        object.__setattr__(self, "timestamps_ms", tuple(self.timestamps_ms))
        object.__setattr__(self, "params", dict(self.params))
        if not self.video_id:
            raise ManifestError("video_id must be non-empty")
        if self.frame_count < 1:
            raise ManifestError(f"frame_count must be >= 1, got {self.frame_count}")
        if not (self.native_fps > 0 and math.isfinite(self.native_fps)):
            raise ManifestError(f"native_fps must be > 0, got {self.native_fps}")
        for key, value in self.params.items():
            if not isinstance(key, str) or not isinstance(value, _PARAM_SCALARS):
                raise ManifestError(f"param {key!r} must be a JSON scalar")
        n = len(self.frame_indices)
        if n < 1:
            raise ManifestError("manifest must select at least one frame")
        n_max = self.params.get("n_max")
        if isinstance(n_max, int) and n > n_max:
            raise ManifestError(f"{n} frames selected but n_max={n_max}")
        prev = -1
        for idx in self.frame_indices:
            if not isinstance(idx, int):
                raise ManifestError(f"frame index {idx!r} is not an integer")
            if idx <= prev:
                raise ManifestError(
                    f"frame_indices not strictly increasing at {idx}"
                )
            if not 0 <= idx < self.frame_count:
                raise ManifestError(
                    f"frame index {idx} out of range [0, {self.frame_count})"
                )
            prev = idx
        expected_ts = timestamps_ms_for(self.frame_indices, self.native_fps)
        if self.timestamps_ms != expected_ts:
            raise ManifestError(
                "timestamps_ms inconsistent with frame_indices and native_fps"
            )

    @classmethod
    def build(
        cls,
        meta: VideoMeta,
        strategy: Strategy,
        params: Mapping[str, Any],
        frame_indices: Iterable[int],
    ) -> "SelectionManifest":
        indices = tuple(int(i) for i in frame_indices)
        return cls(
            video_id=meta.video_id,
            strategy=strategy,
            frame_count=meta.frame_count,
            native_fps=meta.native_fps,
            params=dict(params),
            frame_indices=indices,
            timestamps_ms=timestamps_ms_for(indices, meta.native_fps),
        )

    def serialize(self) -> bytes:
        doc = {
            "video_id": self.video_id,
            "strategy": self.strategy.value,
            "frame_count": self.frame_count,
            "native_fps": float(self.native_fps),
            "params": {k: self.params[k] for k in sorted(self.params)},
            "frame_indices": list(self.frame_indices),
            "timestamps_ms": list(self.timestamps_ms),
        }
        text = json.dumps(
            doc, ensure_ascii=False, separators=(",", ":"), allow_nan=False
        )
        return (text + "\n").encode("utf-8")


def parse_manifest(data: bytes | str) -> SelectionManifest:
    """Parse and fully validate a canonical manifest document."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ManifestError(f"manifest is not valid UTF-8: {exc}") from exc
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ManifestError(
            f"line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise ManifestError("manifest root must be a JSON object")
    missing = [k for k in _MANIFEST_KEYS if k not in doc]
    if missing:
        raise ManifestError(f"missing field(s): {', '.join(missing)}")
    extra = [k for k in doc if k not in _MANIFEST_KEYS]
    if extra:
        raise ManifestError(f"unknown field(s): {', '.join(extra)}")
    try:
        strategy = Strategy(doc["strategy"])
    except ValueError as exc:
        raise ManifestError(f"field 'strategy': {exc}") from exc
    for key, want in (
        ("video_id", str),
        ("frame_count", int),
        ("params", dict),
        ("frame_indices", list),
        ("timestamps_ms", list),
    ):
        if not isinstance(doc[key], want):
            raise ManifestError(f"field {key!r} must be {want.__name__}")
    if not isinstance(doc["native_fps"], (int, float)) or isinstance(
        doc["native_fps"], bool
    ):
        raise ManifestError("field 'native_fps' must be a number")
    indices = doc["frame_indices"]
    timestamps = doc["timestamps_ms"]
    if any(not isinstance(i, int) or isinstance(i, bool) for i in indices):
        raise ManifestError("field 'frame_indices' must contain integers")
    if any(not isinstance(t, int) or isinstance(t, bool) for t in timestamps):
        raise ManifestError("field 'timestamps_ms' must contain integers")
    if len(indices) != len(timestamps):
        raise ManifestError("frame_indices and timestamps_ms lengths differ")
    return SelectionManifest(
        video_id=doc["video_id"],
        strategy=strategy,
        frame_count=doc["frame_count"],
        native_fps=float(doc["native_fps"]),
        params=doc["params"],
        frame_indices=tuple(indices),
        timestamps_ms=tuple(timestamps),
    )


def _as_index_tuple(source_indices: Iterable[int]) -> tuple[int, ...]:
    indices = tuple(int(i) for i in source_indices)
    prev = -1
    for idx in indices:
        if idx < 0:
            raise ValidationError(f"frame index {idx} is negative")
        if idx <= prev:
            raise ValidationError("source_indices must be strictly increasing")
        prev = idx
    return indices


class EmbeddingMatrix:
    """n x d matrix of per-frame feature vectors, row i belonging to
    frame source_indices[i]. Stored as float32, the FEMB transport
    precision."""

    __slots__ = ("source_indices", "data")

    def __init__(self, source_indices: Iterable[int], data: np.ndarray) -> None:
        indices = _as_index_tuple(source_indices)
        arr = np.array(data, dtype=np.float32, copy=True)
        if arr.ndim != 2:
            raise ValidationError(f"data must be 2-D, got shape {arr.shape}")
        n, d = arr.shape
        if n < 1 or d < 1:
            raise ValidationError(f"data must be at least 1x1, got {n}x{d}")
        if n != len(indices):
            raise ValidationError(
                f"{len(indices)} source indices but {n} data rows"
            )
        if not np.isfinite(arr).all():
            raise ValidationError("embedding data contains NaN or Inf")
        arr.flags.writeable = False
        self.source_indices = indices
        self.data = arr

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmbeddingMatrix):
            return NotImplemented
        return self.source_indices == other.source_indices and np.array_equal(
            self.data, other.data
        )

    def __repr__(self) -> str:
        return f"EmbeddingMatrix(n={self.n}, d={self.d})"


class ScoreVector:
    """Per-frame importance scores aligned with source_indices."""

    __slots__ = ("source_indices", "scores")

    def __init__(self, source_indices: Iterable[int], scores: np.ndarray) -> None:
        indices = _as_index_tuple(source_indices)
        arr = np.array(scores, dtype=np.float32, copy=True).reshape(-1)
        if arr.size < 1:
            raise ValidationError("scores must be non-empty")
        if arr.size != len(indices):
            raise ValidationError(
                f"{len(indices)} source indices but {arr.size} scores"
            )
        if not np.isfinite(arr).all():
            raise ValidationError("scores contain NaN or Inf")
        arr.flags.writeable = False
        self.source_indices = indices
        self.scores = arr

    @property
    def n(self) -> int:
        return self.scores.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScoreVector):
            return NotImplemented
        return self.source_indices == other.source_indices and np.array_equal(
            self.scores, other.scores
        )

    def __repr__(self) -> str:
        return f"ScoreVector(n={self.n})"
