"""Uniform-FPS and single-frame selection."""

from __future__ import annotations

from ..errors import ValidationError
from ..types import SamplingConfig, SelectionManifest, Strategy, VideoMeta
from .common import config_params, require_strategy, uniform_fps_indices


def sample_uniform_fps(meta: VideoMeta, cfg: SamplingConfig) -> SelectionManifest:
    """Select clamp(round(duration_s * rate_r), n_min, n_max) frames at
    center-of-bin positions (further clamped to the frame count)."""
    require_strategy(cfg, Strategy.UNIFORM_FPS)
    return SelectionManifest.build(
        meta, Strategy.UNIFORM_FPS, config_params(cfg), uniform_fps_indices(meta, cfg)
    )


def sample_single(meta: VideoMeta, which: Strategy) -> SelectionManifest:
    """Select one frame: index 0 (SINGLE_FIRST) or floor(frame_count / 2)
    (SINGLE_CENTER, the later of the two central frames when even)."""
    if which is Strategy.SINGLE_FIRST:
        index = 0
    elif which is Strategy.SINGLE_CENTER:
        index = meta.frame_count // 2
    else:
        raise ValidationError(
            f"sample_single takes SINGLE_FIRST or SINGLE_CENTER, got {which.value!r}"
        )
    return SelectionManifest.build(meta, which, {}, [index])
