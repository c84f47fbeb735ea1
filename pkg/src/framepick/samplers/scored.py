"""Selection over externally produced per-frame importance scores."""

from __future__ import annotations

import numpy as np

from ..types import (
    SamplingConfig,
    ScoreVector,
    SelectionManifest,
    Strategy,
    VideoMeta,
    round_half_up,
)
from .common import config_params, require_strategy, subsample_center_of_bin
from .maxinfo import require_pool_alignment


def sample_scored(
    meta: VideoMeta, scores: ScoreVector, cfg: SamplingConfig
) -> SelectionManifest:
    """Keep the top score_fraction of pooled frames by score (floor of
    one frame; ties go to the lower frame index), then center-of-bin
    subsample to n_max if the cut still exceeds it."""
    require_strategy(cfg, Strategy.SCORED)
    require_pool_alignment(meta, scores.source_indices, cfg.pool_n)
    k_top = max(1, round_half_up(cfg.score_fraction * scores.n))
    # Stable argsort of negated scores: equal scores keep pool order,
    # which is frame-index order.
    order = np.argsort(-scores.scores, kind="stable")
    positions = sorted(int(p) for p in order[:k_top])
    if len(positions) > cfg.n_max:
        positions = subsample_center_of_bin(positions, cfg.n_max)
    indices = [scores.source_indices[p] for p in positions]
    return SelectionManifest.build(meta, Strategy.SCORED, config_params(cfg), indices)
