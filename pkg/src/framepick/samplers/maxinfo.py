"""Adaptive selection over frame embeddings: uniform pool, truncated
SVD, rectangular MaxVol, cap to n_max.

The expensive row selection does not depend on n_max, so it is exposed
as a separate stage (select_maxinfo_rows) that ablation runs compute
once per video and reuse across the n_max grid.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DegenerateInputError, ValidationError
from ..linalg import maxvol_rect, truncated_svd
from ..types import (
    EmbeddingMatrix,
    SamplingConfig,
    SelectionManifest,
    Strategy,
    VideoMeta,
)
from .common import (
    center_of_bin,
    config_params,
    require_strategy,
    subsample_center_of_bin,
    uniform_fps_indices,
)


def sample_uniform_pool(meta: VideoMeta, pool_n: int) -> list[int]:
    """The adaptive strategies' pre-pool: min(pool_n, frame_count)
    center-of-bin indices."""
    if pool_n < 1:
        raise ValidationError(f"pool_n must be >= 1, got {pool_n}")
    return center_of_bin(meta.frame_count, min(pool_n, meta.frame_count))


def require_pool_alignment(
    meta: VideoMeta, source_indices: tuple[int, ...], pool_n: int
) -> None:
    """Adaptive inputs must cover exactly the uniform pool; a partial or
    shifted row set would silently misattribute features to frames."""
    expected = tuple(sample_uniform_pool(meta, pool_n))
    if tuple(source_indices) != expected:
        raise ValidationError(
            f"source_indices do not match the uniform pool for "
            f"{meta.video_id!r}: got {len(source_indices)} indices, "
            f"expected {len(expected)} starting at {expected[0]}"
        )


@dataclass(frozen=True)
class MaxInfoRows:
    """n_max-independent stage result: positions into the pool, or a
    fallback marker when the embeddings had no usable subspace."""

    pool_positions: tuple[int, ...]
    fallback: bool


def select_maxinfo_rows(
    meta: VideoMeta, emb: EmbeddingMatrix, cfg: SamplingConfig
) -> MaxInfoRows:
    require_strategy(cfg, Strategy.MAXINFO)
    require_pool_alignment(meta, emb.source_indices, cfg.pool_n)
    try:
        svd = truncated_svd(emb.data, cfg.svd_energy)
        qs = svd.reduced()
        selection = maxvol_rect(
            qs,
            cfg.maxvol_delta,
            cfg.rect_growth_delta,
            cap=cfg.rect_cap_factor * svd.rank_cut,
        )
    except DegenerateInputError:
        return MaxInfoRows(pool_positions=(), fallback=True)
    return MaxInfoRows(pool_positions=selection.row_indices, fallback=False)


def finish_maxinfo(
    meta: VideoMeta,
    emb: EmbeddingMatrix,
    rows: MaxInfoRows,
    cfg: SamplingConfig,
) -> SelectionManifest:
    """Apply the n_max cap and build the manifest. Fallback rows yield
    the uniform-FPS selection for the same rate/caps budget."""
    params = dict(config_params(cfg))
    params["fallback"] = rows.fallback
    if rows.fallback:
        indices = uniform_fps_indices(meta, cfg)
    else:
        positions = list(rows.pool_positions)
        if len(positions) > cfg.n_max:
            positions = subsample_center_of_bin(positions, cfg.n_max)
        indices = [emb.source_indices[p] for p in positions]
    return SelectionManifest.build(meta, Strategy.MAXINFO, params, indices)


def sample_maxinfo(
    meta: VideoMeta, emb: EmbeddingMatrix, cfg: SamplingConfig
) -> SelectionManifest:
    return finish_maxinfo(meta, emb, select_maxinfo_rows(meta, emb, cfg), cfg)
