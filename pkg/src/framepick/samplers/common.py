"""Shared selection primitives: center-of-bin placement and the
uniform-FPS frame budget."""

from __future__ import annotations

from collections.abc import Sequence

from ..errors import ValidationError
from ..types import SamplingConfig, VideoMeta, round_half_up


def center_of_bin(total: int, k: int) -> list[int]:
    """k indices over [0, total): each bin of width total/k contributes
    its central position floor((i + 0.5) * total / k).

    Exact integer arithmetic; strictly increasing whenever k <= total.
    """
    if not 1 <= k <= total:
        raise ValidationError(f"need 1 <= k <= total, got k={k}, total={total}")
    return [(2 * i + 1) * total // (2 * k) for i in range(k)]


def subsample_center_of_bin(values: Sequence[int], k: int) -> list[int]:
    """Center-of-bin subsample of an already-sorted sequence."""
    return [values[pos] for pos in center_of_bin(len(values), k)]


def uniform_fps_budget(meta: VideoMeta, cfg: SamplingConfig) -> int:
    """Frame budget k = clamp(round(duration * rate), n_min, n_max),
    never exceeding the frame count."""
    k = round_half_up(meta.duration_s * cfg.rate_r)
    k = min(max(k, cfg.n_min), cfg.n_max)
    return min(k, meta.frame_count)


def uniform_fps_indices(meta: VideoMeta, cfg: SamplingConfig) -> list[int]:
    return center_of_bin(meta.frame_count, uniform_fps_budget(meta, cfg))


def config_params(cfg: SamplingConfig) -> dict[str, object]:
    """Parameter snapshot recorded in every manifest (strategy excluded;
    it is a top-level manifest field)."""
    return {
        "rate_r": float(cfg.rate_r),
        "n_min": int(cfg.n_min),
        "n_max": int(cfg.n_max),
        "pool_n": int(cfg.pool_n),
        "svd_energy": float(cfg.svd_energy),
        "maxvol_delta": float(cfg.maxvol_delta),
        "rect_growth_delta": float(cfg.rect_growth_delta),
        "rect_cap_factor": int(cfg.rect_cap_factor),
        "score_fraction": float(cfg.score_fraction),
    }


def require_strategy(cfg: SamplingConfig, expected) -> None:
    if cfg.strategy is not expected:
        raise ValidationError(
            f"config strategy is {cfg.strategy.value!r}, expected {expected.value!r}"
        )
