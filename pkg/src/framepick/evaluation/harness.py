"""Cell evaluation and the n_max ablation driver."""

from __future__ import annotations

from collections.abc import Callable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from ..errors import AdapterTimeout, FramepickError, ValidationError
from ..samplers import (
    finish_maxinfo,
    sample_scored,
    sample_single,
    sample_uniform_fps,
    select_maxinfo_rows,
)
from ..types import (
    EmbeddingMatrix,
    SamplingConfig,
    ScoreVector,
    SelectionManifest,
    Strategy,
    VideoMeta,
)
from .adapter import DEFAULT_MAX_IN_FLIGHT, AdapterClient
from .adjudicate import parse_answer
from .dataset import QaItem
from .prompts import build_prompt
from .reporting import AccuracyReport, EvalRecord, aggregate

ImagePathsFor = Callable[[QaItem], Sequence[str]]
ManifestImagePaths = Callable[[QaItem, SelectionManifest], Sequence[str]]


def evaluate_cell(
    items: Sequence[QaItem],
    client: AdapterClient,
    *,
    strategy: str,
    n_max: int,
    image_paths_for: ImagePathsFor,
    model: str,
    workers: int = DEFAULT_MAX_IN_FLIGHT,
) -> tuple[list[EvalRecord], AccuracyReport]:
    """Query the adapter for every item and adjudicate.

    Requests run concurrently (the client bounds what is actually in
    flight) but records come back in dataset order, so reruns against a
    deterministic adapter are byte-identical. Timeouts become unparsed
    records with cause "timeout"; protocol violations abort the cell.
    """
    if not items:
        raise ValidationError("cannot evaluate an empty item list")

    def one(item: QaItem) -> EvalRecord:
        prompt = build_prompt(item)
        paths = [str(p) for p in image_paths_for(item)]
        cause = None
        try:
            raw = client.query(item.item_id, prompt, paths)
        except AdapterTimeout:
            raw = ""
            cause = "timeout"
        label = parse_answer(raw, len(item.options)) if cause is None else None
        return EvalRecord(
            item_id=item.item_id,
            strategy=strategy,
            n_max=n_max,
            task_tag=item.task_tag,
            raw_response=raw,
            parsed_label=label,
            correct=label == item.answer_label,
            cause=cause,
        )

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        records = list(pool.map(one, items))
    return records, aggregate(records, model)


def build_manifests(
    metas: Mapping[str, VideoMeta],
    cfg: SamplingConfig,
    *,
    embeddings: Mapping[str, EmbeddingMatrix] | None = None,
    scores: Mapping[str, ScoreVector] | None = None,
) -> dict[str, SelectionManifest]:
    """One manifest per video for cfg.strategy at cfg.n_max."""
    out: dict[str, SelectionManifest] = {}
    for video_id, meta in metas.items():
        if cfg.strategy is Strategy.UNIFORM_FPS:
            out[video_id] = sample_uniform_fps(meta, cfg)
        elif cfg.strategy in (Strategy.SINGLE_FIRST, Strategy.SINGLE_CENTER):
            out[video_id] = sample_single(meta, cfg.strategy)
        elif cfg.strategy is Strategy.MAXINFO:
            if embeddings is None or video_id not in embeddings:
                raise ValidationError(f"no embeddings supplied for {video_id!r}")
            rows = select_maxinfo_rows(meta, embeddings[video_id], cfg)
            out[video_id] = finish_maxinfo(meta, embeddings[video_id], rows, cfg)
        else:
            if scores is None or video_id not in scores:
                raise ValidationError(f"no scores supplied for {video_id!r}")
            out[video_id] = sample_scored(meta, scores[video_id], cfg)
    return out


@dataclass(frozen=True)
class CellResult:
    """Outcome of one grid point; error is set when the cell failed and
    the other fields are then empty."""

    n_max: int
    records: tuple[EvalRecord, ...]
    report: AccuracyReport | None
    error: str | None


def validate_grid(grid: Sequence[int]) -> list[int]:
    grid = [int(g) for g in grid]
    if not grid:
        raise ValidationError("n_max grid must be non-empty")
    if any(g < 1 for g in grid):
        raise ValidationError(f"n_max grid values must be >= 1: {grid}")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError(
            f"n_max grid must be strictly ascending with no duplicates: {grid}"
        )
    return grid


def run_ablation(
    items: Sequence[QaItem],
    metas: Mapping[str, VideoMeta],
    cfg: SamplingConfig,
    grid: Sequence[int],
    adapter_factory: Callable[[], AdapterClient],
    *,
    image_paths_for: ManifestImagePaths,
    model: str,
    embeddings: Mapping[str, EmbeddingMatrix] | None = None,
    scores: Mapping[str, ScoreVector] | None = None,
    workers: int = DEFAULT_MAX_IN_FLIGHT,
) -> list[CellResult]:
    """Evaluate one strategy across the n_max grid.

    The n_max-independent part of MaxInfo (SVD + row selection) runs
    once per video and is reused at every grid point. A failing cell is
    reported in its CellResult; remaining cells still run.
    """
    grid = validate_grid(grid)
    if grid[0] < cfg.n_min:
        raise ValidationError(
            f"grid point {grid[0]} is below n_min={cfg.n_min}"
        )
    if not items:
        raise ValidationError("cannot evaluate an empty item list")
    missing = sorted({i.video_id for i in items} - set(metas))
    if missing:
        raise ValidationError(f"items reference videos without metadata: {missing}")

    maxinfo_rows = {}
    if cfg.strategy is Strategy.MAXINFO:
        if embeddings is None:
            raise ValidationError("MaxInfo ablation requires embeddings")
        for video_id, meta in metas.items():
            if video_id not in embeddings:
                raise ValidationError(f"no embeddings supplied for {video_id!r}")
            maxinfo_rows[video_id] = select_maxinfo_rows(
                meta, embeddings[video_id], cfg
            )

    results: list[CellResult] = []
    for n_max in grid:
        cell_cfg = replace(cfg, n_max=n_max)
        try:
            if cfg.strategy is Strategy.MAXINFO:
                assert embeddings is not None
                manifests = {
                    video_id: finish_maxinfo(
                        metas[video_id],
                        embeddings[video_id],
                        maxinfo_rows[video_id],
                        cell_cfg,
                    )
                    for video_id in metas
                }
            else:
                manifests = build_manifests(
                    metas, cell_cfg, embeddings=embeddings, scores=scores
                )
        except FramepickError as exc:
            results.append(CellResult(n_max, (), None, str(exc)))
            continue
        # Spawn failures propagate: they would repeat identically at
        # every grid point, unlike per-cell evaluation failures.
        client = adapter_factory()
        client.start()
        try:
            records, report = evaluate_cell(
                items,
                client,
                strategy=cfg.strategy.value,
                n_max=n_max,
                image_paths_for=lambda item: image_paths_for(
                    item, manifests[item.video_id]
                ),
                model=model,
                workers=workers,
            )
            results.append(CellResult(n_max, tuple(records), report, None))
        except FramepickError as exc:
            results.append(CellResult(n_max, (), None, str(exc)))
        finally:
            client.close()
    return results
