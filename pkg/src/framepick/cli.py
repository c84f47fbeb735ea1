"""Command-line front end: sample manifests, evaluate through an
adapter, and merge run reports into comparison tables.

Exit codes: 0 success, 1 validation failure, 2 adapter or protocol
failure, 3 I/O failure. Every command is deterministic: identical
inputs and flags reproduce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import (
    CACHE_ENV,
    SAMPLING_KEYS,
    load_config_file,
    resolve_settings,
)
from .errors import FramepickError, IoError, ValidationError
from .evaluation import (
    AdapterClient,
    CellResult,
    comparison_tables,
    evaluate_cell,
    load_dataset,
    merge_reports,
    read_report_csv,
    read_reported_csv,
    run_ablation,
    write_records,
    write_report,
)
from .evaluation.reporting import OVERALL_TAG, AccuracyReport, EvalRecord
from .femb import EMBEDDINGS_SUFFIX, SCORES_SUFFIX, read_femb
from .frames import frame_path
from .samplers import (
    sample_maxinfo,
    sample_scored,
    sample_single,
    sample_uniform_fps,
)
from .types import (
    MANIFEST_SUFFIX,
    EmbeddingMatrix,
    SamplingConfig,
    ScoreVector,
    SelectionManifest,
    Strategy,
    VideoMeta,
    derive_frame_count,
    parse_manifest,
)

STRATEGY_FLAGS = {
    "fps": Strategy.UNIFORM_FPS,
    "first": Strategy.SINGLE_FIRST,
    "center": Strategy.SINGLE_CENTER,
    "maxinfo": Strategy.MAXINFO,
    "scored": Strategy.SCORED,
}
ADAPTIVE = (Strategy.MAXINFO, Strategy.SCORED)

# Cell label for the single-frame strategies, whose manifests carry no
# frame budget: they always deliver exactly one frame.
SINGLE_FRAME_CELL = 1


class _Parser(argparse.ArgumentParser):
    """argparse whose usage errors flow through the exit-code table
    instead of argparse's built-in exit(2)."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ValidationError(f"{self.prog}: {message}")


def _add_config_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", default=None, help="settings file (key = value lines)")
    sub.add_argument("--rate", type=float, default=None, help="frames per second budget")
    sub.add_argument("--n-min", type=int, default=None, help="minimum frames")
    sub.add_argument("--n-max", type=int, default=None, help="maximum frames")
    sub.add_argument("--pool", type=int, default=None, help="candidate pool size")
    sub.add_argument(
        "--fraction", type=float, default=None, help="score cut fraction (scored)"
    )


def _settings(args: argparse.Namespace) -> dict[str, object]:
    overrides: dict[str, object | None] = {
        "rate_r": args.rate,
        "n_min": args.n_min,
        "n_max": args.n_max,
        "pool_n": args.pool,
        "score_fraction": args.fraction,
    }
    for key, attr in (
        ("timeout_s", "timeout_s"),
        ("in_flight", "in_flight"),
        ("jobs", "jobs"),
    ):
        if hasattr(args, attr):
            overrides[key] = getattr(args, attr)
    return resolve_settings(load_config_file(args.config), overrides)


def _sampling_config(strategy: Strategy, settings: dict[str, object]) -> SamplingConfig:
    return SamplingConfig(
        strategy=strategy, **{key: settings[key] for key in SAMPLING_KEYS}
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="framepick", description=__doc__)
    commands = parser.add_subparsers(dest="command", metavar="command")

    sample = commands.add_parser(
        "sample", help="write one selection manifest per video", parents=[]
    )
    sample.add_argument(
        "--strategy", required=True, choices=sorted(STRATEGY_FLAGS)
    )
    sample.add_argument(
        "--videos",
        required=True,
        help="JSON-lines video metadata (video_id plus two of "
        "frame_count/native_fps/duration_s)",
    )
    sample.add_argument(
        "--femb-dir",
        default=None,
        help="directory of <video_id>.emb.femb / .score.femb files "
        "(maxinfo and scored only)",
    )
    sample.add_argument("--out", required=True, help="output directory")
    sample.add_argument("--jobs", type=int, default=None, help="parallel videos")
    _add_config_flags(sample)
    sample.set_defaults(func=cmd_sample)

    evaluate = commands.add_parser(
        "evaluate", help="run a QA dataset through an adapter and score it"
    )
    evaluate.add_argument("--dataset", required=True, help="JSON-lines QA items")
    evaluate.add_argument("--out", required=True, help="output directory")
    evaluate.add_argument("--model", default="model", help="model name for reports")
    adapter = evaluate.add_mutually_exclusive_group(required=True)
    adapter.add_argument(
        "--adapter-cmd", default=None, help="adapter command line (shell words)"
    )
    adapter.add_argument(
        "--mock",
        default=None,
        metavar="MODE",
        help="built-in mock adapter mode: const:<L>, key:<path>, or frames:<k>",
    )
    evaluate.add_argument(
        "--mock-key", default=None, help="answer key file for --mock frames:<k>"
    )
    evaluate.add_argument(
        "--manifests",
        default=None,
        help="directory of prebuilt <video_id>.manifest.json (one cell)",
    )
    evaluate.add_argument(
        "--strategy", choices=sorted(STRATEGY_FLAGS), default=None
    )
    evaluate.add_argument("--videos", default=None, help="video metadata JSON-lines")
    evaluate.add_argument("--femb-dir", default=None)
    evaluate.add_argument(
        "--ablate",
        default=None,
        metavar="N1,N2,...",
        help="comma-separated ascending n_max grid (needs --strategy/--videos)",
    )
    evaluate.add_argument(
        "--frames-dir",
        default=None,
        help=f"frame image cache (default: ${CACHE_ENV} or <out>/frames)",
    )
    evaluate.add_argument("--timeout-s", type=float, default=None)
    evaluate.add_argument("--in-flight", type=int, default=None)
    _add_config_flags(evaluate)
    evaluate.set_defaults(func=cmd_evaluate)

    report = commands.add_parser(
        "report", help="merge run reports into comparison tables"
    )
    report.add_argument(
        "--runs", required=True, nargs="+", help="report.csv files to merge"
    )
    report.add_argument(
        "--reported",
        default=None,
        help="literature scores CSV (model,task_tag,accuracy in percent)",
    )
    report.add_argument("--out", default=None, help="directory for comparison files")
    report.set_defaults(func=cmd_report)
    return parser


def _load_videos(path: str | Path) -> dict[str, VideoMeta]:
    path = Path(path)
    if not path.is_file():
        raise IoError(f"videos file not found: {path}")
    allowed = {"video_id", "frame_count", "native_fps", "duration_s"}
    metas: dict[str, VideoMeta] = {}
    for line_no, line in enumerate(
        path.read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: line {line_no}: invalid JSON: {exc}")
        if not isinstance(doc, dict) or not isinstance(doc.get("video_id"), str):
            raise ValidationError(
                f"{path}: line {line_no}: expected an object with video_id"
            )
        unknown = sorted(set(doc) - allowed)
        if unknown:
            raise ValidationError(f"{path}: line {line_no}: unknown fields {unknown}")
        video_id = doc["video_id"]
        if video_id in metas:
            raise ValidationError(
                f"{path}: line {line_no}: duplicate video_id {video_id!r}"
            )
        try:
            metas[video_id] = derive_frame_count(
                video_id,
                frame_count=doc.get("frame_count"),
                native_fps=doc.get("native_fps"),
                duration_s=doc.get("duration_s"),
            )
        except FramepickError as exc:
            raise ValidationError(f"{path}: line {line_no}: {exc}") from None
    if not metas:
        raise ValidationError(f"{path}: no videos")
    return metas


def _read_video_femb(
    femb_dir: Path, video_id: str, strategy: Strategy
) -> EmbeddingMatrix | ScoreVector:
    suffix = EMBEDDINGS_SUFFIX if strategy is Strategy.MAXINFO else SCORES_SUFFIX
    want = EmbeddingMatrix if strategy is Strategy.MAXINFO else ScoreVector
    path = femb_dir / f"{video_id}{suffix}"
    if not path.is_file():
        raise IoError(f"missing {path.name} in {femb_dir}")
    data = read_femb(path)
    if not isinstance(data, want):
        raise ValidationError(f"{path}: expected {want.__name__} content")
    return data


def _require_adaptive_inputs(strategy: Strategy, femb_dir: str | None) -> Path | None:
    if strategy in ADAPTIVE:
        if not femb_dir:
            raise ValidationError(
                f"--femb-dir is required for --strategy {strategy.value}"
            )
        return Path(femb_dir)
    if femb_dir:
        raise ValidationError("--femb-dir only applies to maxinfo and scored")
    return None


def cmd_sample(args: argparse.Namespace) -> int:
    settings = _settings(args)
    strategy = STRATEGY_FLAGS[args.strategy]
    femb_dir = _require_adaptive_inputs(strategy, args.femb_dir)
    cfg = _sampling_config(strategy, settings)
    metas = _load_videos(args.videos)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    def one(meta: VideoMeta) -> tuple[str, FramepickError | None]:
        try:
            if strategy is Strategy.UNIFORM_FPS:
                manifest = sample_uniform_fps(meta, cfg)
            elif strategy in (Strategy.SINGLE_FIRST, Strategy.SINGLE_CENTER):
                manifest = sample_single(meta, strategy)
            elif strategy is Strategy.MAXINFO:
                assert femb_dir is not None
                emb = _read_video_femb(femb_dir, meta.video_id, strategy)
                manifest = sample_maxinfo(meta, emb, cfg)
            else:
                assert femb_dir is not None
                scores = _read_video_femb(femb_dir, meta.video_id, strategy)
                manifest = sample_scored(meta, scores, cfg)
            target = out_dir / f"{meta.video_id}{MANIFEST_SUFFIX}"
            try:
                target.write_bytes(manifest.serialize())
            except OSError as exc:
                raise IoError(f"cannot write {target}: {exc}") from exc
        except FramepickError as exc:
            return meta.video_id, exc
        return meta.video_id, None

    jobs = max(1, int(settings["jobs"]))
    ordered = [metas[video_id] for video_id in sorted(metas)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        outcomes = list(pool.map(one, ordered))

    failures = [(video_id, exc) for video_id, exc in outcomes if exc is not None]
    written = len(outcomes) - len(failures)
    print(f"wrote {written} of {len(outcomes)} manifests to {out_dir}")
    if failures:
        for video_id, exc in failures:
            print(f"error: {video_id}: {exc}", file=sys.stderr)
        return max(exc.exit_code for _, exc in failures)
    return 0


def _parse_grid(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValidationError(f"--ablate must be comma-separated integers: {text!r}")


def _adapter_cmd(args: argparse.Namespace) -> list[str]:
    if args.mock is not None:
        cmd = [
            sys.executable,
            "-m",
            "framepick.evaluation.mock_adapter",
            "--mode",
            args.mock,
        ]
        if args.mock_key:
            cmd += ["--key", args.mock_key]
        return cmd
    if args.mock_key:
        raise ValidationError("--mock-key only applies with --mock")
    cmd = shlex.split(args.adapter_cmd)
    if not cmd:
        raise ValidationError("--adapter-cmd must not be empty")
    return cmd


def _frame_paths(frames_dir: Path, manifest: SelectionManifest) -> list[str]:
    return [
        str(frame_path(frames_dir, manifest.video_id, index))
        for index in manifest.frame_indices
    ]


def _load_manifest_dir(path: str | Path) -> dict[str, SelectionManifest]:
    path = Path(path)
    if not path.is_dir():
        raise IoError(f"manifest directory not found: {path}")
    manifests: dict[str, SelectionManifest] = {}
    for file in sorted(path.glob(f"*{MANIFEST_SUFFIX}")):
        manifest = parse_manifest(file.read_text(encoding="utf-8"))
        manifests[manifest.video_id] = manifest
    if not manifests:
        raise ValidationError(f"no *{MANIFEST_SUFFIX} files in {path}")
    return manifests


def _write_cell(
    out_dir: Path,
    model: str,
    strategy_value: str,
    n_max: int,
    records: list[EvalRecord],
    report: AccuracyReport,
) -> Path:
    cell_dir = out_dir / model / strategy_value / str(n_max)
    cell_dir.mkdir(parents=True, exist_ok=True)
    write_records(records, cell_dir / "records.jsonl")
    write_report(report, cell_dir)
    return cell_dir


def _print_cell(report: AccuracyReport, strategy_value: str, n_max: int) -> None:
    for row in report.rows:
        if row.task_tag == OVERALL_TAG:
            print(
                f"{strategy_value} n_max={n_max}: "
                f"{row.correct}/{row.total} = {float(row.accuracy):.4f}"
            )


def cmd_evaluate(args: argparse.Namespace) -> int:
    settings = _settings(args)
    items = load_dataset(args.dataset)
    out_dir = Path(args.out)
    frames_dir = Path(
        args.frames_dir or os.environ.get(CACHE_ENV) or out_dir / "frames"
    )
    cmd = _adapter_cmd(args)
    timeout_s = float(settings["timeout_s"])
    in_flight = int(settings["in_flight"])

    def factory() -> AdapterClient:
        return AdapterClient(cmd, max_in_flight=in_flight, timeout_s=timeout_s)

    if args.manifests is not None:
        if args.ablate is not None:
            raise ValidationError(
                "--ablate rebuilds manifests per grid point; use "
                "--strategy/--videos instead of --manifests"
            )
        if args.strategy or args.videos or args.femb_dir:
            raise ValidationError(
                "--manifests and --strategy/--videos/--femb-dir are exclusive"
            )
        manifests = _load_manifest_dir(args.manifests)
        strategies = sorted({m.strategy.value for m in manifests.values()})
        if len(strategies) != 1:
            raise ValidationError(
                f"manifests mix strategies {strategies}; evaluate one cell at a time"
            )
        budgets = sorted(
            {int(m.params.get("n_max", SINGLE_FRAME_CELL)) for m in manifests.values()}
        )
        if len(budgets) != 1:
            raise ValidationError(
                f"manifests mix n_max budgets {budgets}; evaluate one cell at a time"
            )
        strategy_value, n_max = strategies[0], budgets[0]
        missing = sorted({i.video_id for i in items} - set(manifests))
        if missing:
            raise ValidationError(f"items reference videos without manifests: {missing}")
        client = factory()
        client.start()
        try:
            records, report = evaluate_cell(
                items,
                client,
                strategy=strategy_value,
                n_max=n_max,
                image_paths_for=lambda item: _frame_paths(
                    frames_dir, manifests[item.video_id]
                ),
                model=args.model,
                workers=in_flight,
            )
        finally:
            client.close()
        _write_cell(out_dir, args.model, strategy_value, n_max, records, report)
        _print_cell(report, strategy_value, n_max)
        return 0

    if not args.strategy or not args.videos:
        raise ValidationError(
            "evaluate needs either --manifests or both --strategy and --videos"
        )
    strategy = STRATEGY_FLAGS[args.strategy]
    femb_dir = _require_adaptive_inputs(strategy, args.femb_dir)
    cfg = _sampling_config(strategy, settings)
    metas = _load_videos(args.videos)
    embeddings = scores = None
    if strategy is Strategy.MAXINFO:
        embeddings = {
            video_id: _read_video_femb(femb_dir, video_id, strategy)
            for video_id in metas
        }
    elif strategy is Strategy.SCORED:
        scores = {
            video_id: _read_video_femb(femb_dir, video_id, strategy)
            for video_id in metas
        }
    grid = _parse_grid(args.ablate) if args.ablate else [cfg.n_max]
    cells = run_ablation(
        items,
        metas,
        cfg,
        grid,
        factory,
        image_paths_for=lambda item, manifest: _frame_paths(frames_dir, manifest),
        model=args.model,
        embeddings=embeddings,
        scores=scores,
        workers=in_flight,
    )
    failed: list[CellResult] = []
    for cell in cells:
        if cell.error is not None:
            failed.append(cell)
            print(f"error: n_max={cell.n_max}: {cell.error}", file=sys.stderr)
            continue
        assert cell.report is not None
        _write_cell(
            out_dir,
            args.model,
            strategy.value,
            cell.n_max,
            list(cell.records),
            cell.report,
        )
        _print_cell(cell.report, strategy.value, cell.n_max)
    return 1 if failed else 0


def cmd_report(args: argparse.Namespace) -> int:
    for run in args.runs:
        if not Path(run).is_file():
            raise IoError(f"run report not found: {run}")
    merged = merge_reports(read_report_csv(run) for run in args.runs)
    reported = read_reported_csv(args.reported) if args.reported else None
    csv_text, md_text = comparison_tables(merged, reported)
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "comparison.csv").write_text(csv_text, encoding="utf-8")
        (out_dir / "comparison.md").write_text(md_text, encoding="utf-8")
    print(md_text, end="")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            parser.print_help()
            return 1
        return args.func(args)
    except FramepickError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
