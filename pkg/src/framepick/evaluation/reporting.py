"""Adjudicated records, exact-rational accuracy aggregation, and the
report writers (CSV, markdown, JSON-lines records).

All output is byte-deterministic: fixed key and column orders, no
timestamps, accuracy printed as a fixed four-decimal string computed
from an exact Fraction.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import ValidationError
from ..types import STRATEGY_DISPLAY

OVERALL_TAG = "overall"

# Table 1 column order; also the canonical row order for strategies.
STRATEGY_COLUMNS = tuple(STRATEGY_DISPLAY)

CSV_HEADER = ("model", "strategy", "n_max", "task_tag", "correct", "total", "accuracy")


@dataclass(frozen=True)
class EvalRecord:
    """One adjudicated model response."""

    item_id: str
    strategy: str
    n_max: int
    task_tag: str
    raw_response: str
    parsed_label: str | None
    correct: bool
    cause: str | None = None

    def __post_init__(self) -> None:
        if self.parsed_label is None and self.correct:
            raise ValidationError(
                f"{self.item_id}: unparsed responses cannot be correct"
            )
        if self.task_tag == OVERALL_TAG:
            raise ValidationError(
                f"{self.item_id}: task_tag {OVERALL_TAG!r} is reserved"
            )

    def to_json_line(self) -> str:
        doc = {
            "item_id": self.item_id,
            "strategy": self.strategy,
            "n_max": self.n_max,
            "task_tag": self.task_tag,
            "raw_response": self.raw_response,
            "parsed_label": self.parsed_label,
            "correct": self.correct,
            "cause": self.cause,
        }
        return json.dumps(doc, ensure_ascii=False, separators=(",", ":"))


@dataclass(frozen=True)
class AccuracyRow:
    model: str
    strategy: str
    n_max: int
    task_tag: str
    correct: int
    total: int

    @property
    def accuracy(self) -> Fraction:
        return Fraction(self.correct, self.total)


def _strategy_rank(strategy: str) -> int:
    try:
        return STRATEGY_COLUMNS.index(strategy)
    except ValueError:
        return len(STRATEGY_COLUMNS)


def _row_key(row: AccuracyRow) -> tuple:
    return (
        row.model,
        _strategy_rank(row.strategy),
        row.strategy,
        row.n_max,
        row.task_tag != OVERALL_TAG,  # overall row leads its group
        row.task_tag,
    )


@dataclass(frozen=True)
class AccuracyReport:
    rows: tuple[AccuracyRow, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(sorted(self.rows, key=_row_key)))

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow(
                (
                    row.model,
                    row.strategy,
                    row.n_max,
                    row.task_tag,
                    row.correct,
                    row.total,
                    f"{float(row.accuracy):.4f}",
                )
            )
        return buffer.getvalue()

    def to_markdown(self) -> str:
        """One row per (model, n_max, task); strategy accuracies as
        columns in the fixed order First, Center, FPS, MaxInfo, CSTA."""
        cells: dict[tuple[str, int, str], dict[str, str]] = {}
        overall_first: dict[tuple[str, int, str], bool] = {}
        for row in self.rows:
            key = (row.model, row.n_max, row.task_tag)
            cells.setdefault(key, {})[row.strategy] = f"{float(row.accuracy):.4f}"
            overall_first[key] = row.task_tag != OVERALL_TAG
        header = ["Model", "n_max", "Task"] + [
            STRATEGY_DISPLAY[s] for s in STRATEGY_COLUMNS
        ]
        lines = [
            "| " + " | ".join(header) + " |",
            "|" + "|".join("---" for _ in header) + "|",
        ]
        for key in sorted(cells, key=lambda k: (k[0], k[1], overall_first[k], k[2])):
            model, n_max, task = key
            values = [
                cells[key].get(strategy, "-") for strategy in STRATEGY_COLUMNS
            ]
            lines.append(
                "| " + " | ".join([model, str(n_max), task] + values) + " |"
            )
        return "\n".join(lines) + "\n"


def aggregate(records: Sequence[EvalRecord], model: str) -> AccuracyReport:
    """Exact per-task and overall accuracy for each (strategy, n_max)
    cell present in the records."""
    if not records:
        raise ValidationError("cannot aggregate an empty record set")
    if not model:
        raise ValidationError("model name must be non-empty")
    tallies: dict[tuple[str, int, str], list[int]] = {}
    for record in records:
        for tag in (record.task_tag, OVERALL_TAG):
            tally = tallies.setdefault((record.strategy, record.n_max, tag), [0, 0])
            tally[0] += int(record.correct)
            tally[1] += 1
    rows = [
        AccuracyRow(model, strategy, n_max, tag, correct, total)
        for (strategy, n_max, tag), (correct, total) in tallies.items()
    ]
    return AccuracyReport(tuple(rows))


def merge_reports(reports: Iterable[AccuracyReport]) -> AccuracyReport:
    rows: list[AccuracyRow] = []
    for report in reports:
        rows.extend(report.rows)
    if not rows:
        raise ValidationError("cannot merge empty reports")
    return AccuracyReport(tuple(rows))


def read_report_csv(path: str | Path) -> AccuracyReport:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    try:
        header = tuple(next(reader))
    except StopIteration:
        raise ValidationError(f"{path}: empty report") from None
    if header != CSV_HEADER:
        raise ValidationError(
            f"{path}: header {header} does not match {CSV_HEADER}"
        )
    rows = []
    for line_no, parts in enumerate(reader, start=2):
        if not parts:
            continue
        try:
            model, strategy, n_max, task_tag, correct, total, _accuracy = parts
            rows.append(
                AccuracyRow(model, strategy, int(n_max), task_tag, int(correct), int(total))
            )
        except ValueError as exc:
            raise ValidationError(f"{path}: line {line_no}: {exc}") from None
    if not rows:
        raise ValidationError(f"{path}: no data rows")
    return AccuracyReport(tuple(rows))


def read_reported_csv(path: str | Path) -> dict[tuple[str, str], float]:
    """Literature scores: CSV with header model,task_tag,accuracy where
    accuracy is a percentage (e.g. 64.9)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    try:
        header = tuple(next(reader))
    except StopIteration:
        raise ValidationError(f"{path}: empty reported-scores file") from None
    if header != ("model", "task_tag", "accuracy"):
        raise ValidationError(
            f"{path}: header {header} must be ('model', 'task_tag', 'accuracy')"
        )
    out: dict[tuple[str, str], float] = {}
    for line_no, parts in enumerate(reader, start=2):
        if not parts:
            continue
        try:
            model, task_tag, accuracy = parts
            value = float(accuracy)
        except ValueError as exc:
            raise ValidationError(f"{path}: line {line_no}: {exc}") from None
        if (model, task_tag) in out:
            raise ValidationError(
                f"{path}: line {line_no}: duplicate entry for "
                f"({model!r}, {task_tag!r})"
            )
        out[(model, task_tag)] = value
    return out


def comparison_tables(
    report: AccuracyReport,
    reported: dict[tuple[str, str], float] | None = None,
) -> tuple[str, str]:
    """Render (csv_text, markdown_text) comparing strategies side by
    side, in percent. With literature scores, every measured cell shows
    its delta against the reported number for that (model, task)."""
    reported = reported or {}
    for row in report.rows:
        if row.strategy not in STRATEGY_COLUMNS:
            raise ValidationError(
                f"strategy {row.strategy!r} has no table column; "
                f"known strategies: {list(STRATEGY_COLUMNS)}"
            )
    seen: dict[tuple, AccuracyRow] = {}
    for row in report.rows:
        key = (row.model, row.strategy, row.n_max, row.task_tag)
        prior = seen.get(key)
        if prior is not None and prior != row:
            raise ValidationError(
                f"conflicting rows for {key}: "
                f"{prior.correct}/{prior.total} vs {row.correct}/{row.total}"
            )
        seen[key] = row

    def pct(row: AccuracyRow) -> float:
        return float(row.accuracy) * 100.0

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        (
            "model",
            "strategy",
            "n_max",
            "task_tag",
            "correct",
            "total",
            "accuracy_pct",
            "reported_pct",
            "delta_pct",
        )
    )
    rows = sorted(seen.values(), key=_row_key)
    for row in rows:
        literature = reported.get((row.model, row.task_tag))
        writer.writerow(
            (
                row.model,
                row.strategy,
                row.n_max,
                row.task_tag,
                row.correct,
                row.total,
                f"{pct(row):.1f}",
                "" if literature is None else f"{literature:.1f}",
                "" if literature is None else f"{pct(row) - literature:+.1f}",
            )
        )

    cells: dict[tuple[str, int, str], dict[str, str]] = {}
    for row in rows:
        literature = reported.get((row.model, row.task_tag))
        text = f"{pct(row):.1f}"
        if literature is not None:
            text += f" ({pct(row) - literature:+.1f})"
        cells.setdefault((row.model, row.n_max, row.task_tag), {})[row.strategy] = text
    header = ["Model", "n_max", "Task", "Reported"] + [
        STRATEGY_DISPLAY[s] for s in STRATEGY_COLUMNS
    ]
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join("---" for _ in header) + "|",
    ]
    for key in sorted(cells, key=lambda k: (k[0], k[1], k[2] != OVERALL_TAG, k[2])):
        model, n_max, task = key
        literature = reported.get((model, task))
        values = [cells[key].get(strategy, "-") for strategy in STRATEGY_COLUMNS]
        lines.append(
            "| "
            + " | ".join(
                [
                    model,
                    str(n_max),
                    task,
                    "-" if literature is None else f"{literature:.1f}",
                ]
                + values
            )
            + " |"
        )
    return buffer.getvalue(), "\n".join(lines) + "\n"


def write_records(records: Sequence[EvalRecord], path: str | Path) -> None:
    text = "".join(record.to_json_line() + "\n" for record in records)
    Path(path).write_text(text, encoding="utf-8")


def write_report(report: AccuracyReport, out_dir: str | Path) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.csv").write_text(report.to_csv(), encoding="utf-8")
    (out_dir / "report.md").write_text(report.to_markdown(), encoding="utf-8")
