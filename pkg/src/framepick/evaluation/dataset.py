"""Multiple-choice QA dataset loading.

Datasets are JSON-lines files, one item per line:

    {"item_id": "q1", "video_id": "v1", "question": "...",
     "options": ["text a", "text b"], "answer": "B", "task_tag": "counting"}

Option labels are positional (A for options[0], B for options[1], ...);
the file never stores labels next to option texts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import DatasetError

OPTION_LABELS = "ABCDEF"
MIN_OPTIONS = 2
MAX_OPTIONS = 6


@dataclass(frozen=True)
class QaItem:
    item_id: str
    video_id: str
    question: str
    options: tuple[str, ...]
    answer_label: str
    task_tag: str

    def __post_init__(self) -> None:
        if not self.item_id:
            raise DatasetError("item_id must be non-empty")
        if not self.video_id:
            raise DatasetError(f"{self.item_id}: video_id must be non-empty")
        count = len(self.options)
        if not MIN_OPTIONS <= count <= MAX_OPTIONS:
            raise DatasetError(
                f"{self.item_id}: {count} options, need {MIN_OPTIONS}-{MAX_OPTIONS}"
            )
        if self.answer_label not in self.labels:
            raise DatasetError(
                f"{self.item_id}: answer {self.answer_label!r} outside "
                f"labels {self.labels!r}"
            )

    @property
    def labels(self) -> str:
        return OPTION_LABELS[: len(self.options)]


_FIELDS = {
    "item_id": str,
    "video_id": str,
    "question": str,
    "options": list,
    "answer": str,
    "task_tag": str,
}


def _item_from_json(doc: object, line_no: int) -> QaItem:
    if not isinstance(doc, dict):
        raise DatasetError(f"line {line_no}: expected a JSON object")
    unknown = sorted(set(doc) - set(_FIELDS))
    if unknown:
        raise DatasetError(f"line {line_no}: unknown fields {unknown}")
    for name, kind in _FIELDS.items():
        if name not in doc:
            raise DatasetError(f"line {line_no}: missing field {name!r}")
        if not isinstance(doc[name], kind):
            raise DatasetError(
                f"line {line_no}: field {name!r} must be {kind.__name__}"
            )
    options = doc["options"]
    if not all(isinstance(opt, str) for opt in options):
        raise DatasetError(f"line {line_no}: options must all be strings")
    try:
        return QaItem(
            item_id=doc["item_id"],
            video_id=doc["video_id"],
            question=doc["question"],
            options=tuple(options),
            answer_label=doc["answer"],
            task_tag=doc["task_tag"],
        )
    except DatasetError as exc:
        raise DatasetError(f"line {line_no}: {exc}") from None


def load_dataset(path: str | Path) -> list[QaItem]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    items: list[QaItem] = []
    seen: dict[str, int] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"{path}: line {line_no}: invalid JSON: {exc}") from None
        try:
            item = _item_from_json(doc, line_no)
        except DatasetError as exc:
            raise DatasetError(f"{path}: {exc}") from None
        if item.item_id in seen:
            raise DatasetError(
                f"{path}: line {line_no}: duplicate item_id {item.item_id!r} "
                f"(first seen on line {seen[item.item_id]})"
            )
        seen[item.item_id] = line_no
        items.append(item)
    if not items:
        raise DatasetError(f"{path}: no items")
    return items
