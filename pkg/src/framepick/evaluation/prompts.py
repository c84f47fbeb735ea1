"""The one prompt template every model sees.

Adjudication differences are themselves a bias source, so the template
is fixed verbatim; changing it invalidates comparisons against existing
runs.
"""

from __future__ import annotations

from .dataset import QaItem

ANSWER_INSTRUCTION = "Answer with the option's letter only."


def build_prompt(item: QaItem) -> str:
    lines = [item.question]
    lines.extend(
        f"{label}. {text}" for label, text in zip(item.labels, item.options)
    )
    lines.append(ANSWER_INSTRUCTION)
    return "\n".join(lines)
