"""Mapping free-text model responses to option labels.

Rules are scanned in order; the first that matches anywhere in the text
wins, and within a rule the leftmost match wins:

  1. a standalone letter within the label range, delimited by
     start/end/whitespace/punctuation (not letters or digits)
  2. "answer is X" (optional colon, optional parentheses around X)
  3. a parenthesized letter "(X)"

Case-insensitive. No rule matching means the response is unparsed,
which scores as incorrect.
"""

from __future__ import annotations

import re

from ..errors import ValidationError
from .dataset import MAX_OPTIONS, MIN_OPTIONS, OPTION_LABELS


def _letter_class(n_options: int) -> str:
    last = OPTION_LABELS[n_options - 1]
    return f"[A-{last}a-{last.lower()}]"


def parse_answer(raw: str, n_options: int) -> str | None:
    if not MIN_OPTIONS <= n_options <= MAX_OPTIONS:
        raise ValidationError(
            f"n_options must be in [{MIN_OPTIONS}, {MAX_OPTIONS}], got {n_options}"
        )
    letter = _letter_class(n_options)
    rules = (
        rf"(?<![A-Za-z0-9])({letter})(?![A-Za-z0-9])",
        rf"answer\s+is\s*:?\s*\(?({letter})\)?",
        rf"\(({letter})\)",
    )
    for rule in rules:
        match = re.search(rule, raw, flags=re.IGNORECASE)
        if match:
            return match.group(1).upper()
    return None
