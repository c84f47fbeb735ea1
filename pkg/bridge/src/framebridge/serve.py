"""Wire-protocol adapter server.

Requests arrive one JSON object per stdin line: {"id", "prompt",
"images"}. Each gets exactly one response line {"id", "text"} on
stdout. Handling is sequential; responses are id-matched, so callers
may pipeline freely. A malformed line answers with text "" (keeping
the request id when one can be recovered, "" otherwise) and the
process keeps serving. EOF on stdin is a clean exit.

Models are pluggable: anything callable as model(prompt, images) ->
str. The built-in registry holds "fixed:<letter>", a constant-answer
baseline useful for dry runs and protocol checks; wrapping a real
hosted model is one more entry.
"""

from __future__ import annotations

import json
import sys
from typing import Callable, TextIO

from .errors import UsageError

Model = Callable[[str, list[str]], str]


def build_model(spec: str) -> Model:
    kind, _, arg = spec.partition(":")
    if kind == "fixed":
        if len(arg) != 1 or not arg.isalpha():
            raise UsageError(f"fixed model wants a single letter, got {arg!r}")
        letter = arg.upper()
        return lambda prompt, images: letter
    raise UsageError(f"unknown model {spec!r} (known: fixed:<letter>)")


def _valid_request(doc: object) -> bool:
    return (
        isinstance(doc, dict)
        and isinstance(doc.get("id"), str)
        and isinstance(doc.get("prompt"), str)
        and isinstance(doc.get("images"), list)
        and all(isinstance(p, str) for p in doc["images"])
    )


def serve(model: Model, stdin: TextIO | None = None, stdout: TextIO | None = None) -> None:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    for line in stdin:
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError:
            doc = None
        if _valid_request(doc):
            request_id = doc["id"]
            text = model(doc["prompt"], doc["images"])
        else:
            # Recover the id when the line was JSON with a string id.
            request_id = doc["id"] if isinstance(doc, dict) and isinstance(doc.get("id"), str) else ""
            text = ""
        stdout.write(json.dumps({"id": request_id, "text": text}, ensure_ascii=False) + "\n")
        stdout.flush()
