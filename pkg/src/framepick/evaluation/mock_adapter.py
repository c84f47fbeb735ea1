"""Deterministic stand-in for a model adapter, speaking the wire
protocol over stdin/stdout. Used by the test suite and by
`framepick evaluate --mock`.

Modes
  const:<L>    every response is the letter L
  key:<path>   JSON object mapping item id -> response text
  frames:<k>   correct answer (from --key) iff the request carries at
               least k images, otherwise a deterministic wrong letter

--sleep-ms delays each response; --reorder N buffers up to N requests
and answers them in reverse arrival order (responses also flush after a
short idle period, so a client with a small in-flight bound never
deadlocks against a partially filled buffer).
"""

from __future__ import annotations

import argparse
import json
import queue
import sys
import threading
import time

IDLE_FLUSH_S = 0.1
_EOF = object()


def _load_key(path: str) -> dict[str, str]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in doc.items()
    ):
        raise SystemExit(f"--key file {path} must map item ids to strings")
    return doc


def _wrong_letter(correct: str) -> str:
    if len(correct) == 1 and "A" <= correct <= "F":
        return chr((ord(correct) - ord("A") + 1) % 6 + ord("A"))
    return "Z"


def _respond_text(doc: dict, args: argparse.Namespace, key: dict[str, str]) -> str:
    mode, _, arg = args.mode.partition(":")
    if mode == "const":
        return arg
    if mode == "key":
        return key.get(doc["id"], "")
    correct = key.get(doc["id"], "")
    images = doc.get("images")
    if isinstance(images, list) and len(images) >= int(arg) and correct:
        return correct
    return _wrong_letter(correct)


def _reader(lines: queue.Queue) -> None:
    for line in sys.stdin:
        lines.put(line)
    lines.put(_EOF)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="mock_adapter", description=__doc__)
    parser.add_argument("--mode", required=True)
    parser.add_argument("--key", default=None)
    parser.add_argument("--sleep-ms", type=int, default=0)
    parser.add_argument("--reorder", type=int, default=0)
    args = parser.parse_args(argv)

    mode, _, mode_arg = args.mode.partition(":")
    if mode not in ("const", "key", "frames") or not mode_arg:
        parser.error(f"mode must be const:<L>, key:<path>, or frames:<k>, got {args.mode!r}")
    key: dict[str, str] = {}
    if mode == "key":
        key = _load_key(mode_arg)
    elif mode == "frames":
        if not mode_arg.isdigit() or int(mode_arg) < 1:
            parser.error(f"frames mode needs a positive frame count, got {mode_arg!r}")
        if not args.key:
            parser.error("frames mode requires --key")
        key = _load_key(args.key)

    lines: queue.Queue = queue.Queue()
    threading.Thread(target=_reader, args=(lines,), daemon=True).start()

    buffered: list[str] = []

    def flush() -> None:
        for response in reversed(buffered) if args.reorder else buffered:
            if args.sleep_ms:
                time.sleep(args.sleep_ms / 1000.0)
            sys.stdout.write(response + "\n")
            sys.stdout.flush()
        buffered.clear()

    eof = False
    while not eof:
        try:
            line = lines.get(timeout=IDLE_FLUSH_S)
        except queue.Empty:
            flush()
            continue
        if line is _EOF:
            eof = True
            break
        line = line.strip()
        if not line:
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError:
            doc = None
        if not isinstance(doc, dict) or not isinstance(doc.get("id"), str):
            response_id, text = "", ""
        elif not isinstance(doc.get("prompt"), str) or not isinstance(
            doc.get("images"), list
        ):
            response_id, text = doc["id"], ""
        else:
            response_id, text = doc["id"], _respond_text(doc, args, key)
        buffered.append(
            json.dumps({"id": response_id, "text": text}, ensure_ascii=False)
        )
        if len(buffered) >= max(args.reorder, 1):
            flush()
    flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
