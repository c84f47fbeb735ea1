"""Frame materialization through an external decoder command.

No codec runs in-process: the caller supplies a command template with
{video}, {index}, and {out} placeholders (any ffmpeg-compatible tool
works). Outputs land in a working directory as <video_id>_<index>.png
and act as an idempotent cache: existing files are never re-decoded.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import threading
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .errors import DecodeError, ValidationError

PLACEHOLDERS = ("{video}", "{index}", "{out}")

# One lock per output path so concurrent extract calls in this process
# never run two decoders against the same frame.
_path_locks: dict[Path, threading.Lock] = {}
_path_locks_guard = threading.Lock()


def _lock_for(path: Path) -> threading.Lock:
    with _path_locks_guard:
        return _path_locks.setdefault(path, threading.Lock())


def frame_path(work_dir: Path, video_id: str, index: int) -> Path:
    return work_dir / f"{video_id}_{index}.png"


def _decode_one(
    tokens: list[str], video_path: str, index: int, out: Path
) -> None:
    with _lock_for(out):
        if out.exists():
            return
        tmp = out.with_name(
            f"{out.name}.tmp{os.getpid()}.{threading.get_ident()}"
        )
        cmd = [
            t.replace("{video}", video_path)
            .replace("{index}", str(index))
            .replace("{out}", str(tmp))
            for t in tokens
        ]
        try:
            result = subprocess.run(cmd, capture_output=True, text=True)
        except OSError as exc:
            raise DecodeError(f"cannot run decoder {cmd[0]!r}: {exc}") from exc
        try:
            if result.returncode != 0:
                raise DecodeError(
                    f"decoder exited {result.returncode} for frame {index} of "
                    f"{video_path}: {result.stderr.strip()}"
                )
            if not tmp.exists():
                raise DecodeError(
                    f"decoder reported success but wrote no file for frame "
                    f"{index} of {video_path}"
                )
            os.replace(tmp, out)
        finally:
            tmp.unlink(missing_ok=True)


def extract_frames(
    video_path: str | Path,
    indices: Iterable[int],
    decoder_cmd_template: str,
    work_dir: str | Path,
    *,
    video_id: str | None = None,
    jobs: int = 1,
) -> list[Path]:
    """Materialize the requested frames; returns one path per distinct
    index, in input order. Up to ``jobs`` decoder processes run at once."""
    for placeholder in PLACEHOLDERS:
        if placeholder not in decoder_cmd_template:
            raise ValidationError(
                f"decoder template must contain {placeholder}: "
                f"{decoder_cmd_template!r}"
            )
    tokens = shlex.split(decoder_cmd_template)
    video_path = str(video_path)
    if video_id is None:
        video_id = Path(video_path).stem
    work_dir = Path(work_dir)
    work_dir.mkdir(parents=True, exist_ok=True)

    wanted: list[int] = []
    seen = set()
    for index in indices:
        index = int(index)
        if index < 0:
            raise ValidationError(f"frame index must be >= 0, got {index}")
        if index not in seen:
            seen.add(index)
            wanted.append(index)

    outs = [frame_path(work_dir, video_id, i) for i in wanted]
    if jobs <= 1:
        for index, out in zip(wanted, outs):
            _decode_one(tokens, video_path, index, out)
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_decode_one, tokens, video_path, index, out)
                for index, out in zip(wanted, outs)
            ]
            for future in futures:
                future.result()
    return outs
