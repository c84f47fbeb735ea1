"""Seek-based frame access.

Pool indices are a small subset of a long video, so frames are read by
positional seek instead of a full decode pass. Frames come back as
OpenCV-native BGR uint8 arrays.
"""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np

from .errors import DecodeError, UsageError


def checked_pool_indices(indices, frame_count: int | None = None) -> list[int]:
    out = [int(i) for i in indices]
    if not out:
        raise UsageError("pool indices must not be empty")
    if any(i < 0 for i in out):
        raise UsageError(f"negative frame index {min(out)}")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise UsageError("pool indices must be strictly increasing")
    if frame_count is not None and out[-1] >= frame_count:
        raise UsageError(
            f"frame index {out[-1]} out of range for {frame_count} frames"
        )
    return out


class VideoReader:
    """One open capture; use as a context manager."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        if not self.path.is_file():
            raise DecodeError(f"cannot open video {self.path}: no such file")
        self._cap = cv2.VideoCapture(str(self.path))
        if not self._cap.isOpened():
            raise DecodeError(f"cannot open video {self.path}")
        self.frame_count = int(self._cap.get(cv2.CAP_PROP_FRAME_COUNT))
        self.fps = float(self._cap.get(cv2.CAP_PROP_FPS))
        if self.frame_count <= 0:
            self._cap.release()
            raise DecodeError(f"cannot open video {self.path}: no frames")

    def read_at(self, index: int) -> np.ndarray:
        if not 0 <= index < self.frame_count:
            raise UsageError(
                f"frame index {index} out of range for {self.frame_count} frames"
            )
        self._cap.set(cv2.CAP_PROP_POS_FRAMES, index)
        ok, frame = self._cap.read()
        if not ok or frame is None:
            raise DecodeError(f"cannot decode frame {index} of {self.path}")
        return frame

    def close(self) -> None:
        self._cap.release()

    def __enter__(self) -> "VideoReader":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_frames(path: str | Path, indices) -> list[np.ndarray]:
    """Decode the given strictly-increasing frame indices."""
    with VideoReader(path) as reader:
        wanted = checked_pool_indices(indices, reader.frame_count)
        return [reader.read_at(i) for i in wanted]
