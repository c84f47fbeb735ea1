"""Per-frame importance scorers.

score(frames) -> (n,) float32, aligned with the pooled frames.

- "csta": a pretrained video-summarization scorer loaded from a local
  checkpoint. The network is not re-implemented here; without the
  published weights the backend refuses to start.
- "motion": luminance change between consecutive pooled frames. Static
  footage scores flat zeros; cuts and movement score high. Cheap,
  deterministic, no weights.
"""

from __future__ import annotations

import os
from pathlib import Path

import cv2
import numpy as np

from .errors import UsageError, WeightsError
from .femb import KIND_SCORES, write_femb
from .video import read_frames

CSTA_WEIGHTS_ENV = "FRAMEBRIDGE_CSTA_PATH"

_CSTA_HELP = (
    "CSTA checkpoint not found. Download the published pretrained "
    "weights (weights.pt from the upstream CSTA release), then pass "
    f"--weights <file> or set {CSTA_WEIGHTS_ENV}."
)

_SIDE = 32


class MotionScoreBackend:
    name = "motion"

    def score(self, frames: list[np.ndarray]) -> np.ndarray:
        grays = [
            cv2.resize(
                cv2.cvtColor(f, cv2.COLOR_BGR2GRAY),
                (_SIDE, _SIDE),
                interpolation=cv2.INTER_AREA,
            ).astype(np.float64)
            / 255.0
            for f in frames
        ]
        scores = [0.0]  # first pooled frame has no predecessor
        for prev, cur in zip(grays, grays[1:]):
            scores.append(float(np.abs(cur - prev).mean()))
        return np.asarray(scores, dtype=np.float32)


class CstaBackend:
    name = "csta"

    def __init__(self, weights_path: str | None = None) -> None:
        self.weights_path = weights_path or os.environ.get(CSTA_WEIGHTS_ENV)
        if not self.weights_path or not Path(self.weights_path).is_file():
            raise WeightsError(_CSTA_HELP)
        try:
            import torch
        except ImportError as exc:
            raise WeightsError(f"{exc}\n{_CSTA_HELP}") from exc
        self._torch = torch
        self._model = torch.jit.load(self.weights_path).eval()

    def score(self, frames: list[np.ndarray]) -> np.ndarray:
        images = np.stack(
            [
                cv2.resize(f, (224, 224), interpolation=cv2.INTER_AREA)[..., ::-1]
                for f in frames
            ]
        )
        batch = self._torch.from_numpy(images.copy()).permute(0, 3, 1, 2).float() / 255.0
        with self._torch.no_grad():
            out = self._model(batch)
        return out.reshape(-1).cpu().numpy().astype(np.float32)


SCORE_BACKENDS = {
    "motion": MotionScoreBackend,
    "csta": CstaBackend,
}


def make_score_backend(name: str, weights_path: str | None = None):
    if name not in SCORE_BACKENDS:
        known = ", ".join(sorted(SCORE_BACKENDS))
        raise UsageError(f"unknown score backend {name!r} (one of: {known})")
    if name == "csta":
        return CstaBackend(weights_path)
    return SCORE_BACKENDS[name]()


def score_video(video_path, pool_indices, backend) -> tuple[list[int], np.ndarray]:
    frames = read_frames(video_path, pool_indices)
    scores = np.asarray(backend.score(frames), dtype=np.float32).reshape(-1)
    if scores.shape[0] != len(frames):
        raise UsageError(
            f"backend {backend.name} returned {scores.shape[0]} scores "
            f"for {len(frames)} frames"
        )
    if not np.isfinite(scores).all():
        raise UsageError(f"backend {backend.name} returned non-finite scores")
    return [int(i) for i in pool_indices], scores


def write_scores(video_path, pool_indices, out_path, backend) -> None:
    indices, scores = score_video(video_path, pool_indices, backend)
    write_femb(out_path, KIND_SCORES, indices, scores)
