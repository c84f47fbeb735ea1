"""Per-frame embedding producers.

Two backends share one contract: embed(frames) takes a list of BGR
uint8 arrays and returns an (n, 512) float32 matrix with unit-norm
rows, the same frame always mapping to the same row.

- "clip": CLIP ViT-B/32 image features from locally stored pretrained
  weights (torch + transformers, installed via the "models" extra).
- "pixel": a weight-free stand-in. Each frame is resized to 32x32,
  flattened, and pushed through one fixed Gaussian projection to 512
  dimensions. No semantics, but deterministic and pixel-faithful,
  which is all the sampling pipeline's plumbing needs in tests.
"""

from __future__ import annotations

import os
from pathlib import Path

import cv2
import numpy as np

from .errors import UsageError, WeightsError
from .femb import KIND_EMBEDDINGS, write_femb
from .video import read_frames

EMBED_DIM = 512

CLIP_WEIGHTS_ENV = "FRAMEBRIDGE_CLIP_DIR"

_CLIP_HELP = (
    "CLIP weights not found. Install the models extra "
    "(pip install 'framebridge[models]') and store the checkpoint once:\n"
    "  python3 -c \"from transformers import CLIPModel, CLIPProcessor; "
    "m='openai/clip-vit-base-patch32'; d='<dir>'; "
    "CLIPModel.from_pretrained(m).save_pretrained(d); "
    "CLIPProcessor.from_pretrained(m).save_pretrained(d)\"\n"
    f"then pass --weights <dir> or set {CLIP_WEIGHTS_ENV}."
)

# Frozen projection for the pixel backend. The seed is part of the
# backend's definition: changing it changes every emitted file.
_PIXEL_SEED = 0x46454D42
_PIXEL_SIDE = 32


def _unit_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    return (matrix / np.maximum(norms, 1e-30)).astype(np.float32)


class PixelProjectionBackend:
    name = "pixel"

    def __init__(self) -> None:
        rng = np.random.default_rng(_PIXEL_SEED)
        features = _PIXEL_SIDE * _PIXEL_SIDE * 3 + 1  # +1 bias, so no zero rows
        self._projection = rng.standard_normal((features, EMBED_DIM)) / np.sqrt(
            features
        )

    def embed(self, frames: list[np.ndarray]) -> np.ndarray:
        rows = []
        for frame in frames:
            small = cv2.resize(
                frame, (_PIXEL_SIDE, _PIXEL_SIDE), interpolation=cv2.INTER_AREA
            )
            feat = small.astype(np.float64).reshape(-1) / 255.0
            rows.append(np.concatenate([feat, [1.0]]))
        return _unit_rows(np.asarray(rows) @ self._projection)


class ClipBackend:
    """CLIP ViT-B/32 image tower, projected features (d=512)."""

    name = "clip"

    def __init__(self, weights_dir: str | None = None) -> None:
        self.weights_dir = weights_dir or os.environ.get(CLIP_WEIGHTS_ENV)
        if not self.weights_dir or not Path(self.weights_dir).is_dir():
            raise WeightsError(_CLIP_HELP)
        try:
            import torch  # noqa: F401
            from transformers import CLIPModel, CLIPProcessor
        except ImportError as exc:
            raise WeightsError(f"{exc}\n{_CLIP_HELP}") from exc
        self._torch = torch
        self._model = CLIPModel.from_pretrained(self.weights_dir).eval()
        self._processor = CLIPProcessor.from_pretrained(self.weights_dir)

    def embed(self, frames: list[np.ndarray]) -> np.ndarray:
        # The processor expects RGB; captures are BGR.
        images = [cv2.cvtColor(f, cv2.COLOR_BGR2RGB) for f in frames]
        inputs = self._processor(images=images, return_tensors="pt")
        with self._torch.no_grad():
            features = self._model.get_image_features(**inputs)
        return _unit_rows(features.cpu().numpy().astype(np.float32))


EMBED_BACKENDS = {
    "pixel": PixelProjectionBackend,
    "clip": ClipBackend,
}


def make_embed_backend(name: str, weights_dir: str | None = None):
    if name not in EMBED_BACKENDS:
        known = ", ".join(sorted(EMBED_BACKENDS))
        raise UsageError(f"unknown embed backend {name!r} (one of: {known})")
    if name == "clip":
        return ClipBackend(weights_dir)
    return EMBED_BACKENDS[name]()


def embed_video(video_path, pool_indices, backend) -> tuple[list[int], np.ndarray]:
    """Embed the pooled frames; rows align with pool_indices."""
    frames = read_frames(video_path, pool_indices)
    matrix = backend.embed(frames)
    if matrix.shape != (len(frames), EMBED_DIM):
        raise UsageError(
            f"backend {backend.name} returned shape {matrix.shape}, "
            f"expected ({len(frames)}, {EMBED_DIM})"
        )
    return [int(i) for i in pool_indices], matrix


def write_embeddings(video_path, pool_indices, out_path, backend) -> None:
    indices, matrix = embed_video(video_path, pool_indices, backend)
    write_femb(out_path, KIND_EMBEDDINGS, indices, matrix)
