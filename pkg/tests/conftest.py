import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from framepick.types import VideoMeta

settings.register_profile(
    "repo", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

MOCK_ADAPTER = [sys.executable, "-m", "framepick.evaluation.mock_adapter"]


def make_meta(
    video_id: str = "vid",
    frame_count: int = 300,
    native_fps: float = 30.0,
) -> VideoMeta:
    return VideoMeta(
        video_id=video_id,
        frame_count=frame_count,
        native_fps=native_fps,
        duration_s=frame_count / native_fps,
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
