import cv2
import numpy as np
import pytest

SIZE = (64, 48)  # width, height


def _write_video(path, frames, fps=10.0):
    # MJPG in .avi: intra-only, so positional seeks land exactly.
    writer = cv2.VideoWriter(str(path), cv2.VideoWriter_fourcc(*"MJPG"), fps, SIZE)
    assert writer.isOpened()
    for frame in frames:
        writer.write(frame)
    writer.release()
    return path


def _textured(seed, base):
    rng = np.random.default_rng(seed)
    frame = np.full((SIZE[1], SIZE[0], 3), base, dtype=np.uint8)
    frame[8:40, 8:56] = rng.integers(0, 255, (32, 48, 3), dtype=np.uint8)
    return frame


@pytest.fixture(scope="session")
def motion_video(tmp_path_factory):
    """12 frames, every frame visibly different from its neighbours."""
    frames = [_textured(i, 30 + 15 * i) for i in range(12)]
    return _write_video(tmp_path_factory.mktemp("vids") / "motion.avi", frames)


@pytest.fixture(scope="session")
def static_video(tmp_path_factory):
    """8 identical mid-gray frames."""
    frame = np.full((SIZE[1], SIZE[0], 3), 128, dtype=np.uint8)
    return _write_video(tmp_path_factory.mktemp("vids") / "static.avi", [frame] * 8)


@pytest.fixture(scope="session")
def duplicated_video(tmp_path_factory):
    """10 frames: five distinct images, each written twice in a row."""
    frames = []
    for i in range(5):
        frame = _textured(100 + i, 40 * i)
        frames.extend([frame, frame])
    return _write_video(tmp_path_factory.mktemp("vids") / "dups.avi", frames)
