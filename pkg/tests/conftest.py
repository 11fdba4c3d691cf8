import numpy as np
import pytest

from tactile_teleop.frames import TactileFrame
from tactile_teleop.pipeline import FrameWindow


def random_frame(rng, sensor_id=1, tick=0, size=8):
    return TactileFrame(sensor_id=sensor_id, tick=tick,
                        pixels=rng.uniform(0.0, 1.0, size=(size, size, 3)))


def window_from(binaries, capacity):
    window = FrameWindow(capacity)
    for b in binaries:
        window.push(b)
    return window


def naive_variation_detection(frame_pixels, past_binaries, reference, threshold):
    """Straight-line per-pixel reimplementation of the detection pass.

    Kept deliberately loop-based and independent of the production path.
    """
    h, w, _ = frame_pixels.shape
    diff = [[0.0] * w for _ in range(h)]
    for i in range(h):
        for j in range(w):
            total = 0.0
            for ch in range(3):
                total += abs(frame_pixels[i][j][ch] - reference[i][j][ch])
            diff[i][j] = total / 3.0
    binary = [[1 if diff[i][j] >= threshold else 0 for j in range(w)] for i in range(h)]
    variation = [row[:] for row in binary]
    for past in past_binaries:
        for i in range(h):
            for j in range(w):
                variation[i][j] = variation[i][j] & int(past[i][j])
    count = sum(sum(row) for row in variation)
    ratio = count / (h * w)
    return np.array(binary, dtype=bool), np.array(variation, dtype=bool), ratio


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
