"""Per-frame variation detection against a reference image, plus calibration.

The detection path is: absolute per-channel difference to the reference,
channel averaging, thresholding at the sensor's noise level, and a bitwise
AND over a short window of consecutive binary images so only persistent
changes count.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .frames import ShapeMismatchError, TactileFrame, require_same_shape


class CalibrationError(ValueError):
    """Raised when a calibration request is malformed."""


@dataclass(frozen=True)
class SensorCalibration:
    """Reference (background) image and noise threshold for one sensor."""

    sensor_id: int
    reference: np.ndarray = field(repr=False)  # (H, W, 3) floats in [0, 1]
    noise_threshold: float

    def __post_init__(self):
        if not 0.0 <= self.noise_threshold <= 1.0:
            raise ValueError("noise_threshold must lie in [0, 1]")


@dataclass(frozen=True)
class VariationResult:
    ratio: float                 # fraction of persistently-changed pixels
    binary: np.ndarray = field(repr=False)     # this frame's thresholded difference
    variation: np.ndarray = field(repr=False)  # AND over the window


class FrameWindow:
    """Holds up to capacity-1 most recent binary images, oldest evicted first."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._entries: deque[np.ndarray] = deque(maxlen=max(capacity - 1, 0))

    @property
    def entries(self) -> list[np.ndarray]:
        return list(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def push(self, binary: np.ndarray) -> None:
        if self._entries.maxlen:
            self._entries.append(binary)

    def clear(self) -> None:
        self._entries.clear()


def pixel_abs_diff(pixels: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Per-channel absolute difference between a frame and a reference image."""
    pixels = np.asarray(pixels, dtype=np.float64)
    reference = np.asarray(reference, dtype=np.float64)
    require_same_shape(pixels, reference)
    return np.abs(pixels - reference)


def average_channels(image: np.ndarray) -> np.ndarray:
    """Collapse an RGB image to gray by the arithmetic mean of its channels."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 3 or image.shape[2] != 3:
        raise ShapeMismatchError(f"expected (H, W, 3), got {image.shape}")
    return image.mean(axis=2)


def binarize(gray: np.ndarray, threshold: float) -> np.ndarray:
    """Threshold a gray image: pixels at or above the threshold become 1."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    return np.asarray(gray, dtype=np.float64) >= threshold


def variation_image(current: np.ndarray, window: FrameWindow) -> np.ndarray:
    """AND the current binary image with every window entry.

    During warm-up (fewer than capacity-1 entries) the AND runs over
    whatever frames exist; an empty window returns the current image.
    """
    out = np.asarray(current, dtype=bool)
    for past in window.entries:
        require_same_shape(out, np.asarray(past))
        out = out & np.asarray(past, dtype=bool)
    return out


def detect_variation(frame: TactileFrame, window: FrameWindow,
                     calibration: SensorCalibration) -> VariationResult:
    """Full detection pass for one frame; does not mutate the window."""
    diff = pixel_abs_diff(frame.pixels, calibration.reference)
    gray = average_channels(diff)
    binary = binarize(gray, calibration.noise_threshold)
    variation = variation_image(binary, window)
    ratio = float(variation.mean()) if variation.size else 0.0
    return VariationResult(ratio=ratio, binary=binary, variation=variation)


def calibrate(frames: Sequence[TactileFrame], reference_count: int) -> SensorCalibration:
    """Build a calibration from K no-contact frames.

    The reference is the per-pixel mean of the first ``reference_count``
    frames; the noise threshold is the mean over all frames of the maximum
    gray-level difference to that reference.
    """
    total = len(frames)
    if total == 0:
        raise CalibrationError("no calibration frames supplied")
    if reference_count < 1 or reference_count > total:
        raise CalibrationError(
            f"need 1 <= reference_count <= {total}, got {reference_count}")
    shape = frames[0].pixels.shape
    for f in frames:
        if f.pixels.shape != shape:
            raise ShapeMismatchError("calibration frames must share dimensions")

    reference = np.mean([f.pixels for f in frames[:reference_count]], axis=0)
    maxima = [average_channels(pixel_abs_diff(f.pixels, reference)).max() for f in frames]
    threshold = float(np.mean(maxima))
    return SensorCalibration(sensor_id=frames[0].sensor_id, reference=reference,
                             noise_threshold=min(threshold, 1.0))
