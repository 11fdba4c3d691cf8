"""Tactile frame containers and raw-buffer ingestion."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np


class ShapeMismatchError(ValueError):
    """Raised when two images that must share dimensions do not."""


@dataclass(frozen=True)
class TactileFrame:
    """One RGB tactile image from one sensor at one tick.

    Pixels are a (height, width, 3) float array with channels in [0, 1].
    """

    sensor_id: int
    tick: int
    pixels: np.ndarray = field(repr=False)

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"expected (H, W, 3) pixel array, got {px.shape}")
        if px.size and (px.min() < 0.0 or px.max() > 1.0):
            raise ValueError("channel values must lie in [0, 1]")
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def content_hash(self) -> str:
        return hashlib.sha256(self.pixels.tobytes()).hexdigest()

    @classmethod
    def from_rgb8(cls, sensor_id: int, tick: int, width: int, height: int,
                  data: bytes) -> "TactileFrame":
        """Ingest a row-major 8-bit-per-channel RGB buffer, normalizing to [0, 1]."""
        expected = width * height * 3
        if len(data) != expected:
            raise ShapeMismatchError(
                f"buffer holds {len(data)} bytes, expected {expected} for {width}x{height} RGB")
        arr = np.frombuffer(data, dtype=np.uint8).reshape(height, width, 3)
        return cls(sensor_id=sensor_id, tick=tick, pixels=arr.astype(np.float64) / 255.0)

    def to_rgb8(self) -> bytes:
        return np.clip(np.rint(self.pixels * 255.0), 0, 255).astype(np.uint8).tobytes()


def require_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ShapeMismatchError(f"image shapes differ: {a.shape} vs {b.shape}")
