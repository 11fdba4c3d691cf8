"""Dual-sensor variation detection and the logarithmic vibration curve."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .frames import TactileFrame
from .pipeline import FrameWindow, SensorCalibration, detect_variation


class NotCalibratedError(RuntimeError):
    """Raised when a haptic step runs before both sensors are calibrated."""


@dataclass(frozen=True)
class HapticConfig:
    alpha: float = 1000.0      # curve gain; higher = more sensitive near zero
    window_length: int = 2     # consecutive frames a pixel must persist

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.window_length < 1:
            raise ValueError("window_length must be >= 1")


@dataclass(frozen=True)
class FeedbackSample:
    tick: int
    ratio_s1: float
    ratio_s2: float
    ratio_mean: float
    intensity: float
    stale: bool = False


def feedback_curve(p: float, alpha: float) -> float:
    """Map a variation ratio in [0, 1] to vibration intensity in [0, 1].

    Logarithmic in p so small contact changes are easy to feel; the gain
    alpha steepens the curve near zero. Endpoints are exact: 0 -> 0, 1 -> 1.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"ratio out of range: {p}")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return math.log10(1.0 + alpha * p) / math.log10(1.0 + alpha)


class HapticMapper:
    """Per-session haptic state: one frame window per sensor.

    Advanced only by the session tick loop; emits immutable samples.
    """

    def __init__(self, config: HapticConfig):
        self.config = config
        self.windows = {1: FrameWindow(config.window_length),
                        2: FrameWindow(config.window_length)}
        self.calibrations: dict[int, SensorCalibration] = {}
        self._last_sample: Optional[FeedbackSample] = None

    @property
    def calibrated(self) -> bool:
        return 1 in self.calibrations and 2 in self.calibrations

    def set_calibration(self, calibration: SensorCalibration) -> None:
        self.calibrations[calibration.sensor_id] = calibration
        self.windows[calibration.sensor_id].clear()

    def step(self, frame1: Optional[TactileFrame],
             frame2: Optional[TactileFrame], tick: int) -> FeedbackSample:
        """One tick: detect variation on both sensors, average, apply curve.

        A missing frame (simulation stall) re-emits the previous intensity
        flagged stale rather than advancing the windows.
        """
        if not self.calibrated:
            raise NotCalibratedError("both sensors must be calibrated first")
        if frame1 is None or frame2 is None:
            prev = self._last_sample
            sample = FeedbackSample(
                tick=tick,
                ratio_s1=prev.ratio_s1 if prev else 0.0,
                ratio_s2=prev.ratio_s2 if prev else 0.0,
                ratio_mean=prev.ratio_mean if prev else 0.0,
                intensity=prev.intensity if prev else 0.0,
                stale=True)
            self._last_sample = sample
            return sample

        r1 = detect_variation(frame1, self.windows[1], self.calibrations[1])
        r2 = detect_variation(frame2, self.windows[2], self.calibrations[2])
        mean = (r1.ratio + r2.ratio) / 2.0
        sample = FeedbackSample(tick=tick, ratio_s1=r1.ratio, ratio_s2=r2.ratio,
                                ratio_mean=mean,
                                intensity=feedback_curve(mean, self.config.alpha))
        self.windows[1].push(r1.binary)
        self.windows[2].push(r2.binary)
        self._last_sample = sample
        return sample

    def reset(self) -> None:
        for w in self.windows.values():
            w.clear()
        self._last_sample = None
