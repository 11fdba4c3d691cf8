"""Slip-prevention state machine.

Activates when touch is seen on both sensors, averages a fresh per-object
reference image per sensor, then watches the variation ratio against an
adaptive threshold that doubles after every detected slip. Each detection
commands one fixed tightening step and triggers re-acquisition of the
references.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .commands import ControllerInput
from .frames import TactileFrame
from .pipeline import FrameWindow, SensorCalibration, detect_variation


class GuardPhase(enum.Enum):
    INACTIVE = "inactive"
    ACQUIRING = "acquiring"
    ARMED = "armed"


@dataclass(frozen=True)
class SlipConfig:
    touch_threshold: float = 0.01     # both sensors must exceed this to activate
    tighten_step: float = 0.001       # m, opening decrement per detection
    reference_frames: int = 10        # frames averaged into each slip reference
    window_length: int = 2
    threshold_cap: Optional[float] = None  # optional ceiling on the doubling schedule

    def __post_init__(self):
        if self.touch_threshold <= 0:
            raise ValueError("touch_threshold must be positive")
        if self.tighten_step <= 0:
            raise ValueError("tighten_step must be positive")
        if self.reference_frames < 1:
            raise ValueError("reference_frames must be >= 1")


@dataclass(frozen=True)
class SlipEvent:
    tick: int
    triggering_sensor: str     # "1", "2", or "both"
    ratio_s1: float
    ratio_s2: float
    new_slip_count: int
    new_threshold: float


@dataclass(frozen=True)
class TightenCommand:
    tick: int
    delta: float               # m, opening setpoint decrement


class SlipGuard:
    """One guard instance per session, advanced only by the tick loop."""

    def __init__(self, config: SlipConfig):
        self.config = config
        self.phase = GuardPhase.INACTIVE
        self.slip_count = 0
        self.references: dict[int, np.ndarray] = {}
        self.thresholds: dict[int, float] = {}
        self.windows = {1: FrameWindow(config.window_length),
                        2: FrameWindow(config.window_length)}
        self._acquire_buffer: dict[int, list[np.ndarray]] = {1: [], 2: []}

    def _threshold_value(self) -> float:
        value = (2 ** self.slip_count) * self.config.touch_threshold
        if self.config.threshold_cap is not None:
            value = min(value, self.config.threshold_cap)
        return value

    def _reset(self) -> None:
        self.phase = GuardPhase.INACTIVE
        self.slip_count = 0
        self.references.clear()
        self.thresholds.clear()
        self._acquire_buffer = {1: [], 2: []}
        for w in self.windows.values():
            w.clear()

    def _begin_acquisition(self) -> None:
        self.phase = GuardPhase.ACQUIRING
        self._acquire_buffer = {1: [], 2: []}
        for w in self.windows.values():
            w.clear()

    def maybe_activate(self, ratio_s1: float, ratio_s2: float) -> bool:
        """Activate on bilateral touch (strict inequality on both ratios)."""
        if self.phase is not GuardPhase.INACTIVE:
            return False
        eps = self.config.touch_threshold
        if ratio_s1 > eps and ratio_s2 > eps:
            self.slip_count = 0
            self._begin_acquisition()
            return True
        return False

    def acquire_references(self, frame1: TactileFrame, frame2: TactileFrame) -> bool:
        """Buffer one frame pair; arm once N pairs are averaged. Returns True on arming."""
        if self.phase is not GuardPhase.ACQUIRING:
            raise RuntimeError("acquire_references requires the acquiring phase")
        self._acquire_buffer[1].append(frame1.pixels)
        self._acquire_buffer[2].append(frame2.pixels)
        if len(self._acquire_buffer[1]) < self.config.reference_frames:
            return False
        for s in (1, 2):
            self.references[s] = np.mean(self._acquire_buffer[s], axis=0)
            self.thresholds[s] = self._threshold_value()
            self.windows[s].clear()
        self._acquire_buffer = {1: [], 2: []}
        self.phase = GuardPhase.ARMED
        return True

    def guard_step(self, frame1: TactileFrame, frame2: TactileFrame,
                   noise_thresholds: dict[int, float],
                   tick: int) -> Optional[tuple[SlipEvent, TightenCommand]]:
        """Armed-phase step: detect slip against the slippage references.

        At most one tighten command per tick, even if both sensors exceed
        their thresholds simultaneously.
        """
        if self.phase is not GuardPhase.ARMED:
            raise RuntimeError("guard_step requires the armed phase")
        results = {}
        for s, frame in ((1, frame1), (2, frame2)):
            cal = SensorCalibration(sensor_id=s, reference=self.references[s],
                                    noise_threshold=noise_thresholds[s])
            results[s] = detect_variation(frame, self.windows[s], cal)
            self.windows[s].push(results[s].binary)

        over1 = results[1].ratio > self.thresholds[1]
        over2 = results[2].ratio > self.thresholds[2]
        if not (over1 or over2):
            return None

        self.slip_count += 1
        new_threshold = self._threshold_value()
        event = SlipEvent(tick=tick,
                          triggering_sensor="both" if (over1 and over2) else ("1" if over1 else "2"),
                          ratio_s1=results[1].ratio, ratio_s2=results[2].ratio,
                          new_slip_count=self.slip_count, new_threshold=new_threshold)
        self._begin_acquisition()
        return event, TightenCommand(tick=tick, delta=self.config.tighten_step)

    def deactivate_on_open(self, inp: ControllerInput) -> bool:
        """Opening the gripper disables the guard and clears all its state."""
        if inp.side_trigger and self.phase is not GuardPhase.INACTIVE:
            self._reset()
            return True
        return False

    def tick(self, frame1: TactileFrame, frame2: TactileFrame,
             background_ratio_s1: float, background_ratio_s2: float,
             inp: ControllerInput, noise_thresholds: dict[int, float],
             tick: int) -> Optional[tuple[SlipEvent, TightenCommand]]:
        """Convenience driver running the phase-appropriate operation."""
        self.deactivate_on_open(inp)
        if self.phase is GuardPhase.INACTIVE:
            self.maybe_activate(background_ratio_s1, background_ratio_s2)
            if self.phase is GuardPhase.INACTIVE:
                return None
        if self.phase is GuardPhase.ACQUIRING:
            self.acquire_references(frame1, frame2)
            return None
        return self.guard_step(frame1, frame2, noise_thresholds, tick)
