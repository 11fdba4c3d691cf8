"""Controller-to-robot command mapping: gate, smooth, clamp, deadband."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ControllerInput:
    tick: int = 0
    linear_velocity: tuple[float, float, float] = (0.0, 0.0, 0.0)
    angular_velocity: tuple[float, float, float] = (0.0, 0.0, 0.0)
    button_a: bool = False
    button_b: bool = False
    back_trigger: bool = False
    side_trigger: bool = False


@dataclass(frozen=True)
class VelocityLimits:
    linear_max: float = 0.1        # m/s, per component
    angular_max: float = 1.0       # rad/s, per component
    linear_deadband: float = 0.005
    angular_deadband: float = 0.05
    smoothing_window: int = 5
    gripper_speed: float = 0.005   # m/s

    def __post_init__(self):
        if not 0 < self.linear_deadband < self.linear_max:
            raise ValueError("need 0 < linear_deadband < linear_max")
        if not 0 < self.angular_deadband < self.angular_max:
            raise ValueError("need 0 < angular_deadband < angular_max")
        if self.smoothing_window < 1:
            raise ValueError("smoothing_window must be >= 1")
        if self.gripper_speed <= 0:
            raise ValueError("gripper_speed must be positive")


@dataclass(frozen=True)
class RobotCommand:
    tick: int
    twist: tuple[float, ...]       # (vx, vy, vz, wx, wy, wz)
    gripper_velocity: float        # negative closes the opening
    fault: bool = False


ZERO_TWIST = (0.0,) * 6


def gripper_command(inp: ControllerInput, limits: VelocityLimits) -> float:
    """Trigger-modulated gripper velocity; closing wins a simultaneous press."""
    if inp.back_trigger:
        return -limits.gripper_speed
    if inp.side_trigger:
        return limits.gripper_speed
    return 0.0


def _clamp_deadband(value: float, vmax: float, vmin: float) -> float:
    value = max(-vmax, min(vmax, value))
    return 0.0 if abs(value) < vmin else value


class CommandMapper:
    """Per-session mapper state: one smoothing buffer per twist component.

    The twist is emitted only while the A button is held; releasing it
    zeroes the command and resets the buffers so re-engaging does not
    blend stale motion. Gripper triggers act independently of A.
    """

    def __init__(self, limits: VelocityLimits):
        self.limits = limits
        self._buffers = [deque(maxlen=limits.smoothing_window) for _ in range(6)]

    def reset(self) -> None:
        for buf in self._buffers:
            buf.clear()

    def map_input(self, inp: ControllerInput) -> RobotCommand:
        raw = (*inp.linear_velocity, *inp.angular_velocity)
        if not all(np.isfinite(raw)):
            self.reset()
            return RobotCommand(tick=inp.tick, twist=ZERO_TWIST,
                                gripper_velocity=gripper_command(inp, self.limits),
                                fault=True)
        if not inp.button_a:
            self.reset()
            return RobotCommand(tick=inp.tick, twist=ZERO_TWIST,
                                gripper_velocity=gripper_command(inp, self.limits))

        lim = self.limits
        twist = []
        for i, value in enumerate(raw):
            buf = self._buffers[i]
            buf.append(value)
            smoothed = sum(buf) / len(buf)
            if i < 3:
                twist.append(_clamp_deadband(smoothed, lim.linear_max, lim.linear_deadband))
            else:
                twist.append(_clamp_deadband(smoothed, lim.angular_max, lim.angular_deadband))
        return RobotCommand(tick=inp.tick, twist=tuple(twist),
                            gripper_velocity=gripper_command(inp, self.limits))
