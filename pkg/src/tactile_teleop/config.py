"""Session configuration: defaults, file parsing, validation, round-trip."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional


class ConfigError(ValueError):
    """Raised for unknown keys or invariant violations in a config document."""


@dataclass(frozen=True)
class SessionConfig:
    # haptic mapping
    alpha: float = 1000.0
    window_length: int = 2              # consecutive frames for variation persistence
    reference_frames: int = 10          # N, frames averaged into a reference image
    calibration_frames: int = 100       # K, frames used to tune the noise threshold
    # command mapping
    linear_max: float = 0.1             # m/s
    angular_max: float = 1.0            # rad/s
    linear_deadband: float = 0.005      # m/s
    angular_deadband: float = 0.05      # rad/s
    smoothing_window: int = 5
    gripper_speed: float = 0.005        # m/s
    # slip guard
    touch_threshold: float = 0.01
    tighten_step: float = 0.001         # m
    threshold_cap: Optional[float] = None
    partial_autonomy: bool = True
    # world / loop
    tick_rate_hz: float = 60.0
    seed: int = 0
    object: str = "lime"
    frame_size: int = 64
    noise_amplitude: float = 0.02
    tactile_stream_divisor: int = 6     # send tactile frames every Nth tick on the wire
    sim: dict[str, Any] = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if self.alpha <= 0:
            raise ConfigError("alpha must be positive")
        if self.window_length < 1 or self.reference_frames < 1:
            raise ConfigError("window_length and reference_frames must be >= 1")
        if self.calibration_frames < self.reference_frames:
            raise ConfigError("calibration_frames must be >= reference_frames")
        if not 0 < self.linear_deadband < self.linear_max:
            raise ConfigError("need 0 < linear_deadband < linear_max")
        if not 0 < self.angular_deadband < self.angular_max:
            raise ConfigError("need 0 < angular_deadband < angular_max")
        if self.smoothing_window < 1:
            raise ConfigError("smoothing_window must be >= 1")
        if self.gripper_speed <= 0 or self.tighten_step <= 0:
            raise ConfigError("gripper_speed and tighten_step must be positive")
        if self.touch_threshold <= 0:
            raise ConfigError("touch_threshold must be positive")
        if self.tick_rate_hz <= 0:
            raise ConfigError("tick_rate_hz must be positive")
        if self.frame_size < 8:
            raise ConfigError("frame_size must be >= 8")
        if not 0 <= self.noise_amplitude <= 0.5:
            raise ConfigError("noise_amplitude must lie in [0, 0.5]")
        if self.tactile_stream_divisor < 1:
            raise ConfigError("tactile_stream_divisor must be >= 1")

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def replace(self, **kwargs) -> "SessionConfig":
        return dataclasses.replace(self, **kwargs)


_FIELDS = {f.name for f in dataclasses.fields(SessionConfig)}


def config_from_dict(data: dict[str, Any]) -> SessionConfig:
    unknown = set(data) - _FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return SessionConfig(**data)


def _parse_scalar(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_config(text: str) -> SessionConfig:
    """Parse either a JSON object or a key=value document.

    The key=value form supports '#' comments and dotted keys for the sim
    override table, e.g. ``sim.slip_gain = 0.05``.
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return config_from_dict(json.loads(text))

    data: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key.startswith("sim."):
            data.setdefault("sim", {})[key[4:]] = _parse_scalar(value)
        else:
            data[key] = _parse_scalar(value)
    return config_from_dict(data)


def load_config(path: str | Path) -> SessionConfig:
    return parse_config(Path(path).read_text())


def dump_config(config: SessionConfig) -> str:
    """Serialize to the key=value form; parse(dump(c)) == c."""
    lines = []
    for key, value in config.to_dict().items():
        if key == "sim":
            lines.extend(f"sim.{k} = {json.dumps(v)}" for k, v in value.items())
        else:
            lines.append(f"{key} = {json.dumps(value)}")
    return "\n".join(lines) + "\n"
