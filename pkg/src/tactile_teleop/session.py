"""Fixed-rate session orchestration: tick loop, operators, logs, metrics.

Per tick the loop drains one operator input, maps it to a robot command,
steps the world, renders both tactile frames, runs the haptic step and the
slip guard, and emits one telemetry record. Guard tighten commands are
applied at the start of the next tick so each tick is a single dataflow pass.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional

from .commands import CommandMapper, ControllerInput, RobotCommand, VelocityLimits
from .config import SessionConfig, config_from_dict
from .haptics import FeedbackSample, HapticConfig, HapticMapper
from .pipeline import calibrate
from .sim import (SimParams, WorldState, apply_tighten, load_object_presets,
                  make_world, render_tactile, step_physics)
from .slip import SlipConfig, SlipEvent, SlipGuard, TightenCommand

LOG_SCHEMA = "tactile-teleop-log/1"

OperatorSource = Callable[[int], Optional[ControllerInput]]


class ReplayError(RuntimeError):
    """Raised when a session log is corrupt or truncated."""


@dataclass(frozen=True)
class TelemetryRecord:
    tick: int
    feedback: FeedbackSample
    command: RobotCommand
    opening: float
    opening_setpoint: float
    gripper_pose: tuple[float, ...]
    object_pose: tuple[float, ...]
    object_status: str
    guard_phase: str
    slip_count: int
    slip_event: Optional[SlipEvent]
    frame_hash_s1: str
    frame_hash_s2: str
    calibrated: bool

    def to_dict(self) -> dict:
        d = {
            "tick": self.tick,
            "f": self.feedback.intensity,
            "p1": self.feedback.ratio_s1,
            "p2": self.feedback.ratio_s2,
            "stale": self.feedback.stale,
            "twist": list(self.command.twist),
            "gripper_velocity": self.command.gripper_velocity,
            "fault": self.command.fault,
            "opening": self.opening,
            "opening_setpoint": self.opening_setpoint,
            "gripper_pose": list(self.gripper_pose),
            "object_pose": list(self.object_pose),
            "object_status": self.object_status,
            "guard_phase": self.guard_phase,
            "slip_count": self.slip_count,
            "frame_hash_s1": self.frame_hash_s1,
            "frame_hash_s2": self.frame_hash_s2,
            "calibrated": self.calibrated,
        }
        if self.slip_event is not None:
            d["slip_event"] = dataclasses.asdict(self.slip_event)
        return d


@dataclass(frozen=True)
class SessionMetrics:
    duration: float
    min_opening: float
    slip_count: Optional[int]   # None when partial autonomy is disabled
    damaged: bool
    delivered: bool

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


class ScriptedOperator:
    """Declarative operator: (tick range, input template) entries.

    Entries are dicts with ``from``/``to`` tick bounds (inclusive) plus any
    ControllerInput fields; later entries override earlier ones on overlap.
    """

    def __init__(self, entries: Iterable[dict]):
        self.entries = list(entries)

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedOperator":
        return cls(json.loads(Path(path).read_text()))

    def __call__(self, tick: int) -> Optional[ControllerInput]:
        fields: dict = {}
        for entry in self.entries:
            if entry.get("from", 0) <= tick <= entry.get("to", entry.get("from", 0)):
                fields.update({k: v for k, v in entry.items() if k not in ("from", "to")})
        if not fields:
            return None
        return ControllerInput(
            tick=tick,
            linear_velocity=tuple(fields.get("lin", (0.0, 0.0, 0.0))),
            angular_velocity=tuple(fields.get("ang", (0.0, 0.0, 0.0))),
            button_a=bool(fields.get("a", False)),
            button_b=bool(fields.get("b", False)),
            back_trigger=bool(fields.get("back", False)),
            side_trigger=bool(fields.get("side", False)))


class Session:
    """Owns all per-session mutable state; advanced only via tick()."""

    def __init__(self, config: SessionConfig, presets: Optional[dict] = None):
        self.config = config
        presets = presets or load_object_presets()
        if config.object not in presets:
            raise ValueError(f"unknown object preset: {config.object!r}")
        params = SimParams(**config.sim) if config.sim else SimParams()
        self.world: WorldState = make_world(presets[config.object], seed=config.seed,
                                            params=params, frame_size=config.frame_size,
                                            noise_amplitude=config.noise_amplitude)
        self.mapper = CommandMapper(VelocityLimits(
            linear_max=config.linear_max, angular_max=config.angular_max,
            linear_deadband=config.linear_deadband,
            angular_deadband=config.angular_deadband,
            smoothing_window=config.smoothing_window,
            gripper_speed=config.gripper_speed))
        self.haptics = HapticMapper(HapticConfig(alpha=config.alpha,
                                                 window_length=config.window_length))
        self.guard = SlipGuard(SlipConfig(
            touch_threshold=config.touch_threshold, tighten_step=config.tighten_step,
            reference_frames=config.reference_frames,
            window_length=config.window_length,
            threshold_cap=config.threshold_cap))
        self.partial_autonomy = config.partial_autonomy
        self.dt = 1.0 / config.tick_rate_hz
        self._pending_tighten: Optional[TightenCommand] = None
        self._calibration_buffer: Optional[dict[int, list]] = None
        self._prev_button_b = False
        self.records: list[TelemetryRecord] = []
        self.slip_events: list[SlipEvent] = []
        self.last_frames = {1: None, 2: None}

    @property
    def calibrated(self) -> bool:
        return self.haptics.calibrated

    def tick(self, inp: Optional[ControllerInput]) -> TelemetryRecord:
        """Advance one tick; a missing input is the zero-command fail-safe."""
        if inp is None:
            inp = ControllerInput(tick=self.world.tick)

        if self._pending_tighten is not None:
            apply_tighten(self.world, self._pending_tighten.delta)
            self._pending_tighten = None

        command = self.mapper.map_input(inp)
        step_physics(self.world, command, self.dt, self.config.gripper_speed)
        frame1 = render_tactile(self.world, 1)
        frame2 = render_tactile(self.world, 2)
        self.last_frames = {1: frame1, 2: frame2}

        self._handle_calibration(inp, frame1, frame2)

        if self.calibrated:
            sample = self.haptics.step(frame1, frame2, tick=self.world.tick)
        else:
            sample = FeedbackSample(tick=self.world.tick, ratio_s1=0.0, ratio_s2=0.0,
                                    ratio_mean=0.0, intensity=0.0)

        slip_event = None
        if self.partial_autonomy and self.calibrated:
            thresholds = {s: self.haptics.calibrations[s].noise_threshold for s in (1, 2)}
            result = self.guard.tick(frame1, frame2, sample.ratio_s1, sample.ratio_s2,
                                     inp, thresholds, tick=self.world.tick)
            if result is not None:
                slip_event, self._pending_tighten = result
                self.slip_events.append(slip_event)

        record = TelemetryRecord(
            tick=self.world.tick, feedback=sample, command=command,
            opening=self.world.gripper.opening,
            opening_setpoint=self.world.gripper.opening_setpoint,
            gripper_pose=tuple(self.world.gripper.position) + tuple(self.world.gripper.orientation),
            object_pose=tuple(self.world.object_position),
            object_status=self.world.status.value,
            guard_phase=self.guard.phase.value,
            slip_count=self.guard.slip_count,
            slip_event=slip_event,
            frame_hash_s1=frame1.content_hash(),
            frame_hash_s2=frame2.content_hash(),
            calibrated=self.calibrated)
        self.records.append(record)
        return record

    def _handle_calibration(self, inp: ControllerInput, frame1, frame2) -> None:
        pressed = inp.button_b and not self._prev_button_b
        self._prev_button_b = inp.button_b
        if pressed and self._calibration_buffer is None:
            self._calibration_buffer = {1: [], 2: []}
        if self._calibration_buffer is None:
            return
        self._calibration_buffer[1].append(frame1)
        self._calibration_buffer[2].append(frame2)
        if len(self._calibration_buffer[1]) >= self.config.calibration_frames:
            for s in (1, 2):
                self.haptics.set_calibration(
                    calibrate(self._calibration_buffer[s], self.config.reference_frames))
            self._calibration_buffer = None


def run_session(config: SessionConfig, operator: OperatorSource, ticks: int,
                presets: Optional[dict] = None) -> tuple[list[TelemetryRecord], SessionMetrics]:
    session = Session(config, presets=presets)
    for k in range(ticks):
        session.tick(operator(k))
    return session.records, compute_metrics(session.records, config)


def compute_metrics(records: list[TelemetryRecord], config: SessionConfig) -> SessionMetrics:
    if not records:
        raise ValueError("cannot compute metrics of an empty telemetry stream")
    slip_count = (sum(1 for r in records if r.slip_event is not None)
                  if config.partial_autonomy else None)
    return SessionMetrics(
        duration=len(records) / config.tick_rate_hz,
        min_opening=min(r.opening for r in records),
        slip_count=slip_count,
        damaged=any(r.object_status == "damaged" for r in records),
        delivered=records[-1].object_status == "delivered")


def telemetry_hash(records: Iterable[TelemetryRecord]) -> str:
    digest = hashlib.sha256()
    for record in records:
        digest.update(json.dumps(record.to_dict(), sort_keys=True,
                                 separators=(",", ":")).encode())
        digest.update(b"\n")
    return digest.hexdigest()


def _input_to_dict(inp: ControllerInput) -> dict:
    return {"tick": inp.tick, "lin": list(inp.linear_velocity),
            "ang": list(inp.angular_velocity), "a": inp.button_a, "b": inp.button_b,
            "back": inp.back_trigger, "side": inp.side_trigger}


def _input_from_dict(d: dict) -> ControllerInput:
    return ControllerInput(tick=d["tick"], linear_velocity=tuple(d["lin"]),
                           angular_velocity=tuple(d["ang"]), button_a=d["a"],
                           button_b=d["b"], back_trigger=d["back"], side_trigger=d["side"])


def record_log(path: str | Path, config: SessionConfig,
               operator: OperatorSource, ticks: int,
               presets: Optional[dict] = None) -> tuple[list[TelemetryRecord], SessionMetrics]:
    """Run a session and write one JSON object per tick after a header line."""
    session = Session(config, presets=presets)
    with open(path, "w") as fh:
        fh.write(json.dumps({"schema": LOG_SCHEMA, "config": config.to_dict()}) + "\n")
        for k in range(ticks):
            inp = operator(k)
            record = session.tick(inp)
            line = {"tick": record.tick,
                    "input": _input_to_dict(inp) if inp is not None else None,
                    "telemetry": record.to_dict()}
            fh.write(json.dumps(line, sort_keys=True) + "\n")
    return session.records, compute_metrics(session.records, config)


def load_log(path: str | Path) -> tuple[SessionConfig, list[Optional[ControllerInput]], list[dict]]:
    """Parse a session log into (config, inputs, telemetry dicts)."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ReplayError("empty log file")
    header = json.loads(lines[0])
    if header.get("schema") != LOG_SCHEMA:
        raise ReplayError(f"unsupported log schema: {header.get('schema')!r}")
    config = config_from_dict(header["config"])
    inputs: list[Optional[ControllerInput]] = []
    telemetry: list[dict] = []
    expected_tick = 1
    for lineno, raw in enumerate(lines[1:], start=2):
        try:
            entry = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ReplayError(f"corrupt log line {lineno}: {exc}") from exc
        if entry.get("tick") != expected_tick:
            raise ReplayError(f"line {lineno}: expected tick {expected_tick}, "
                              f"got {entry.get('tick')}")
        inputs.append(_input_from_dict(entry["input"]) if entry["input"] else None)
        telemetry.append(entry["telemetry"])
        expected_tick += 1
    return config, inputs, telemetry


def replay_log(path: str | Path,
               presets: Optional[dict] = None) -> tuple[list[TelemetryRecord], SessionMetrics, bool]:
    """Re-run a recorded session; the final flag reports hash fidelity."""
    config, inputs, telemetry = load_log(path)
    operator = lambda k: inputs[k] if k < len(inputs) else None
    records, metrics = run_session(config, operator, len(inputs), presets=presets)
    original = hashlib.sha256()
    for entry in telemetry:
        original.update(json.dumps(entry, sort_keys=True, separators=(",", ":")).encode())
        original.update(b"\n")
    return records, metrics, telemetry_hash(records) == original.hexdigest()
