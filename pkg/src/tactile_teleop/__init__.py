"""Tactile-driven haptic teleoperation over a deterministic simulated gripper."""

from .commands import CommandMapper, ControllerInput, RobotCommand, VelocityLimits
from .config import SessionConfig, load_config, parse_config
from .frames import ShapeMismatchError, TactileFrame
from .haptics import FeedbackSample, HapticConfig, HapticMapper, feedback_curve
from .pipeline import (CalibrationError, FrameWindow, SensorCalibration,
                       VariationResult, calibrate, detect_variation)
from .session import (ScriptedOperator, Session, SessionMetrics, TelemetryRecord,
                      compute_metrics, record_log, replay_log, run_session,
                      telemetry_hash)
from .sim import ObjectModel, SimParams, WorldState, load_object_presets, make_world
from .slip import GuardPhase, SlipConfig, SlipEvent, SlipGuard, TightenCommand

__version__ = "0.1.0"

__all__ = [
    "CommandMapper", "ControllerInput", "RobotCommand", "VelocityLimits",
    "SessionConfig", "load_config", "parse_config",
    "ShapeMismatchError", "TactileFrame",
    "FeedbackSample", "HapticConfig", "HapticMapper", "feedback_curve",
    "CalibrationError", "FrameWindow", "SensorCalibration", "VariationResult",
    "calibrate", "detect_variation",
    "ScriptedOperator", "Session", "SessionMetrics", "TelemetryRecord",
    "compute_metrics", "record_log", "replay_log", "run_session",
    "telemetry_hash",
    "ObjectModel", "SimParams", "WorldState", "load_object_presets", "make_world",
    "GuardPhase", "SlipConfig", "SlipEvent", "SlipGuard", "TightenCommand",
]
