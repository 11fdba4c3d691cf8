"""Wire protocol models and the shared JSON schema.

Messages travel as JSON objects over the session WebSocket. Client to
server: "input" and "control". Server to client: "telemetry" and
"tactile". Field names and units are part of the contract shared with the
operator console.
"""

from __future__ import annotations

import base64
from typing import Literal, Optional, Union

from pydantic import BaseModel, Field, TypeAdapter

from .frames import TactileFrame
from .session import TelemetryRecord

WIRE_PRECISION = 6  # intensity and ratios are quantized at the wire only


class InputMessage(BaseModel):
    type: Literal["input"] = "input"
    tick: int = Field(ge=0)
    lin: tuple[float, float, float]
    ang: tuple[float, float, float]
    a: bool
    b: bool
    back: bool
    side: bool


class ControlMessage(BaseModel):
    type: Literal["control"] = "control"
    action: Literal["set_pa", "reset", "select_object"]
    value: Optional[Union[bool, str]] = None


class TelemetryMessage(BaseModel):
    type: Literal["telemetry"] = "telemetry"
    tick: int = Field(ge=0)
    f: float = Field(ge=0.0, le=1.0)
    p1: float = Field(ge=0.0, le=1.0)
    p2: float = Field(ge=0.0, le=1.0)
    opening: float
    guard_phase: Literal["inactive", "acquiring", "armed"]
    slip_count: int = Field(ge=0)
    object_status: Literal["free", "grasped", "attached", "slipping",
                           "dropped", "damaged", "delivered"]
    gripper_pose: tuple[float, float, float, float, float, float]
    object_pose: tuple[float, float, float]


class TactileMessage(BaseModel):
    type: Literal["tactile"] = "tactile"
    tick: int = Field(ge=0)
    sensor: Literal[1, 2]
    width: int = Field(ge=1)
    height: int = Field(ge=1)
    encoding: Literal["base64-rgb8"] = "base64-rgb8"
    data: str


ClientMessage = Union[InputMessage, ControlMessage]
ServerMessage = Union[TelemetryMessage, TactileMessage]

_client_adapter: TypeAdapter = TypeAdapter(ClientMessage)
_server_adapter: TypeAdapter = TypeAdapter(ServerMessage)


def parse_client_message(data: dict) -> ClientMessage:
    return _client_adapter.validate_python(data)


def parse_server_message(data: dict) -> ServerMessage:
    return _server_adapter.validate_python(data)


def telemetry_message(record: TelemetryRecord) -> TelemetryMessage:
    return TelemetryMessage(
        tick=record.tick,
        f=round(record.feedback.intensity, WIRE_PRECISION),
        p1=round(record.feedback.ratio_s1, WIRE_PRECISION),
        p2=round(record.feedback.ratio_s2, WIRE_PRECISION),
        opening=record.opening,
        guard_phase=record.guard_phase,
        slip_count=record.slip_count,
        object_status=record.object_status,
        gripper_pose=record.gripper_pose,
        object_pose=record.object_pose)


def tactile_message(frame: TactileFrame) -> TactileMessage:
    return TactileMessage(tick=frame.tick, sensor=frame.sensor_id,
                          width=frame.width, height=frame.height,
                          data=base64.b64encode(frame.to_rgb8()).decode("ascii"))


def build_protocol_schema() -> dict:
    """One JSON Schema covering every message type, keyed on "type"."""
    defs: dict = {}
    variants = []
    for model in (InputMessage, ControlMessage, TelemetryMessage, TactileMessage):
        schema = model.model_json_schema(ref_template="#/$defs/{model}")
        defs.update(schema.pop("$defs", {}))
        defs[model.__name__] = schema
        variants.append({"$ref": f"#/$defs/{model.__name__}"})
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "tactile-teleop wire protocol",
        "oneOf": variants,
        "$defs": defs,
    }
