// Wire protocol types and codecs shared with the session service.
// Field names mirror schemas/protocol.schema.json exactly.

export interface InputMessage {
  type: "input";
  tick: number;
  lin: [number, number, number];
  ang: [number, number, number];
  a: boolean;
  b: boolean;
  back: boolean;
  side: boolean;
}

export interface ControlMessage {
  type: "control";
  action: "set_pa" | "reset" | "select_object";
  value: boolean | string | null;
}

export type GuardPhase = "inactive" | "acquiring" | "armed";

export type ObjectStatus =
  | "free"
  | "grasped"
  | "attached"
  | "slipping"
  | "dropped"
  | "damaged"
  | "delivered";

export interface TelemetryMessage {
  type: "telemetry";
  tick: number;
  f: number;
  p1: number;
  p2: number;
  opening: number;
  guard_phase: GuardPhase;
  slip_count: number;
  object_status: ObjectStatus;
  gripper_pose: [number, number, number, number, number, number];
  object_pose: [number, number, number];
}

export interface TactileMessage {
  type: "tactile";
  tick: number;
  sensor: 1 | 2;
  width: number;
  height: number;
  encoding: "base64-rgb8";
  data: string;
}

export type ServerMessage = TelemetryMessage | TactileMessage;
export type ClientMessage = InputMessage | ControlMessage;

const finite = (x: unknown): x is number =>
  typeof x === "number" && Number.isFinite(x);

const vec = (x: unknown, n: number): boolean =>
  Array.isArray(x) && x.length === n && x.every(finite);

/** Parse one raw server frame; returns null on anything malformed. */
export function parseServerMessage(raw: string): ServerMessage | null {
  let msg: unknown;
  try {
    msg = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof msg !== "object" || msg === null) return null;
  const m = msg as Record<string, unknown>;
  if (m.type === "telemetry") {
    if (
      !finite(m.tick) || !finite(m.f) || !finite(m.p1) || !finite(m.p2) ||
      !finite(m.opening) || !finite(m.slip_count) ||
      typeof m.guard_phase !== "string" || typeof m.object_status !== "string" ||
      !vec(m.gripper_pose, 6) || !vec(m.object_pose, 3)
    ) {
      return null;
    }
    return m as unknown as TelemetryMessage;
  }
  if (m.type === "tactile") {
    if (
      !finite(m.tick) || (m.sensor !== 1 && m.sensor !== 2) ||
      !finite(m.width) || !finite(m.height) ||
      m.encoding !== "base64-rgb8" || typeof m.data !== "string"
    ) {
      return null;
    }
    return m as unknown as TactileMessage;
  }
  return null;
}

export function serializeClientMessage(msg: ClientMessage): string {
  return JSON.stringify(msg);
}

/** Decode a base64-rgb8 payload into a width*height*3 byte buffer. */
export function decodeTactile(msg: TactileMessage): Uint8Array {
  const binary = typeof atob === "function"
    ? atob(msg.data)
    : Buffer.from(msg.data, "base64").toString("binary");
  const expected = msg.width * msg.height * 3;
  if (binary.length !== expected) {
    throw new Error(
      `tactile payload is ${binary.length} bytes, expected ${expected}`,
    );
  }
  const bytes = new Uint8Array(expected);
  for (let i = 0; i < expected; i++) {
    bytes[i] = binary.charCodeAt(i);
  }
  return bytes;
}

/** Expand rgb8 bytes to the rgba layout canvas ImageData wants. */
export function rgbToRgba(rgb: Uint8Array): Uint8ClampedArray<ArrayBuffer> {
  const pixels = rgb.length / 3;
  const rgba = new Uint8ClampedArray(pixels * 4);
  for (let i = 0; i < pixels; i++) {
    rgba[i * 4] = rgb[i * 3]!;
    rgba[i * 4 + 1] = rgb[i * 3 + 1]!;
    rgba[i * 4 + 2] = rgb[i * 3 + 2]!;
    rgba[i * 4 + 3] = 255;
  }
  return rgba;
}
