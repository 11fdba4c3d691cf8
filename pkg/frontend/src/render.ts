// Canvas rendering: workspace side view, tactile frames, intensity bar.

import type { ConsoleState, TactileView } from "./state.js";
import type { TelemetryMessage } from "./protocol.js";

/** Side-view projection: world x (m) right, world z (m) up. */
export interface Viewport {
  widthPx: number;
  heightPx: number;
  metersAcross: number;
  originX: number; // world x at the left edge
  originZ: number; // world z at the bottom edge
}

export const DEFAULT_VIEWPORT: Viewport = {
  widthPx: 480,
  heightPx: 320,
  metersAcross: 0.6,
  originX: -0.15,
  originZ: 0.0,
};

export function worldToPixel(
  x: number,
  z: number,
  vp: Viewport = DEFAULT_VIEWPORT,
): [number, number] {
  const scale = vp.widthPx / vp.metersAcross;
  return [(x - vp.originX) * scale, vp.heightPx - (z - vp.originZ) * scale];
}

const STATUS_COLORS: Record<string, string> = {
  free: "#8a8a8a",
  grasped: "#3a7bd5",
  attached: "#3a7bd5",
  slipping: "#e6a817",
  dropped: "#d9534f",
  damaged: "#d9534f",
  delivered: "#3cb371",
};

export function drawWorkspace(
  ctx: CanvasRenderingContext2D,
  telemetry: TelemetryMessage,
  vp: Viewport = DEFAULT_VIEWPORT,
): void {
  ctx.clearRect(0, 0, vp.widthPx, vp.heightPx);

  // table line
  ctx.strokeStyle = "#444";
  ctx.beginPath();
  const [, tableY] = worldToPixel(0, 0.15, vp);
  ctx.moveTo(0, tableY);
  ctx.lineTo(vp.widthPx, tableY);
  ctx.stroke();

  // goal region
  const [gx, gy] = worldToPixel(0.25, 0.19, vp);
  ctx.strokeStyle = "#3cb371";
  ctx.beginPath();
  ctx.arc(gx, gy, (0.1 * vp.widthPx) / vp.metersAcross, 0, 2 * Math.PI);
  ctx.stroke();

  // object
  const [ox, oy] = worldToPixel(
    telemetry.object_pose[0],
    telemetry.object_pose[2],
    vp,
  );
  ctx.fillStyle = STATUS_COLORS[telemetry.object_status] ?? "#8a8a8a";
  ctx.beginPath();
  ctx.arc(ox, oy, 10, 0, 2 * Math.PI);
  ctx.fill();

  // gripper: two fingers spaced by the live opening
  const [px, py] = worldToPixel(
    telemetry.gripper_pose[0],
    telemetry.gripper_pose[2],
    vp,
  );
  const half = (telemetry.opening / 2) * (vp.widthPx / vp.metersAcross);
  ctx.strokeStyle = "#222";
  ctx.lineWidth = 3;
  for (const side of [-1, 1]) {
    ctx.beginPath();
    ctx.moveTo(px + side * half, py - 18);
    ctx.lineTo(px + side * half, py + 18);
    ctx.stroke();
  }
  ctx.lineWidth = 1;
}

export function drawTactile(
  ctx: CanvasRenderingContext2D,
  view: TactileView,
): void {
  const image = new ImageData(view.rgba, view.width, view.height);
  ctx.putImageData(image, 0, 0);
}

export function drawIntensityBar(
  ctx: CanvasRenderingContext2D,
  intensity: number,
  widthPx: number,
  heightPx: number,
): void {
  ctx.clearRect(0, 0, widthPx, heightPx);
  ctx.fillStyle = "#ddd";
  ctx.fillRect(0, 0, widthPx, heightPx);
  ctx.fillStyle = intensity > 0.66 ? "#d9534f" : "#3a7bd5";
  ctx.fillRect(0, 0, intensity * widthPx, heightPx);
}

export function statusLine(state: ConsoleState): string {
  if (!state.connected) return "disconnected";
  const t = state.telemetry;
  if (t === null) return "connected, waiting for telemetry";
  return (
    `tick ${t.tick}  f=${t.f.toFixed(3)}  guard=${t.guard_phase}` +
    `  slips=${t.slip_count}  object=${t.object_status}`
  );
}

/** Drive the host vibration actuator (if any) at amplitude f. */
export function vibrate(gamepad: Gamepad | null, intensity: number): void {
  const actuator = (gamepad as unknown as {
    vibrationActuator?: {
      playEffect(kind: string, params: object): Promise<unknown>;
    };
  } | null)?.vibrationActuator;
  if (actuator === undefined || actuator === null) return;
  if (intensity <= 0) return;
  void actuator.playEffect("dual-rumble", {
    duration: 50,
    strongMagnitude: intensity,
    weakMagnitude: intensity,
  });
}
