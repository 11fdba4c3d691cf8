// Console state: a latest-value mailbox between network receive and render.
//
// The displayed intensity is always the f of the most recent telemetry,
// verbatim; there is no client-side smoothing or interpolation.

import {
  decodeTactile,
  parseServerMessage,
  rgbToRgba,
  type TactileMessage,
  type TelemetryMessage,
} from "./protocol.js";

export interface TactileView {
  tick: number;
  width: number;
  height: number;
  rgba: Uint8ClampedArray<ArrayBuffer>;
}

export class ConsoleState {
  connected = false;
  telemetry: TelemetryMessage | null = null;
  tactile: Record<1 | 2, TactileView | null> = { 1: null, 2: null };
  droppedMessages = 0;

  /** Intensity bar value in [0, 1]; 0 before the first telemetry. */
  get intensity(): number {
    return this.telemetry?.f ?? 0;
  }

  get slipCount(): number {
    return this.telemetry?.slip_count ?? 0;
  }

  get guardPhase(): string {
    return this.telemetry?.guard_phase ?? "inactive";
  }

  /** Ingest one raw frame; malformed input is counted, never thrown. */
  ingest(raw: string): void {
    const msg = parseServerMessage(raw);
    if (msg === null) {
      this.droppedMessages++;
      return;
    }
    if (msg.type === "telemetry") {
      this.telemetry = msg;
      return;
    }
    try {
      this.tactile[msg.sensor] = decodeView(msg);
    } catch {
      this.droppedMessages++;
    }
  }
}

function decodeView(msg: TactileMessage): TactileView {
  return {
    tick: msg.tick,
    width: msg.width,
    height: msg.height,
    rgba: rgbToRgba(decodeTactile(msg)),
  };
}
