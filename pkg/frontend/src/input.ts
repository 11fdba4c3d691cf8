// Keyboard state to input-message synthesis.
//
// Held keys are accumulated into a set by keydown/keyup listeners; a fixed
// rate timer snapshots the set into protocol input messages. Velocities are
// synthesized directly (no pose tracking), which the server maps unchanged.

import type { InputMessage } from "./protocol.js";

export interface BindingProfile {
  /** Linear velocity magnitude for a held direction key, m/s. */
  linearSpeed: number;
  /** Angular velocity magnitude for a held rotation key, rad/s. */
  angularSpeed: number;
  /** key code -> effect */
  keys: Record<string, KeyEffect>;
}

export type KeyEffect =
  | { axis: "lin" | "ang"; index: 0 | 1 | 2; sign: 1 | -1 }
  | { button: "a" | "b" | "back" | "side" };

export const DEFAULT_BINDINGS: BindingProfile = {
  linearSpeed: 0.05,
  angularSpeed: 0.5,
  keys: {
    KeyW: { axis: "lin", index: 0, sign: 1 },
    KeyS: { axis: "lin", index: 0, sign: -1 },
    KeyA: { axis: "lin", index: 1, sign: 1 },
    KeyD: { axis: "lin", index: 1, sign: -1 },
    ArrowUp: { axis: "lin", index: 2, sign: 1 },
    ArrowDown: { axis: "lin", index: 2, sign: -1 },
    KeyQ: { axis: "ang", index: 2, sign: 1 },
    KeyE: { axis: "ang", index: 2, sign: -1 },
    Space: { button: "a" },
    KeyC: { button: "b" },
    KeyG: { button: "back" },
    KeyR: { button: "side" },
  },
};

/** Turn the currently held keys into one protocol input message. */
export function synthesizeInput(
  held: ReadonlySet<string>,
  tick: number,
  bindings: BindingProfile = DEFAULT_BINDINGS,
): InputMessage {
  const lin: [number, number, number] = [0, 0, 0];
  const ang: [number, number, number] = [0, 0, 0];
  const msg: InputMessage = {
    type: "input",
    tick,
    lin,
    ang,
    a: false,
    b: false,
    back: false,
    side: false,
  };
  for (const code of held) {
    const effect = bindings.keys[code];
    if (effect === undefined) continue;
    if ("button" in effect) {
      msg[effect.button] = true;
    } else if (effect.axis === "lin") {
      lin[effect.index] += effect.sign * bindings.linearSpeed;
    } else {
      ang[effect.index] += effect.sign * bindings.angularSpeed;
    }
  }
  return msg;
}

/**
 * Fixed-rate input pump. Emission is driven by an injected timer so tests
 * can run it against a loopback server with real wall-clock pacing.
 */
export class InputPump {
  private held = new Set<string>();
  private tick = 0;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly send: (msg: InputMessage) => void,
    private readonly rateHz: number,
    private readonly bindings: BindingProfile = DEFAULT_BINDINGS,
  ) {
    if (rateHz <= 0 || rateHz > 60) {
      throw new Error(`input rate ${rateHz} Hz outside (0, 60]`);
    }
  }

  keyDown(code: string): void {
    this.held.add(code);
  }

  keyUp(code: string): void {
    this.held.delete(code);
  }

  /** Snapshot held keys into a message; exposed for direct-drive tests. */
  pump(): InputMessage {
    const msg = synthesizeInput(this.held, this.tick++, this.bindings);
    this.send(msg);
    return msg;
  }

  start(): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => this.pump(), 1000 / this.rateHz);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
