// Entry point: wires the WebSocket, input pump, and render loop together.
// Configuration comes from URL parameters: ?server=host:port&rate=30

import { InputPump } from "./input.js";
import { serializeClientMessage } from "./protocol.js";
import {
  DEFAULT_VIEWPORT,
  drawIntensityBar,
  drawTactile,
  drawWorkspace,
  statusLine,
  vibrate,
} from "./render.js";
import { ConsoleState } from "./state.js";

function canvasCtx(id: string): CanvasRenderingContext2D {
  const canvas = document.getElementById(id) as HTMLCanvasElement | null;
  if (canvas === null) throw new Error(`missing canvas #${id}`);
  const ctx = canvas.getContext("2d");
  if (ctx === null) throw new Error(`no 2d context on #${id}`);
  return ctx;
}

export function start(): void {
  const params = new URLSearchParams(window.location.search);
  const server = params.get("server") ?? "127.0.0.1:8000";
  const rateHz = Number(params.get("rate") ?? "30");

  const state = new ConsoleState();
  const socket = new WebSocket(`ws://${server}/ws`);
  const pump = new InputPump(
    (msg) => {
      if (socket.readyState === WebSocket.OPEN) {
        socket.send(serializeClientMessage(msg));
      }
    },
    rateHz,
  );

  socket.onopen = () => {
    state.connected = true;
    pump.start();
  };
  socket.onclose = () => {
    state.connected = false;
    pump.stop();
  };
  socket.onmessage = (event) => state.ingest(String(event.data));

  window.addEventListener("keydown", (e) => pump.keyDown(e.code));
  window.addEventListener("keyup", (e) => pump.keyUp(e.code));

  const workspace = canvasCtx("workspace");
  const bar = canvasCtx("intensity");
  const tactile = { 1: canvasCtx("tactile-1"), 2: canvasCtx("tactile-2") } as const;
  const status = document.getElementById("status");
  const banner = document.getElementById("banner");

  const frame = (): void => {
    if (state.telemetry !== null) {
      drawWorkspace(workspace, state.telemetry, DEFAULT_VIEWPORT);
    }
    drawIntensityBar(bar, state.intensity, 240, 24);
    for (const sensor of [1, 2] as const) {
      const view = state.tactile[sensor];
      if (view !== null) drawTactile(tactile[sensor], view);
    }
    if (status !== null) status.textContent = statusLine(state);
    if (banner !== null) {
      banner.style.display = state.connected ? "none" : "block";
    }
    const pads = navigator.getGamepads?.() ?? [];
    vibrate(pads[0] ?? null, state.intensity);
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  start();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", start);
}
