"""FastAPI service hosting one live session over a WebSocket.

The tick loop runs as a background task owning all mutable session state;
WebSocket ingress only swaps the latest input (latest-wins per tick) and
egress drains per-client queues so a slow client never blocks the loop.
"""

from __future__ import annotations

import asyncio
import contextlib
import logging
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from pydantic import ValidationError

from .commands import ControllerInput
from .config import SessionConfig
from .protocol import (ControlMessage, InputMessage, parse_client_message,
                       tactile_message, telemetry_message)
from .session import Session, compute_metrics

log = logging.getLogger(__name__)

SUBSCRIBER_QUEUE_SIZE = 256


class SessionRuntime:
    """Single-writer tick loop plus message fan-out."""

    def __init__(self, config: SessionConfig):
        self.config = config
        self.session = Session(config)
        self._fresh_input: Optional[ControllerInput] = None
        self._subscribers: set[asyncio.Queue] = set()
        self._task: Optional[asyncio.Task] = None
        self._control_lock = asyncio.Lock()

    def subscribe(self) -> asyncio.Queue:
        queue: asyncio.Queue = asyncio.Queue(maxsize=SUBSCRIBER_QUEUE_SIZE)
        self._subscribers.add(queue)
        return queue

    def unsubscribe(self, queue: asyncio.Queue) -> None:
        self._subscribers.discard(queue)

    def submit_input(self, msg: InputMessage) -> None:
        self._fresh_input = ControllerInput(
            tick=msg.tick, linear_velocity=msg.lin, angular_velocity=msg.ang,
            button_a=msg.a, button_b=msg.b, back_trigger=msg.back, side_trigger=msg.side)

    async def handle_control(self, msg: ControlMessage) -> None:
        async with self._control_lock:
            if msg.action == "set_pa":
                self.session.partial_autonomy = bool(msg.value)
            elif msg.action == "reset":
                self.session = Session(self.config)
                self._fresh_input = None
            elif msg.action == "select_object":
                self.config = self.config.replace(object=str(msg.value))
                self.session = Session(self.config)
                self._fresh_input = None

    def _broadcast(self, payload: dict) -> None:
        for queue in self._subscribers:
            try:
                queue.put_nowait(payload)
            except asyncio.QueueFull:
                pass  # slow consumer: drop rather than stall the tick loop

    def step(self) -> None:
        """One tick; missing fresh input falls back to zero commands."""
        inp, self._fresh_input = self._fresh_input, None
        record = self.session.tick(inp)
        self._broadcast(telemetry_message(record).model_dump())
        if record.tick % self.config.tactile_stream_divisor == 0:
            for sensor in (1, 2):
                frame = self.session.last_frames[sensor]
                if frame is not None:
                    self._broadcast(tactile_message(frame).model_dump())

    async def run(self) -> None:
        loop = asyncio.get_running_loop()
        period = 1.0 / self.config.tick_rate_hz
        next_deadline = loop.time()
        while True:
            async with self._control_lock:
                self.step()
            next_deadline += period
            await asyncio.sleep(max(0.0, next_deadline - loop.time()))

    def start(self) -> None:
        self._task = asyncio.get_running_loop().create_task(self.run())

    async def stop(self) -> None:
        if self._task is not None:
            self._task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await self._task
            self._task = None


def create_app(config: Optional[SessionConfig] = None) -> FastAPI:
    runtime = SessionRuntime(config or SessionConfig())

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        runtime.start()
        yield
        await runtime.stop()

    app = FastAPI(title="tactile-teleop", lifespan=lifespan)
    app.state.runtime = runtime

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "tick": runtime.session.world.tick}

    @app.get("/config")
    def get_config():
        return runtime.config.to_dict()

    @app.get("/metrics")
    def get_metrics():
        records = runtime.session.records
        if not records:
            return {"error": "no telemetry yet"}
        return compute_metrics(records, runtime.config).to_dict()

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        queue = runtime.subscribe()

        async def egress():
            while True:
                await websocket.send_json(await queue.get())

        sender = asyncio.create_task(egress())
        try:
            while True:
                raw = await websocket.receive_json()
                try:
                    msg = parse_client_message(raw)
                except ValidationError as exc:
                    await websocket.send_json({"type": "error", "detail": str(exc)})
                    continue
                if isinstance(msg, InputMessage):
                    runtime.submit_input(msg)
                else:
                    await runtime.handle_control(msg)
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            runtime.unsubscribe(queue)
            # disconnected operator: the loop keeps running on zero commands

    return app
