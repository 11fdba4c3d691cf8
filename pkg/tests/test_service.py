import base64

from fastapi.testclient import TestClient

from tactile_teleop.config import SessionConfig
from tactile_teleop.protocol import InputMessage, parse_server_message
from tactile_teleop.service import SessionRuntime, create_app

CONFIG = SessionConfig(seed=5, frame_size=16, calibration_frames=20,
                       tactile_stream_divisor=6)


def make_client():
    return TestClient(create_app(CONFIG))


def drain_until(ws, wanted_type, limit=200):
    for _ in range(limit):
        msg = ws.receive_json()
        if msg["type"] == wanted_type:
            return msg
    raise AssertionError(f"no {wanted_type!r} message within {limit} frames")


class TestRest:
    def test_healthz(self):
        with make_client() as client:
            body = client.get("/healthz").json()
            assert body["status"] == "ok"
            assert body["tick"] >= 0

    def test_config_endpoint(self):
        with make_client() as client:
            body = client.get("/config").json()
            assert body["seed"] == 5
            assert body["object"] == "lime"
            assert body["alpha"] == 1000.0

    def test_metrics_endpoint(self):
        with make_client() as client:
            with client.websocket_connect("/ws") as ws:
                drain_until(ws, "telemetry")
            body = client.get("/metrics").json()
            assert body["duration"] > 0.0
            assert body["damaged"] is False


class TestWebSocket:
    def test_telemetry_stream_is_valid(self):
        with make_client() as client, client.websocket_connect("/ws") as ws:
            msg = drain_until(ws, "telemetry")
            parsed = parse_server_message(msg)
            assert 0.0 <= parsed.f <= 1.0
            assert parsed.object_status == "free"
            assert parsed.guard_phase == "inactive"

    def test_tactile_stream_decodes(self):
        with make_client() as client, client.websocket_connect("/ws") as ws:
            msg = drain_until(ws, "tactile")
            parsed = parse_server_message(msg)
            assert msg["tick"] % CONFIG.tactile_stream_divisor == 0
            assert parsed.encoding == "base64-rgb8"
            raw = base64.b64decode(parsed.data)
            assert len(raw) == parsed.width * parsed.height * 3
            assert (parsed.width, parsed.height) == (16, 16)

    def test_input_drives_gripper(self):
        with make_client() as client, client.websocket_connect("/ws") as ws:
            first = drain_until(ws, "telemetry")
            ws.send_json({"type": "input", "tick": first["tick"],
                          "lin": [0, 0, 0], "ang": [0, 0, 0],
                          "a": False, "b": False, "back": True, "side": False})
            for _ in range(40):
                last = drain_until(ws, "telemetry")
                ws.send_json({"type": "input", "tick": last["tick"],
                              "lin": [0, 0, 0], "ang": [0, 0, 0],
                              "a": False, "b": False, "back": True, "side": False})
            assert last["opening"] < first["opening"]

    def test_invalid_message_gets_error_reply(self):
        with make_client() as client, client.websocket_connect("/ws") as ws:
            ws.send_json({"type": "control", "action": "shutdown"})
            for _ in range(200):
                msg = ws.receive_json()
                if msg["type"] == "error":
                    break
            else:
                raise AssertionError("no error reply")
            assert "action" in msg["detail"]

    def test_control_set_pa(self):
        with make_client() as client, client.websocket_connect("/ws") as ws:
            runtime: SessionRuntime = client.app.state.runtime
            assert runtime.session.partial_autonomy
            ws.send_json({"type": "control", "action": "set_pa", "value": False})
            for _ in range(200):
                ws.receive_json()
                if not runtime.session.partial_autonomy:
                    break
            assert not runtime.session.partial_autonomy

    def test_control_select_object_resets_session(self):
        with make_client() as client, client.websocket_connect("/ws") as ws:
            runtime: SessionRuntime = client.app.state.runtime
            ws.send_json({"type": "control", "action": "select_object",
                          "value": "grape"})
            for _ in range(200):
                ws.receive_json()
                if runtime.config.object == "grape":
                    break
            assert runtime.config.object == "grape"
            assert runtime.session.world.model.name == "grape"


class TestRuntime:
    def test_latest_input_wins(self):
        runtime = SessionRuntime(CONFIG)
        for tick in range(3):
            runtime.submit_input(InputMessage(
                tick=tick, lin=(0.01 * tick, 0, 0), ang=(0, 0, 0),
                a=True, b=False, back=False, side=False))
        assert runtime._fresh_input.linear_velocity == (0.02, 0.0, 0.0)
        runtime.step()
        # the buffered input is consumed, the next tick falls back to zero
        assert runtime._fresh_input is None

    def test_slow_subscriber_drops_not_blocks(self):
        runtime = SessionRuntime(CONFIG)
        queue = runtime.subscribe()
        for _ in range(3000):
            runtime.step()
        assert queue.full()
        assert runtime.session.world.tick == 3000
