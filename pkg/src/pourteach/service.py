"""Live teaching service: one episode per websocket session, human input
from the connected client.

All messages are JSON objects with a "type" field. The client sends start /
correct / pause / resume / reset; the server answers each with an ack (or an
error that leaves the session unchanged) and, while running, emits one tick
message per simulation step carrying state, the active primitive, and the
full belief histogram.

Sessions begin paused: start builds the episode and the client resumes it
when ready, which also makes scripted replays align corrections with tick 0
deterministically. Client corrections are sampled-and-held for at most
DEADMAN_TICKS ticks, so a released grip (or a dropped connection) decays to
zero input instead of replaying stale intent. Inbound messages are applied
only between ticks; the session loop is the single writer of session state.
"""

from __future__ import annotations

import asyncio
import json
import uuid
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .belief import DegeneratePosteriorError
from .config import ConfigError, episode_config_from_dict
from .episode import TickLoop
from .observation import ZERO_ACTION, HumanAction

DEADMAN_TICKS = 2
VERT_RATE_LIMIT = 0.5  # m/s, client vertical corrections are clamped here
DEFAULT_TICK_HZ = 50.0
MIN_TICK_HZ = 10.0


def _error(reason: str) -> dict:
    return {"type": "error", "reason": reason}


def _ack(of: str, **extra) -> dict:
    msg = {"type": "ack", "of": of}
    msg.update(extra)
    return msg


@dataclass
class _Held:
    action: HumanAction
    arrival_tick: int


class TeachSession:
    """State machine for one live episode; tick() and handle() are only ever
    called from the session loop, between ticks."""

    def __init__(self) -> None:
        self.session_id = str(uuid.uuid4())
        self.loop: TickLoop | None = None
        self.paused = True
        self.held: _Held | None = None
        self.pending: HumanAction | None = None  # correction sent while paused

    @property
    def running(self) -> bool:
        return self.loop is not None and not self.paused

    def handle(self, raw: str) -> list[dict]:
        """Apply one inbound message; returns the replies to send."""
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError:
            return [_error("message is not valid JSON")]
        if not isinstance(msg, dict) or "type" not in msg:
            return [_error("message must be an object with a 'type' field")]
        kind = msg["type"]
        if kind == "start":
            return self._handle_start(msg)
        if kind == "correct":
            return self._handle_correct(msg)
        if kind == "pause":
            self.paused = True
            return [_ack("pause")]
        if kind == "resume":
            if self.loop is None:
                return [_error("no session started")]
            self.paused = False
            if self.pending is not None:
                self.held = _Held(self.pending, self.loop.tick_index)
                self.pending = None
            return [_ack("resume")]
        if kind == "reset":
            if self.loop is None:
                return [_error("no session started")]
            self.loop = TickLoop(self.loop.cfg)
            self.held = None
            self.pending = None
            self.paused = True
            return [_ack("reset")]
        return [_error(f"unknown message type: {kind!r}")]

    def _handle_start(self, msg: dict) -> list[dict]:
        try:
            cfg = episode_config_from_dict(msg.get("config", {}))
        except ConfigError as exc:
            return [_error(str(exc))]
        self.loop = TickLoop(cfg)
        self.held = None
        self.pending = None
        self.paused = True
        return [_ack("start", session=self.session_id,
                     tick_dt=cfg.env.dt, grid_count=cfg.grid.count)]

    def _handle_correct(self, msg: dict) -> list[dict]:
        if self.loop is None:
            return [_error("no session started")]
        try:
            u_tilt = float(msg.get("u_h_tilt", 0.0))
            u_vert = float(msg.get("u_h_vert", 0.0))
        except (TypeError, ValueError):
            return [_error("correction components must be numbers")]
        r_max = self.loop.cfg.obs.r_max
        clamped_tilt = min(max(u_tilt, -r_max), r_max)
        clamped_vert = min(max(u_vert, -VERT_RATE_LIMIT), VERT_RATE_LIMIT)
        clamped = clamped_tilt != u_tilt or clamped_vert != u_vert
        action = HumanAction(u_h_tilt=clamped_tilt, u_h_vert=clamped_vert)
        if self.paused:
            self.pending = action
        else:
            self.held = _Held(action, self.loop.tick_index)
        return [_ack("correct", clamped=clamped)]

    def _applied_correction(self) -> HumanAction:
        if self.held is None:
            return ZERO_ACTION
        if self.loop.tick_index - self.held.arrival_tick >= DEADMAN_TICKS:
            return ZERO_ACTION
        return self.held.action

    def tick(self) -> dict | None:
        """Advance one simulation step; returns the outbound message."""
        if not self.running:
            return None
        loop = self.loop
        n = loop.tick_index
        source_g = loop.env.source_g
        u_h = self._applied_correction()
        try:
            row = loop.advance(lambda _x, _u: u_h)
        except DegeneratePosteriorError as exc:
            self.paused = True
            return _error(f"degenerate posterior, session paused: {exc}")
        belief = [{"beta": float(b), "w": float(w)}
                  for b, w in zip(loop.grid.values, loop.belief.weights)]
        return {
            "type": "tick",
            "n": n,
            "t": row.t,
            "tilt": row.tilt,
            "poured": row.poured_sensed,
            "source": source_g,
            "primitive": row.primitive,
            "u_r": row.u_r_tilt,
            "u_h": row.u_h_tilt,
            "map": row.map_g,
            "mean": row.mean_g,
            "entropy": row.entropy,
            "belief": belief,
        }


def create_app(tick_hz: float = DEFAULT_TICK_HZ, ui_dir: str | Path | None = None) -> FastAPI:
    tick_hz = max(float(tick_hz), MIN_TICK_HZ)
    period = 1.0 / tick_hz
    app = FastAPI(title="pourteach teaching service")

    @app.get("/healthz", response_class=PlainTextResponse)
    async def healthz() -> str:
        return "ok"

    @app.websocket("/session")
    async def session_socket(ws: WebSocket) -> None:
        await ws.accept()
        inbox: asyncio.Queue[str | None] = asyncio.Queue()

        async def reader() -> None:
            try:
                while True:
                    await inbox.put(await ws.receive_text())
            except WebSocketDisconnect:
                await inbox.put(None)

        reader_task = asyncio.create_task(reader())
        session = TeachSession()
        try:
            connected = True
            while connected:
                while True:
                    try:
                        item = inbox.get_nowait()
                    except asyncio.QueueEmpty:
                        break
                    if item is None:
                        connected = False
                        break
                    for reply in session.handle(item):
                        await ws.send_json(reply)
                if not connected:
                    break
                out = session.tick()
                if out is not None:
                    await ws.send_json(out)
                await asyncio.sleep(period)
        except WebSocketDisconnect:
            pass
        finally:
            reader_task.cancel()

    if ui_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "public"
        ui_dir = candidate if candidate.is_dir() else None
    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app
