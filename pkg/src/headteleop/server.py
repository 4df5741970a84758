"""WebSocket service wrapping the tick pipeline.

One authoritative operator connection may send inputs; any further
connections are read-only observers.  The loop ticks at the configured
rate, consumes queued inbound messages, and fans the per-tick snapshot
out to every connection with its role attached.
"""

from __future__ import annotations

import asyncio
import os
import time

from websockets.asyncio.server import serve as ws_serve
from websockets.exceptions import ConnectionClosed

from .config import ServerConfig
from .pipeline import TickPipeline
from .protocol import ProtocolError, canonical_json, parse_inbound_json
from .session import SessionLogWriter
from .sim import load_scenario, load_scenario_file


class TeleopServer:
    def __init__(self, config: ServerConfig, scenario=None, log_path=None):
        self.config = config
        if scenario is None:
            if config.scenario_file:
                scenario = load_scenario_file(config.scenario_file)
            else:
                scenario = load_scenario(config.scenario)
        self.scenario = scenario
        self._log_path = log_path
        self.pipeline: TickPipeline | None = None
        self._connections: list = []  # insertion order; first is authoritative
        self._inbox: list[dict] = []
        self._server = None
        self._tick_task = None
        self._writer = None

    # -- lifecycle ---------------------------------------------------------

    async def start(self):
        cfg = self.config
        if self._log_path is None:
            os.makedirs(cfg.log_dir, exist_ok=True)
            stamp = time.strftime("%Y%m%d-%H%M%S")
            self._log_path = os.path.join(cfg.log_dir, f"session-{stamp}.ndjson")
        self._writer = SessionLogWriter.open_path(
            self._log_path, cfg.digest(), self.scenario.name)
        self.pipeline = TickPipeline(cfg, self.scenario, log_writer=self._writer)
        self._server = await ws_serve(self._handler, cfg.listen_host,
                                      cfg.listen_port)
        self._tick_task = asyncio.create_task(self._tick_loop())

    @property
    def port(self) -> int:
        return self._server.sockets[0].getsockname()[1]

    async def stop(self):
        if self._tick_task is not None:
            self._tick_task.cancel()
            try:
                await self._tick_task
            except asyncio.CancelledError:
                pass
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
        if self._writer is not None:
            self._writer.close()

    # -- connections -------------------------------------------------------

    def _role(self, ws) -> str:
        return "authoritative" if self._connections and \
            self._connections[0] is ws else "observer"

    async def _handler(self, ws):
        self._connections.append(ws)
        try:
            async for raw in ws:
                try:
                    msg = parse_inbound_json(raw)
                except ProtocolError as exc:
                    await ws.send(canonical_json(
                        {"error": str(exc), "field": exc.field}))
                    continue
                if self._role(ws) != "authoritative":
                    await ws.send(canonical_json(
                        {"error": "observer connections are read-only",
                         "field": "type"}))
                    continue
                self._inbox.append(msg)
        except ConnectionClosed:
            pass
        finally:
            self._connections.remove(ws)

    # -- the loop ----------------------------------------------------------

    async def _tick_loop(self):
        dt = self.config.dt
        loop = asyncio.get_running_loop()
        next_deadline = loop.time()
        while True:
            messages, self._inbox = self._inbox, []
            snapshot = self.pipeline.tick(messages)
            for ws in list(self._connections):
                framed = dict(snapshot)
                framed["role"] = self._role(ws)
                try:
                    await ws.send(canonical_json(framed))
                except ConnectionClosed:
                    pass
            next_deadline += dt
            delay = next_deadline - loop.time()
            if delay < 0:  # fell behind; don't accumulate debt
                next_deadline = loop.time()
                delay = 0.0
            await asyncio.sleep(delay)


async def serve_async(config: ServerConfig, scenario=None, log_path=None):
    server = TeleopServer(config, scenario, log_path)
    await server.start()
    return server


def serve(config: ServerConfig):
    """Run the service until interrupted."""

    async def _main():
        server = await serve_async(config)
        print(f"listening on ws://{config.listen_host}:{server.port} "
              f"(scenario: {server.scenario.name})", flush=True)
        try:
            await asyncio.Future()
        finally:
            await server.stop()

    try:
        asyncio.run(_main())
    except KeyboardInterrupt:
        pass
