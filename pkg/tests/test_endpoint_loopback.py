"""The endpoint wire protocol over a real loopback socket."""

from __future__ import annotations

import asyncio
import threading
import time

import uvicorn

from tunearena.domain.types import DetailedPrompt
from tunearena.endpoints import GenerateRequest, HttpEndpoint, build_endpoint_app, build_mock_system


class ServerThread:
    def __init__(self, app):
        self.config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
        self.server = uvicorn.Server(self.config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    def __enter__(self) -> str:
        self.thread.start()
        deadline = time.monotonic() + 10
        while not self.server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("server did not start")
            time.sleep(0.01)
        port = self.server.servers[0].sockets[0].getsockname()[1]
        return f"http://127.0.0.1:{port}"

    def __exit__(self, *exc):
        self.server.should_exit = True
        self.thread.join(timeout=10)


def test_endpoint_protocol_over_loopback():
    system = build_mock_system("tone", "tone-loopback")
    with ServerThread(build_endpoint_app(system)) as base_url:
        endpoint = HttpEndpoint(base_url)

        async def run():
            descriptor = await endpoint.capabilities()
            status = await endpoint.health(budget=5.0)
            response = await endpoint.generate(
                GenerateRequest(
                    detailed=DetailedPrompt(overall_prompt="loopback", instrumental=True),
                    deadline=30.0,
                )
            )
            await endpoint.aclose()
            return descriptor, status, response

        descriptor, status, response = asyncio.run(run())
    assert descriptor.key == system.descriptor.key
    assert status.healthy
    assert response.audio[:4] == b"RIFF"


def test_health_probe_times_out_against_slow_endpoint():
    system = build_mock_system("tone", "tone-sleepy", health_delay=0.8)
    with ServerThread(build_endpoint_app(system)) as base_url:
        endpoint = HttpEndpoint(base_url)

        async def run():
            slow = await endpoint.health(budget=0.2)
            fine = await endpoint.health(budget=5.0)
            await endpoint.aclose()
            return slow, fine

        slow, fine = asyncio.run(run())
    assert not slow.healthy
    assert "timeout" in slow.reason
    assert fine.healthy
