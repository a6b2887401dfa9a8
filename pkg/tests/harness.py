"""Assembles a complete in-process platform for lifecycle tests.

Mock endpoints are mounted behind real ASGI apps and reached through the
HTTP client, so the full wire protocol is exercised without sockets. The
shared clock starts in a past month, which keeps every persisted timestamp
inside a closed export period.
"""

from __future__ import annotations

import asyncio
import random
import time
from dataclasses import dataclass, field

import httpx

from tunearena.endpoints import HttpEndpoint, build_endpoint_app, build_mock_system
from tunearena.endpoints.mocks import MockSystem
from tunearena.gate import RuleAnalyzer
from tunearena.gateway import EndpointRegistry, Gateway, GatewayConfig
from tunearena.privacy import SaltConfig
from tunearena.store import BattleStore

from factories import BASE_EPOCH

TEST_SALT = SaltConfig(salt=b"harness-salt-0123456789abcdef", version="v-test")


class OffsetClock:
    """Wall clock shifted to start at a fixed epoch; monotone and continuous."""

    def __init__(self, start: float = BASE_EPOCH):
        self.start = start
        self._t0 = time.monotonic()

    def __call__(self) -> float:
        return self.start + (time.monotonic() - self._t0)


def default_mock_family(clock) -> list[MockSystem]:
    return [
        build_mock_system("tone", "tone", clock=clock, seed=1),
        build_mock_system("noise", "noise", clock=clock, seed=2),
        build_mock_system("slow", "slow", clock=clock, seed=3, latency=0.15),
        build_mock_system("flaky", "flaky", clock=clock, seed=4, failure_rate=1.0),
    ]


@dataclass
class Platform:
    gateway: Gateway
    store: BattleStore
    registry: EndpointRegistry
    clock: OffsetClock
    mocks: list[MockSystem]
    salt: SaltConfig = TEST_SALT
    clients: list[httpx.AsyncClient] = field(default_factory=list)

    async def aclose(self) -> None:
        for client in self.clients:
            await client.aclose()


async def build_platform(
    tmp_path,
    *,
    mocks: list[MockSystem] | None = None,
    config: GatewayConfig | None = None,
    clock: OffsetClock | None = None,
    seed: int = 1234,
) -> Platform:
    clock = clock or OffsetClock()
    mocks = mocks if mocks is not None else default_mock_family(clock)
    registry = EndpointRegistry(cooldown_seconds=30.0, clock=clock)
    clients = []
    for system in mocks:
        app = build_endpoint_app(system)
        client = httpx.AsyncClient(
            transport=httpx.ASGITransport(app=app), base_url="http://endpoint"
        )
        clients.append(client)
        await registry.register(HttpEndpoint("http://endpoint", client=client))
    store = BattleStore(tmp_path / "store", clock=clock, fsync=False)
    gateway = Gateway(
        registry=registry,
        analyzer=RuleAnalyzer(),
        store=store,
        salt=TEST_SALT,
        config=config or GatewayConfig(rate_limit_per_minute=0.0, bootstrap_resamples=100),
        clock=clock,
        rng=random.Random(seed),
    )
    return Platform(
        gateway=gateway, store=store, registry=registry, clock=clock, mocks=mocks,
        clients=clients,
    )


def run(coro):
    return asyncio.run(coro)


async def consent_and_session(gateway: Gateway):
    _, digest = gateway.consent()
    return gateway.create_session(digest, frontend_version="tests/1.0")


def listen_enough(clock, *, seconds: float = 5.0) -> list:
    """A PLAY/PAUSE pair spanning ``seconds`` ending just before now."""
    from tunearena.domain.types import ListenEvent, ListenEventKind

    end = clock()
    return [
        ListenEvent(ListenEventKind.PLAY, end - seconds),
        ListenEvent(ListenEventKind.PAUSE, end),
    ]
