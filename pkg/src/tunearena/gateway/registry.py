"""Registered endpoints, their descriptors, and health bookkeeping."""

from __future__ import annotations

import asyncio
import contextlib
import time
from dataclasses import dataclass, field
from typing import AsyncContextManager, Callable, Protocol

from tunearena.domain.types import SystemKey
from tunearena.endpoints.descriptor import (
    GenerateRequest,
    GenerateResponse,
    HealthStatus,
    SystemDescriptor,
)


class Endpoint(Protocol):
    """What the gateway needs from a generation endpoint."""

    async def capabilities(self) -> SystemDescriptor: ...

    async def health(self, budget: float) -> HealthStatus: ...

    async def generate(self, req: GenerateRequest) -> GenerateResponse: ...


@dataclass
class _Registered:
    endpoint: Endpoint
    descriptor: SystemDescriptor
    unhealthy_until: float = 0.0
    last_reason: str = ""
    semaphore: asyncio.Semaphore | None = None


@dataclass
class EndpointRegistry:
    """Maps system keys to endpoints; tracks health with a cool-down window.

    An endpoint that fails a probe is excluded from sampling until the
    cool-down elapses, then gets probed again on its next sampling.
    """

    cooldown_seconds: float = 30.0
    clock: Callable[[], float] = time.time
    _entries: dict[SystemKey, _Registered] = field(default_factory=dict)

    def add(self, endpoint: Endpoint, descriptor: SystemDescriptor) -> None:
        if descriptor.key in self._entries:
            raise ValueError(f"duplicate system key {descriptor.key.label()}")
        semaphore = (
            asyncio.Semaphore(descriptor.max_concurrency)
            if descriptor.max_concurrency > 0
            else None
        )
        self._entries[descriptor.key] = _Registered(
            endpoint=endpoint, descriptor=descriptor, semaphore=semaphore
        )

    async def register(self, endpoint: Endpoint) -> SystemDescriptor:
        """Fetch the endpoint's declared capabilities and add it."""
        descriptor = await endpoint.capabilities()
        self.add(endpoint, descriptor)
        return descriptor

    def descriptors(self) -> list[SystemDescriptor]:
        return [entry.descriptor for entry in self._entries.values()]

    def endpoint_for(self, key: SystemKey) -> Endpoint:
        return self._entries[key].endpoint

    def guard(self, key: SystemKey) -> AsyncContextManager:
        """Concurrency guard for one endpoint; a no-op unless it declared a limit."""
        semaphore = self._entries[key].semaphore
        return semaphore if semaphore is not None else contextlib.nullcontext()

    def descriptor_for(self, key: SystemKey) -> SystemDescriptor:
        return self._entries[key].descriptor

    def available(self, candidates: list[SystemDescriptor]) -> list[SystemDescriptor]:
        """Filter out endpoints still inside their unhealthy cool-down."""
        now = self.clock()
        return [
            d for d in candidates if self._entries[d.key].unhealthy_until <= now
        ]

    def mark_unhealthy(self, key: SystemKey, reason: str) -> None:
        entry = self._entries[key]
        entry.unhealthy_until = self.clock() + self.cooldown_seconds
        entry.last_reason = reason

    def mark_healthy(self, key: SystemKey) -> None:
        entry = self._entries[key]
        entry.unhealthy_until = 0.0
        entry.last_reason = ""
