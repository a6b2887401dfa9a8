"""Gateway-side client for the endpoint wire protocol."""

from __future__ import annotations

from typing import Optional

import httpx

from tunearena.endpoints.descriptor import (
    GenerateRequest,
    GenerateResponse,
    HealthStatus,
    SystemDescriptor,
)
from tunearena.endpoints.errors import (
    CapabilityMismatchError,
    EndpointUnavailableError,
    GenerationTimeoutError,
)

# The per-probe budget must exceed the slowest observed healthy probe
# (a cold commercial endpoint has been seen taking ~6.6s).
DEFAULT_HEALTH_BUDGET_SECONDS = 10.0


class HttpEndpoint:
    """One registered generation endpoint reachable over HTTP."""

    def __init__(
        self,
        base_url: str,
        *,
        client: Optional[httpx.AsyncClient] = None,
    ):
        self.base_url = base_url.rstrip("/")
        self._client = client or httpx.AsyncClient()

    async def aclose(self) -> None:
        await self._client.aclose()

    async def capabilities(self) -> SystemDescriptor:
        try:
            response = await self._client.get(f"{self.base_url}/capabilities", timeout=10.0)
            response.raise_for_status()
        except httpx.HTTPError as exc:
            raise EndpointUnavailableError(f"capabilities fetch failed: {exc}") from exc
        return SystemDescriptor.from_dict(response.json())

    async def health(self, budget: float = DEFAULT_HEALTH_BUDGET_SECONDS) -> HealthStatus:
        """Bounded-time probe; any failure mode reads as unhealthy."""
        try:
            response = await self._client.get(f"{self.base_url}/health", timeout=budget)
        except httpx.TimeoutException:
            return HealthStatus.down(f"timeout after {budget}s")
        except httpx.TransportError as exc:
            return HealthStatus.down(f"unreachable: {exc}")
        if response.status_code != 200:
            reason = ""
            try:
                reason = response.json().get("reason", "")
            except ValueError:
                pass
            return HealthStatus.down(reason or f"status {response.status_code}")
        return HealthStatus.ok()

    async def generate(self, req: GenerateRequest) -> GenerateResponse:
        try:
            response = await self._client.post(
                f"{self.base_url}/generate", json=req.to_dict(), timeout=req.deadline
            )
        except httpx.TimeoutException as exc:
            raise GenerationTimeoutError(
                f"generation exceeded {req.deadline}s deadline"
            ) from exc
        except httpx.TransportError as exc:
            raise EndpointUnavailableError(f"endpoint unreachable: {exc}") from exc
        if response.status_code == 422:
            raise CapabilityMismatchError(response.json().get("message", "capability mismatch"))
        if response.status_code != 200:
            raise EndpointUnavailableError(
                f"endpoint returned status {response.status_code}"
            )
        return GenerateResponse.from_dict(response.json())
