"""HTTP wire protocol for generation endpoints.

Every endpoint, mock or real, exposes the same three routes:
``GET /capabilities``, ``GET /health``, and ``POST /generate``. This is the
documented extension point for contributing new systems: wrap the system in
anything that serves this protocol and register its URL with the gateway.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from tunearena.endpoints.descriptor import GenerateRequest
from tunearena.endpoints.errors import CapabilityMismatchError, EndpointError
from tunearena.endpoints.mocks import MockSystem


def build_endpoint_app(system: MockSystem) -> FastAPI:
    app = FastAPI(title=f"endpoint:{system.key.label()}", docs_url=None)

    @app.get("/capabilities")
    async def capabilities():
        return system.descriptor.to_dict()

    @app.get("/health")
    async def health():
        status = await system.health()
        if not status.healthy:
            return JSONResponse(
                status_code=503, content={"healthy": False, "reason": status.reason}
            )
        return {"healthy": True}

    @app.post("/generate")
    async def generate(request: Request):
        body = await request.json()
        req = GenerateRequest.from_dict(body)
        try:
            response = await system.generate(req)
        except CapabilityMismatchError as exc:
            return JSONResponse(
                status_code=422, content={"code": "capability_mismatch", "message": str(exc)}
            )
        except EndpointError as exc:
            return JSONResponse(
                status_code=503, content={"code": "generation_failed", "message": str(exc)}
            )
        return response.to_dict()

    return app
