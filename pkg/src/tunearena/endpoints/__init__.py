"""Uniform generation-endpoint protocol: descriptors, mocks, wire client."""

from tunearena.endpoints.descriptor import (
    AccessKind,
    GenerateRequest,
    GenerateResponse,
    HealthStatus,
    SystemDescriptor,
)
from tunearena.endpoints.client import HttpEndpoint
from tunearena.endpoints.errors import (
    CapabilityMismatchError,
    EndpointError,
    EndpointUnavailableError,
    GenerationTimeoutError,
)
from tunearena.endpoints.mocks import MockSystem, build_mock_system
from tunearena.endpoints.routing import compatible_systems
from tunearena.endpoints.service import build_endpoint_app

__all__ = [
    "AccessKind",
    "CapabilityMismatchError",
    "EndpointError",
    "EndpointUnavailableError",
    "GenerateRequest",
    "GenerateResponse",
    "GenerationTimeoutError",
    "HealthStatus",
    "HttpEndpoint",
    "MockSystem",
    "SystemDescriptor",
    "build_endpoint_app",
    "build_mock_system",
    "compatible_systems",
]
