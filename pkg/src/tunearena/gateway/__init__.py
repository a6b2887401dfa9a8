"""The gateway: session handling, battle lifecycle, public service API."""

from tunearena.gateway.config import GatewayConfig
from tunearena.gateway.core import BlindBattle, Gateway, GateStatus, Reveal
from tunearena.gateway.registry import EndpointRegistry
from tunearena.gateway.sampler import UniformPairSampler, sample_pair
from tunearena.gateway.service import build_service_app

__all__ = [
    "BlindBattle",
    "EndpointRegistry",
    "GateStatus",
    "Gateway",
    "GatewayConfig",
    "Reveal",
    "UniformPairSampler",
    "build_service_app",
    "sample_pair",
]
