"""Capability descriptors and the generate request/response pair."""

from __future__ import annotations

import base64
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from tunearena.domain.serialize import (
    detailed_from_dict,
    detailed_to_dict,
    metadata_from_dict,
    metadata_to_dict,
    system_key_from_dict,
    system_key_to_dict,
)
from tunearena.domain.types import DetailedPrompt, GenerationMetadata, SystemKey


class AccessKind(str, Enum):
    OPEN_WEIGHTS = "OPEN_WEIGHTS"
    API = "API"


@dataclass(frozen=True, slots=True)
class SystemDescriptor:
    """A registered generation system's declared type signature and metadata.

    ``max_concurrency`` is the endpoint's declared in-flight request limit
    (0 = tolerates arbitrary concurrency); the gateway serializes calls to
    endpoints that declare a limit.
    """

    key: SystemKey
    display_name: str
    provider: str
    license: str
    training_data_info: str
    access: AccessKind
    supports_lyrics: bool
    requires_explicit_lyrics: bool
    supports_duration: bool
    min_duration: float
    max_duration: float
    audio_releasable: bool = True
    max_concurrency: int = 0

    def __post_init__(self) -> None:
        if self.min_duration > self.max_duration:
            raise ValueError("min_duration must not exceed max_duration")
        if self.requires_explicit_lyrics and not self.supports_lyrics:
            raise ValueError("requires_explicit_lyrics implies supports_lyrics")
        if self.max_concurrency < 0:
            raise ValueError("max_concurrency must be non-negative")

    def to_dict(self) -> dict:
        return {
            "key": system_key_to_dict(self.key),
            "display_name": self.display_name,
            "provider": self.provider,
            "license": self.license,
            "training_data_info": self.training_data_info,
            "access": self.access.value,
            "supports_lyrics": self.supports_lyrics,
            "requires_explicit_lyrics": self.requires_explicit_lyrics,
            "supports_duration": self.supports_duration,
            "min_duration": self.min_duration,
            "max_duration": self.max_duration,
            "audio_releasable": self.audio_releasable,
            "max_concurrency": self.max_concurrency,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SystemDescriptor":
        return cls(
            key=system_key_from_dict(d["key"], "descriptor.key"),
            display_name=str(d["display_name"]),
            provider=str(d["provider"]),
            license=str(d["license"]),
            training_data_info=str(d["training_data_info"]),
            access=AccessKind(d["access"]),
            supports_lyrics=bool(d["supports_lyrics"]),
            requires_explicit_lyrics=bool(d["requires_explicit_lyrics"]),
            supports_duration=bool(d["supports_duration"]),
            min_duration=float(d["min_duration"]),
            max_duration=float(d["max_duration"]),
            audio_releasable=bool(d["audio_releasable"]),
            # absent on endpoints that tolerate arbitrary concurrency
            max_concurrency=int(d.get("max_concurrency", 0)),
        )


@dataclass(frozen=True, slots=True)
class GenerateRequest:
    detailed: DetailedPrompt
    provisioned_lyrics: Optional[str] = None
    deadline: float = 120.0
    attempt: int = 0

    def to_dict(self) -> dict:
        return {
            "prompt_detailed": detailed_to_dict(self.detailed),
            "provisioned_lyrics": self.provisioned_lyrics,
            "deadline": self.deadline,
            "attempt": self.attempt,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GenerateRequest":
        return cls(
            detailed=detailed_from_dict(d["prompt_detailed"]),
            provisioned_lyrics=d.get("provisioned_lyrics"),
            deadline=float(d.get("deadline", 120.0)),
            attempt=int(d.get("attempt", 0)),
        )


@dataclass(frozen=True, slots=True)
class GenerateResponse:
    """Opaque audio payload plus system-side generation metadata."""

    audio: bytes
    metadata: GenerationMetadata

    def to_dict(self) -> dict:
        return {
            "audio_b64": base64.b64encode(self.audio).decode("ascii"),
            "metadata": metadata_to_dict(self.metadata),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GenerateResponse":
        return cls(
            audio=base64.b64decode(d["audio_b64"]),
            metadata=metadata_from_dict(d["metadata"], "metadata"),
        )


@dataclass(frozen=True, slots=True)
class HealthStatus:
    healthy: bool
    reason: str = ""

    @classmethod
    def ok(cls) -> "HealthStatus":
        return cls(healthy=True)

    @classmethod
    def down(cls, reason: str) -> "HealthStatus":
        return cls(healthy=False, reason=reason)
