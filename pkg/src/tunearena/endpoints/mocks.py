"""Mock generation systems for tests and desk-scale deployment.

Four flavors exercise the gateway's failure surface: ``tone`` (deterministic
sinusoid, fixed length), ``noise`` (seeded noise, honors requested duration),
``slow`` (configurable artificial latency), and ``flaky`` (configurable
first-attempt failure rate, exercising retry accounting). Payloads are 16-bit
PCM WAV; a mock's output is a pure function of (system_tag, request, seed).
"""

from __future__ import annotations

import asyncio
import hashlib
import io
import time
import wave
from typing import Callable, Optional

import numpy as np

from tunearena.domain.types import GenerationMetadata, SystemKey
from tunearena.endpoints.descriptor import (
    AccessKind,
    GenerateRequest,
    GenerateResponse,
    HealthStatus,
    SystemDescriptor,
)
from tunearena.endpoints.errors import CapabilityMismatchError, EndpointUnavailableError
from tunearena.hashing import digest128_hex

MOCK_SAMPLE_RATE = 8000


def _derive_uint32(*parts: str | int) -> int:
    h = hashlib.sha256("|".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(h[:4], "big")


def pcm16_wav(samples: np.ndarray, sample_rate: int) -> bytes:
    """Encode a float array in [-1, 1] as a mono 16-bit PCM WAV payload."""
    clipped = np.clip(samples, -1.0, 1.0)
    frames = (clipped * 32767.0).astype("<i2")
    buf = io.BytesIO()
    with wave.open(buf, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(sample_rate)
        w.writeframes(frames.tobytes())
    return buf.getvalue()


def wav_duration_seconds(payload: bytes) -> float:
    with wave.open(io.BytesIO(payload), "rb") as w:
        return w.getnframes() / w.getframerate()


class MockSystem:
    """One in-process mock endpoint implementation."""

    def __init__(
        self,
        kind: str,
        descriptor: SystemDescriptor,
        *,
        seed: int = 0,
        default_duration: float = 8.0,
        sample_rate: int = MOCK_SAMPLE_RATE,
        latency: float = 0.0,
        failure_rate: float = 0.0,
        health_delay: float = 0.0,
        fail_health: bool = False,
        clock: Callable[[], float] = time.time,
    ):
        self.kind = kind
        self.descriptor = descriptor
        self.seed = seed
        self.default_duration = default_duration
        self.sample_rate = sample_rate
        self.latency = latency
        self.failure_rate = failure_rate
        self.health_delay = health_delay
        self.fail_health = fail_health
        self.clock = clock
        self.system_git_hash = f"mock-{kind}/0.1.0"

    @property
    def key(self) -> SystemKey:
        return self.descriptor.key

    async def health(self) -> HealthStatus:
        if self.health_delay:
            await asyncio.sleep(self.health_delay)
        if self.fail_health:
            return HealthStatus.down("configured to refuse")
        return HealthStatus.ok()

    def _pick_duration(self, req: GenerateRequest) -> float:
        if self.descriptor.supports_duration and req.detailed.duration is not None:
            return min(
                max(req.detailed.duration, self.descriptor.min_duration),
                self.descriptor.max_duration,
            )
        return self.default_duration

    def _check_capabilities(self, req: GenerateRequest) -> None:
        vocal = not req.detailed.instrumental
        if vocal and not self.descriptor.supports_lyrics:
            raise CapabilityMismatchError(
                f"{self.key.label()} is instrumental-only but received a vocal request"
            )
        needs_lyrics = vocal and self.descriptor.requires_explicit_lyrics
        if needs_lyrics and not req.provisioned_lyrics:
            raise CapabilityMismatchError(
                f"{self.key.label()} requires explicit lyrics conditioning"
            )
        if req.provisioned_lyrics and not needs_lyrics:
            raise CapabilityMismatchError(
                f"{self.key.label()} does not take provisioned lyrics"
            )

    def _synthesize(self, req: GenerateRequest, duration: float) -> np.ndarray:
        n = round(duration * self.sample_rate)
        t = np.arange(n, dtype=np.float64) / self.sample_rate
        word = _derive_uint32(self.seed, self.key.label(), req.detailed.overall_prompt)
        if self.kind == "noise":
            rng = np.random.default_rng(word)
            return rng.uniform(-0.5, 0.5, size=n)
        freq = 220.0 + (word % 440)
        return 0.4 * np.sin(2.0 * np.pi * freq * t) + 0.1 * np.sin(4.0 * np.pi * freq * t)

    def _lyrics_for(self, req: GenerateRequest) -> Optional[str]:
        if req.detailed.instrumental:
            return None
        if self.descriptor.requires_explicit_lyrics:
            return req.provisioned_lyrics
        if self.descriptor.supports_lyrics:
            # joint generation: the system writes its own words
            word = _derive_uint32(self.seed, self.key.label(), req.detailed.overall_prompt)
            return (
                f"[Verse]\n{self.descriptor.display_name} hums a tale "
                f"of {req.detailed.overall_prompt.strip()[:60]}\n"
                f"[Chorus]\nPattern {word % 9973} rings on and on"
            )
        return None

    async def generate(self, req: GenerateRequest) -> GenerateResponse:
        self._check_capabilities(req)
        queued = self.clock()
        if self.kind == "flaky" and req.attempt == 0:
            coin = _derive_uint32(self.seed, "flake", req.detailed.overall_prompt)
            if coin / 2**32 < self.failure_rate:
                raise EndpointUnavailableError(
                    f"{self.key.label()} dropped first attempt (simulated)"
                )
        started = self.clock()
        if self.latency:
            await asyncio.sleep(self.latency)
        duration = self._pick_duration(req)
        audio = pcm16_wav(self._synthesize(req, duration), self.sample_rate)
        completed = self.clock()
        metadata = GenerationMetadata(
            system_key=self.key,
            system_git_hash=self.system_git_hash,
            system_time_queued=queued,
            system_time_started=started,
            system_time_completed=completed,
            size_bytes=len(audio),
            lyrics=self._lyrics_for(req),
            sample_rate=self.sample_rate,
            num_channels=1,
            duration=round(len(audio[44:]) / 2 / self.sample_rate, 6),
            checksum=digest128_hex(audio),
        )
        return GenerateResponse(audio=audio, metadata=metadata)


_KIND_DEFAULTS = {
    "tone": dict(
        supports_lyrics=True,
        requires_explicit_lyrics=True,
        supports_duration=False,
        default_duration=8.0,
    ),
    "noise": dict(
        supports_lyrics=True,
        requires_explicit_lyrics=False,
        supports_duration=True,
        duration_range=(2.0, 60.0),
        default_duration=10.0,
    ),
    "slow": dict(
        supports_lyrics=False,
        requires_explicit_lyrics=False,
        supports_duration=True,
        duration_range=(2.0, 60.0),
        default_duration=6.0,
        latency=0.25,
    ),
    "flaky": dict(
        supports_lyrics=True,
        requires_explicit_lyrics=False,
        supports_duration=False,
        default_duration=7.0,
        failure_rate=0.5,
    ),
}


def build_mock_system(
    kind: str,
    system_tag: str,
    variant_tag: str = "default",
    *,
    provider: str = "tunearena mocks",
    license: str = "CC0-1.0",
    training_data_info: str = "synthetic; none",
    access: AccessKind = AccessKind.OPEN_WEIGHTS,
    audio_releasable: bool = True,
    max_concurrency: int = 0,
    seed: int = 0,
    clock: Callable[[], float] = time.time,
    **overrides,
) -> MockSystem:
    """Build one of the mock family; ``overrides`` tune per-kind parameters."""
    if kind not in _KIND_DEFAULTS:
        raise ValueError(f"unknown mock kind {kind!r}; expected one of {sorted(_KIND_DEFAULTS)}")
    params = dict(_KIND_DEFAULTS[kind])
    params.update(overrides)
    default_duration = float(params.pop("default_duration"))
    duration_range = params.pop("duration_range", (default_duration, default_duration))
    supports_duration = bool(params.pop("supports_duration"))
    if not supports_duration:
        duration_range = (default_duration, default_duration)
    descriptor = SystemDescriptor(
        key=SystemKey(system_tag=system_tag, variant_tag=variant_tag),
        display_name=system_tag.replace("-", " ").title(),
        provider=provider,
        license=license,
        training_data_info=training_data_info,
        access=access,
        supports_lyrics=bool(params.pop("supports_lyrics")),
        requires_explicit_lyrics=bool(params.pop("requires_explicit_lyrics")),
        supports_duration=supports_duration,
        min_duration=float(duration_range[0]),
        max_duration=float(duration_range[1]),
        audio_releasable=audio_releasable,
        max_concurrency=max_concurrency,
    )
    return MockSystem(
        kind,
        descriptor,
        seed=seed,
        default_duration=default_duration,
        clock=clock,
        **params,
    )
