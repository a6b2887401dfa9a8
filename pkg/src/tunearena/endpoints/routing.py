"""Capability matching: which systems can serve a parsed prompt."""

from __future__ import annotations

from collections.abc import Sequence

from tunearena.domain.types import DetailedPrompt
from tunearena.endpoints.descriptor import SystemDescriptor

# A fixed-length system may serve an explicitly requested duration when its
# output length lands within this fraction of the request.
FIXED_LENGTH_TOLERANCE = 0.25


def _duration_compatible(detailed_duration: float, desc: SystemDescriptor) -> bool:
    if desc.supports_duration:
        return desc.min_duration <= detailed_duration <= desc.max_duration
    lo = detailed_duration * (1.0 - FIXED_LENGTH_TOLERANCE)
    hi = detailed_duration * (1.0 + FIXED_LENGTH_TOLERANCE)
    # without duration control the system outputs somewhere in [min, max];
    # compatible only if that window overlaps the tolerance band
    return desc.min_duration <= hi and desc.max_duration >= lo


def compatible_systems(
    detailed: DetailedPrompt, registry: Sequence[SystemDescriptor]
) -> list[SystemDescriptor]:
    """Subset of ``registry`` able to serve the prompt.

    Vocal prompts exclude lyrics-incapable systems; an explicit duration
    excludes systems that cannot produce output near it. Monotone: relaxing
    the prompt never shrinks the result.
    """
    if not registry:
        raise ValueError("registry must be non-empty")
    out = []
    for desc in registry:
        if not detailed.instrumental and not desc.supports_lyrics:
            continue
        if detailed.duration is not None and not _duration_compatible(
            detailed.duration, desc
        ):
            continue
        out.append(desc)
    return out
