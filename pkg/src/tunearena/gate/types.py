from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Protocol, runtime_checkable

from tunearena.domain.types import DetailedPrompt, Prompt


class ModerationCategory(str, Enum):
    COPYRIGHT = "COPYRIGHT"
    CULTURAL = "CULTURAL"
    EXPLICIT = "EXPLICIT"


@dataclass(frozen=True, slots=True)
class ModerationVerdict:
    accepted: bool
    category: Optional[ModerationCategory] = None
    reason: str = ""

    def __post_init__(self) -> None:
        if self.accepted and self.category is not None:
            raise ValueError("accepted verdicts carry no category")
        if not self.accepted and self.category is None:
            raise ValueError("rejections must carry a category")


@dataclass(frozen=True, slots=True)
class GateResult:
    verdict: ModerationVerdict
    detailed: Optional[DetailedPrompt] = None

    def __post_init__(self) -> None:
        if self.verdict.accepted != (self.detailed is not None):
            raise ValueError("detailed prompt present iff the verdict accepts")


@runtime_checkable
class AnalyzerBackend(Protocol):
    """Pluggable prompt analysis: moderation, extraction, lyric writing.

    Implementations must be deterministic for identical configuration and
    inputs; the remote-LLM backend is the documented exception.
    """

    @property
    def config_digest(self) -> str:
        """Digest of the backend's instruction/rule configuration."""
        ...

    async def analyze(self, prompt: Prompt) -> GateResult: ...

    async def write_lyrics(self, prompt: Prompt) -> str: ...
