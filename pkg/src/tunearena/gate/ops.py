from __future__ import annotations

from tunearena.domain.types import DetailedPrompt, Prompt
from tunearena.errors import GateUnavailableError, InvalidPromptError
from tunearena.gate.types import AnalyzerBackend, GateResult


async def gate(prompt: Prompt, backend: AnalyzerBackend) -> GateResult:
    """Moderate and parse a prompt; never silently accepts on backend failure."""
    if not prompt.prompt.strip():
        raise InvalidPromptError("prompt must be non-empty")
    try:
        result = await backend.analyze(prompt)
    except GateUnavailableError:
        raise
    except Exception as exc:  # any backend defect fails closed
        raise GateUnavailableError(f"analysis backend failed: {exc}") from exc
    return result


async def provision_lyrics(
    prompt: Prompt, detailed: DetailedPrompt, backend: AnalyzerBackend
) -> str:
    """Produce the lyric text handed to every lyric-requiring system in a battle.

    User-supplied verbatim lyrics win; otherwise the backend writes them once
    per battle so paired systems receive identical conditioning.
    """
    if detailed.instrumental:
        raise ValueError("lyrics are not provisioned for instrumental prompts")
    if detailed.lyrics:
        return detailed.lyrics
    try:
        lyrics = await backend.write_lyrics(prompt)
    except GateUnavailableError:
        raise
    except Exception as exc:
        raise GateUnavailableError(f"lyrics backend failed: {exc}") from exc
    if not lyrics.strip():
        raise GateUnavailableError("lyrics backend returned empty text")
    return lyrics
