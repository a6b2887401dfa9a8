"""Remote LLM analyzer client.

Speaks a small JSON protocol to an analysis service that fronts an actual
LLM: ``POST /analyze`` and ``POST /lyrics``, each carrying the versioned
instruction template plus the user prompt. Explicitly nondeterministic.
Failures are fail-closed: the caller receives a retryable gate-unavailable
error, never an unmoderated pass-through.
"""

from __future__ import annotations

from typing import Optional

import httpx

from tunearena.domain.types import DetailedPrompt, Prompt
from tunearena.errors import GateUnavailableError
from tunearena.gate.types import GateResult, ModerationCategory, ModerationVerdict
from tunearena.hashing import digest128_hex

DEFAULT_TIMEOUT_SECONDS = 15.0
DEFAULT_RETRIES = 1

DEFAULT_ANALYZE_INSTRUCTIONS = """\
You are the moderation and routing gate for a blind music-generation arena.
Reject the prompt if it references copyrighted musical material or named
artists (category COPYRIGHT), culturally insensitive themes (CULTURAL), or
explicit themes including profanity atypical for the requested musical style
(EXPLICIT; profanity acceptable for styles where it is idiomatic, such as
heavy metal, is not a reason to reject). For accepted prompts, extract:
instrumental (false when vocals or lyrics are implied), lyrics (only verbatim
user-supplied lyrics, else null), and duration in seconds (only when
explicitly stated, else null). Respond with JSON:
{"accepted": bool, "category": str|null, "reason": str,
 "instrumental": bool, "lyrics": str|null, "duration": number|null}
"""

DEFAULT_LYRICS_INSTRUCTIONS = """\
Write original song lyrics matching the user's prompt. Use verse/chorus
structure markers in square brackets. Never quote existing songs. Respond
with JSON: {"lyrics": str}
"""


class RemoteAnalyzer:
    """AnalyzerBackend backed by a remote LLM analysis service."""

    def __init__(
        self,
        base_url: str,
        *,
        analyze_instructions: str = DEFAULT_ANALYZE_INSTRUCTIONS,
        lyrics_instructions: str = DEFAULT_LYRICS_INSTRUCTIONS,
        timeout: float = DEFAULT_TIMEOUT_SECONDS,
        retries: int = DEFAULT_RETRIES,
        client: Optional[httpx.AsyncClient] = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.analyze_instructions = analyze_instructions
        self.lyrics_instructions = lyrics_instructions
        self.timeout = timeout
        self.retries = retries
        self._client = client or httpx.AsyncClient()

    @property
    def config_digest(self) -> str:
        return digest128_hex(self.analyze_instructions + "\n---\n" + self.lyrics_instructions)

    async def aclose(self) -> None:
        await self._client.aclose()

    async def _post(self, path: str, payload: dict) -> dict:
        last_error: Exception | None = None
        for _ in range(1 + self.retries):
            try:
                response = await self._client.post(
                    f"{self.base_url}{path}", json=payload, timeout=self.timeout
                )
                if response.status_code >= 500:
                    last_error = GateUnavailableError(
                        f"analysis backend returned {response.status_code}"
                    )
                    continue
                response.raise_for_status()
                return response.json()
            except (httpx.TimeoutException, httpx.TransportError) as exc:
                last_error = exc
        raise GateUnavailableError(f"analysis backend unreachable: {last_error}")

    async def analyze(self, prompt: Prompt) -> GateResult:
        body = await self._post(
            "/analyze",
            {"instructions": self.analyze_instructions, "prompt": prompt.prompt},
        )
        try:
            accepted = bool(body["accepted"])
            if not accepted:
                return GateResult(
                    verdict=ModerationVerdict(
                        accepted=False,
                        category=ModerationCategory(body["category"]),
                        reason=str(body.get("reason", "")),
                    )
                )
            duration = body.get("duration")
            lyrics = body.get("lyrics")
            return GateResult(
                verdict=ModerationVerdict(accepted=True),
                detailed=DetailedPrompt(
                    overall_prompt=prompt.prompt,
                    instrumental=bool(body["instrumental"]),
                    lyrics=None if lyrics is None else str(lyrics),
                    duration=None if duration is None else float(duration),
                ),
            )
        except (KeyError, ValueError, TypeError) as exc:
            # malformed verdicts are treated as backend failure: fail closed
            raise GateUnavailableError(f"analysis backend returned malformed verdict: {exc}")

    async def write_lyrics(self, prompt: Prompt) -> str:
        body = await self._post(
            "/lyrics",
            {"instructions": self.lyrics_instructions, "prompt": prompt.prompt},
        )
        lyrics = body.get("lyrics")
        if not lyrics or not isinstance(lyrics, str):
            raise GateUnavailableError("analysis backend returned no lyrics")
        return lyrics
