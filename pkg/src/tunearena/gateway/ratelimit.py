from __future__ import annotations

import time
from typing import Callable

from tunearena.errors import RateLimitedError


class TokenBucketLimiter:
    """Per-identifier token bucket; refills continuously."""

    def __init__(
        self,
        rate_per_minute: float,
        burst: int,
        clock: Callable[[], float] = time.time,
    ):
        self.rate_per_second = rate_per_minute / 60.0
        self.burst = float(burst)
        self.clock = clock
        self._state: dict[str, tuple[float, float]] = {}  # id -> (tokens, stamp)

    @property
    def enabled(self) -> bool:
        return self.rate_per_second > 0

    def check(self, identifier: str) -> None:
        if not self.enabled:
            return
        now = self.clock()
        tokens, stamp = self._state.get(identifier, (self.burst, now))
        tokens = min(self.burst, tokens + (now - stamp) * self.rate_per_second)
        if tokens < 1.0:
            raise RateLimitedError("too many battles; slow down and retry shortly")
        self._state[identifier] = (tokens - 1.0, now)
