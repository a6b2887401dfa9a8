"""Effective listening time from PLAY/PAUSE/TICK telemetry.

Durations derive from PLAY->PAUSE intervals only. TICK events are a liveness
heartbeat the client emits roughly once per second while playing; they carry
no duration information and are ignored here.
"""

from __future__ import annotations

from collections.abc import Sequence

from tunearena.errors import ListenOrderError
from tunearena.domain.types import ListenEvent, ListenEventKind


def effective_listen_seconds(events: Sequence[ListenEvent], now: float) -> float:
    """Sum the maximal PLAY->PAUSE intervals in ``events``.

    An unmatched trailing PLAY is closed at ``now``. A PLAY while an interval
    is already open moves the open anchor forward (conservative: listening is
    never double counted). Events must be sorted by time.
    """
    prev = None
    for ev in events:
        if prev is not None and ev.time < prev:
            raise ListenOrderError(
                f"listen events out of order: {ev.time} after {prev}"
            )
        prev = ev.time

    total = 0.0
    anchor: float | None = None
    for ev in events:
        if ev.kind is ListenEventKind.TICK:
            continue
        if ev.kind is ListenEventKind.PLAY:
            anchor = ev.time
        elif ev.kind is ListenEventKind.PAUSE:
            if anchor is not None:
                total += max(0.0, ev.time - anchor)
                anchor = None
    if anchor is not None:
        total += max(0.0, now - anchor)
    return total


def is_playing(events: Sequence[ListenEvent]) -> bool:
    """True if the last non-TICK event leaves an interval open."""
    for ev in reversed(events):
        if ev.kind is ListenEventKind.PLAY:
            return True
        if ev.kind is ListenEventKind.PAUSE:
            return False
    return False
