"""Durable append-only persistence and rolling data releases."""

from tunearena.store.battles import BattleStore, StoredPosition
from tunearena.store.export import (
    AudioExclusion,
    ReleaseManifest,
    VerifyReport,
    export_release,
    verify_release,
)

__all__ = [
    "AudioExclusion",
    "BattleStore",
    "ReleaseManifest",
    "StoredPosition",
    "VerifyReport",
    "export_release",
    "verify_release",
]
