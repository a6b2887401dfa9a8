"""Canonical data model for prompts, sessions, telemetry, votes, and battles."""

from tunearena.domain.listen import effective_listen_seconds
from tunearena.domain.serialize import (
    battle_from_dict,
    battle_to_dict,
    canonical_dumps,
    failed_battle_from_dict,
    failed_battle_to_dict,
    record_from_dict,
    record_to_dict,
)
from tunearena.domain.types import (
    BattlePhase,
    BattleRecord,
    DetailedPrompt,
    DomainLimits,
    FailedBattle,
    FailureInfo,
    GenerationMetadata,
    ListenEvent,
    ListenEventKind,
    Preference,
    Prompt,
    SessionInfo,
    SystemKey,
    TimingEntry,
    UserIdentity,
    Vote,
)
from tunearena.domain.validate import Violation, validate_battle

__all__ = [
    "BattlePhase",
    "BattleRecord",
    "DetailedPrompt",
    "DomainLimits",
    "FailedBattle",
    "FailureInfo",
    "GenerationMetadata",
    "ListenEvent",
    "ListenEventKind",
    "Preference",
    "Prompt",
    "SessionInfo",
    "SystemKey",
    "TimingEntry",
    "UserIdentity",
    "Violation",
    "Vote",
    "battle_from_dict",
    "battle_to_dict",
    "canonical_dumps",
    "effective_listen_seconds",
    "failed_battle_from_dict",
    "failed_battle_to_dict",
    "record_from_dict",
    "record_to_dict",
    "validate_battle",
]
