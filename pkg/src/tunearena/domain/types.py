"""Domain types for one blind pairwise comparison ("battle").

All types are immutable values: safe to share across tasks, updated only by
constructing modified copies. Field names deliberately match the canonical
JSON serialization (see :mod:`tunearena.domain.serialize`) so records read
the same in code, on the wire, and in data releases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class ListenEventKind(str, Enum):
    PLAY = "PLAY"
    PAUSE = "PAUSE"
    TICK = "TICK"


class Preference(str, Enum):
    A = "A"
    B = "B"
    TIE = "TIE"
    BOTH_BAD = "BOTH_BAD"

    @property
    def decisive(self) -> bool:
        return self in (Preference.A, Preference.B)


class BattlePhase(str, Enum):
    CREATED = "CREATED"
    GENERATING = "GENERATING"
    DELIVERED = "DELIVERED"
    VOTED = "VOTED"
    FAILED = "FAILED"


# Legal phase transitions; FAILED is reachable only while work is in flight.
PHASE_TRANSITIONS: dict[BattlePhase, frozenset[BattlePhase]] = {
    BattlePhase.CREATED: frozenset({BattlePhase.GENERATING, BattlePhase.FAILED}),
    BattlePhase.GENERATING: frozenset({BattlePhase.DELIVERED, BattlePhase.FAILED}),
    BattlePhase.DELIVERED: frozenset({BattlePhase.VOTED}),
    BattlePhase.VOTED: frozenset(),
    BattlePhase.FAILED: frozenset(),
}


@dataclass(frozen=True, slots=True)
class DomainLimits:
    """Platform-wide bounds enforced by validation.

    The prompt cap bounds moderation cost and abuse surface; the duration cap
    bounds generation cost for systems that honor requested durations.
    """

    max_prompt_chars: int = 2000
    max_duration_seconds: float = 300.0
    listen_gate_seconds: float = 4.0


DEFAULT_LIMITS = DomainLimits()


@dataclass(frozen=True, slots=True)
class Prompt:
    prompt: str


@dataclass(frozen=True, slots=True)
class DetailedPrompt:
    """Structured extraction of a free-text prompt.

    ``lyrics`` is only set when the user supplied verbatim lyrics; provisioned
    lyrics live in per-system generation metadata instead. ``duration`` is only
    set when the prompt explicitly stated one.
    """

    overall_prompt: str
    instrumental: bool
    lyrics: Optional[str] = None
    duration: Optional[float] = None


@dataclass(frozen=True, slots=True)
class UserIdentity:
    """Linkable identifiers; raw fields are transient and never persisted."""

    ip: Optional[str] = None
    salted_ip: str = ""
    fingerprint: Optional[str] = None
    salted_fingerprint: Optional[str] = None


@dataclass(frozen=True, slots=True)
class SessionInfo:
    uuid: str
    create_time: float
    frontend_git_hash: str
    ack_tos: str
    new_battle_times: tuple[float, ...] = ()


@dataclass(frozen=True, slots=True)
class SystemKey:
    system_tag: str
    variant_tag: str

    def label(self) -> str:
        """The ``tag:variant`` form used in timing labels and reports."""
        return f"{self.system_tag}:{self.variant_tag}"


@dataclass(frozen=True, slots=True)
class GenerationMetadata:
    """Per-system record of one generation.

    System-side fields are stamped by the endpoint; gateway-side fields are
    stamped by the orchestrator and remain ``None`` until it does.
    """

    system_key: SystemKey
    system_git_hash: str
    system_time_queued: float
    system_time_started: float
    system_time_completed: float
    size_bytes: int
    lyrics: Optional[str]
    sample_rate: int
    num_channels: int
    duration: float
    checksum: str
    gateway_time_started: Optional[float] = None
    gateway_time_completed: Optional[float] = None
    gateway_num_retries: int = 0

    @property
    def system_span(self) -> float:
        return self.system_time_completed - self.system_time_started

    @property
    def gateway_span(self) -> Optional[float]:
        if self.gateway_time_started is None or self.gateway_time_completed is None:
            return None
        return self.gateway_time_completed - self.gateway_time_started


@dataclass(frozen=True, slots=True)
class ListenEvent:
    kind: ListenEventKind
    time: float


@dataclass(frozen=True, slots=True)
class Vote:
    """The detailed preference: telemetry, four-way choice, optional feedback.

    ``*_listen_receipt_times`` are a platform extension: server receipt epochs,
    one per accepted telemetry batch, kept because client-reported event times
    are untrusted. They serialize only when present.
    """

    a_listen_data: tuple[ListenEvent, ...]
    b_listen_data: tuple[ListenEvent, ...]
    preference: Preference
    preference_time: float
    feedback: Optional[str] = None
    a_feedback: Optional[str] = None
    b_feedback: Optional[str] = None
    feedback_time: Optional[float] = None
    a_listen_receipt_times: Optional[tuple[float, ...]] = None
    b_listen_receipt_times: Optional[tuple[float, ...]] = None


TimingEntry = tuple[str, float]


@dataclass(frozen=True, slots=True)
class BattleRecord:
    """The complete persisted unit of one comparison."""

    uuid: str
    gateway_git_hash: str
    prompt: Prompt
    prompt_detailed: DetailedPrompt
    prompt_user: UserIdentity
    prompt_session: SessionInfo
    prompt_prebaked: bool
    prompt_routed: bool
    a_audio_url: str
    a_metadata: GenerationMetadata
    b_audio_url: str
    b_metadata: GenerationMetadata
    vote: Optional[Vote] = None
    vote_user: Optional[UserIdentity] = None
    vote_session: Optional[SessionInfo] = None
    timings: tuple[TimingEntry, ...] = ()

    def metadata_for(self, side: str) -> GenerationMetadata:
        if side == "A":
            return self.a_metadata
        if side == "B":
            return self.b_metadata
        raise ValueError(f"unknown side {side!r}")


@dataclass(frozen=True, slots=True)
class FailureInfo:
    phase: str
    reason: str
    sides: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class FailedBattle:
    """Partial record persisted when a battle aborts before delivery."""

    uuid: str
    gateway_git_hash: str
    prompt: Prompt
    prompt_user: UserIdentity
    prompt_session: SessionInfo
    failure: FailureInfo
    prompt_detailed: Optional[DetailedPrompt] = None
    prompt_prebaked: bool = False
    prompt_routed: bool = False
    timings: tuple[TimingEntry, ...] = field(default_factory=tuple)
