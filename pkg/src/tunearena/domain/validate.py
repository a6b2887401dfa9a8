"""Schema validation for complete battle records.

``validate_battle`` is total: it never raises for bad data, it returns one
violation per failed invariant, each naming the offending field. An empty
list means the record satisfies every invariant of the persisted schema.
"""

from __future__ import annotations

import re
import uuid as uuid_mod
from dataclasses import dataclass

from tunearena.errors import ListenOrderError
from tunearena.domain.listen import effective_listen_seconds
from tunearena.domain.types import (
    DEFAULT_LIMITS,
    BattleRecord,
    DomainLimits,
    GenerationMetadata,
    SessionInfo,
    UserIdentity,
)

_HEX32 = re.compile(r"^[0-9a-f]{32}$")


@dataclass(frozen=True)
class Violation:
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"


def _check_uuid(value: str, field: str, out: list[Violation]) -> None:
    try:
        uuid_mod.UUID(value)
    except (ValueError, AttributeError, TypeError):
        out.append(Violation(field, f"not a valid UUID: {value!r}"))


def _check_identity(u: UserIdentity, field: str, out: list[Violation]) -> None:
    if u.ip is not None:
        out.append(Violation(f"{field}.ip", "raw identifier must be null in persisted records"))
    if u.fingerprint is not None:
        out.append(
            Violation(f"{field}.fingerprint", "raw identifier must be null in persisted records")
        )
    if not _HEX32.match(u.salted_ip or ""):
        out.append(Violation(f"{field}.salted_ip", "must be 32 lowercase hex characters"))
    if u.salted_fingerprint is not None and not _HEX32.match(u.salted_fingerprint):
        out.append(
            Violation(f"{field}.salted_fingerprint", "must be 32 lowercase hex characters or null")
        )


def _check_session(s: SessionInfo, field: str, out: list[Violation]) -> None:
    _check_uuid(s.uuid, f"{field}.uuid", out)
    if not s.ack_tos:
        out.append(Violation(f"{field}.ack_tos", "consent must be acknowledged before battles"))
    elif not _HEX32.match(s.ack_tos):
        out.append(Violation(f"{field}.ack_tos", "must be a 32-char hex digest"))
    times = s.new_battle_times
    if any(b < a for a, b in zip(times, times[1:])):
        out.append(Violation(f"{field}.new_battle_times", "must be non-decreasing"))


def _check_metadata(m: GenerationMetadata, field: str, out: list[Violation]) -> None:
    if not m.system_key.system_tag or not m.system_key.variant_tag:
        out.append(Violation(f"{field}.system_key", "system and variant tags must be non-empty"))
    if not (m.system_time_queued <= m.system_time_started <= m.system_time_completed):
        out.append(
            Violation(
                f"{field}.system_time_queued",
                "system times must satisfy queued <= started <= completed",
            )
        )
    if m.gateway_time_started is None or m.gateway_time_completed is None:
        out.append(Violation(f"{field}.gateway_time_started", "gateway times must be present"))
    elif m.gateway_time_started > m.gateway_time_completed:
        out.append(
            Violation(f"{field}.gateway_time_started", "gateway start must not exceed completion")
        )
    if m.gateway_num_retries < 0:
        out.append(Violation(f"{field}.gateway_num_retries", "must be non-negative"))
    if m.size_bytes < 0:
        out.append(Violation(f"{field}.size_bytes", "must be non-negative"))
    if m.duration <= 0:
        out.append(Violation(f"{field}.duration", "must be positive"))
    if m.sample_rate <= 0:
        out.append(Violation(f"{field}.sample_rate", "must be positive"))
    if m.num_channels <= 0:
        out.append(Violation(f"{field}.num_channels", "must be positive"))
    if not m.checksum:
        out.append(Violation(f"{field}.checksum", "must be present"))


# Fixed lifecycle labels, in required order of occurrence.
_LIFECYCLE_LABELS = (
    "parse",
    "generate",
    "route",
    "sample_pair",
    "generate_parallel_start",
    "generate_parallel_end",
    "create_battle_obj",
    "upload_audio",
    "upload_metadata",
)


def _check_timings(record: BattleRecord, out: list[Violation]) -> None:
    labels = [label for label, _ in record.timings]
    times = [time for _, time in record.timings]
    if any(b < a for a, b in zip(times, times[1:])):
        out.append(Violation("timings", "timestamps must be non-decreasing"))

    positions: dict[str, int] = {}
    for i, label in enumerate(labels):
        if label in positions and label != "vote":
            out.append(Violation("timings", f"duplicate label {label!r}"))
            return
        positions.setdefault(label, i)

    missing = [l for l in _LIFECYCLE_LABELS if l not in positions]
    if missing:
        out.append(Violation("timings", f"missing lifecycle labels {missing}"))
        return
    order = [positions[l] for l in _LIFECYCLE_LABELS]
    if order != sorted(order):
        out.append(Violation("timings", "lifecycle labels out of order"))
        return

    par_start = positions["generate_parallel_start"]
    par_end = positions["generate_parallel_end"]
    for key in (record.a_metadata.system_key, record.b_metadata.system_key):
        tag = key.label()
        side_labels = [
            f"health_check_{tag}_start",
            f"health_check_{tag}_end",
            f"generate_{tag}_start",
            f"generate_{tag}_end",
        ]
        side_missing = [l for l in side_labels if l not in positions]
        if side_missing:
            out.append(Violation("timings", f"missing per-system labels {side_missing}"))
            continue
        side_order = [positions[l] for l in side_labels]
        if side_order != sorted(side_order):
            out.append(Violation("timings", f"per-system labels for {tag} out of order"))
        if side_order[0] <= par_start or side_order[-1] >= par_end:
            out.append(
                Violation("timings", f"per-system labels for {tag} outside the parallel block")
            )

    vote_positions = [i for i, label in enumerate(labels) if label == "vote"]
    expected_votes = 0
    if record.vote is not None:
        expected_votes = 2 if record.vote.feedback_time is not None else 1
    if len(vote_positions) != expected_votes:
        out.append(
            Violation(
                "timings",
                f"expected {expected_votes} vote entries, found {len(vote_positions)}",
            )
        )
    if any(i < positions["upload_metadata"] for i in vote_positions):
        out.append(Violation("timings", "vote entries must follow upload_metadata"))

    known = set(_LIFECYCLE_LABELS) | {"vote"}
    for key in (record.a_metadata.system_key, record.b_metadata.system_key):
        tag = key.label()
        known |= {
            f"health_check_{tag}_start",
            f"health_check_{tag}_end",
            f"generate_{tag}_start",
            f"generate_{tag}_end",
        }
    unknown = [l for l in labels if l not in known]
    if unknown:
        out.append(Violation("timings", f"unknown labels {unknown}"))


def validate_battle(
    record: BattleRecord, limits: DomainLimits = DEFAULT_LIMITS
) -> list[Violation]:
    """Check every schema invariant; returns one violation per failure."""
    out: list[Violation] = []

    _check_uuid(record.uuid, "uuid", out)
    if not record.gateway_git_hash:
        out.append(Violation("gateway_git_hash", "must be present"))

    text = record.prompt.prompt
    if not text.strip():
        out.append(Violation("prompt.prompt", "must be non-empty after trimming"))
    if len(text) > limits.max_prompt_chars:
        out.append(
            Violation("prompt.prompt", f"exceeds maximum length {limits.max_prompt_chars}")
        )

    dp = record.prompt_detailed
    if dp.duration is not None and not (0 < dp.duration <= limits.max_duration_seconds):
        out.append(
            Violation(
                "prompt_detailed.duration",
                f"must be in (0, {limits.max_duration_seconds}]",
            )
        )
    if dp.instrumental and dp.lyrics is not None:
        out.append(Violation("prompt_detailed.lyrics", "instrumental prompts carry no lyrics"))

    _check_identity(record.prompt_user, "prompt_user", out)
    _check_session(record.prompt_session, "prompt_session", out)

    if not record.a_audio_url:
        out.append(Violation("a_audio_url", "must be present"))
    if not record.b_audio_url:
        out.append(Violation("b_audio_url", "must be present"))
    _check_metadata(record.a_metadata, "a_metadata", out)
    _check_metadata(record.b_metadata, "b_metadata", out)
    if record.a_metadata.system_key == record.b_metadata.system_key:
        out.append(
            Violation(
                "a_metadata.system_key",
                f"self-battle forbidden: both sides are {record.a_metadata.system_key.label()}",
            )
        )

    vote = record.vote
    if vote is not None:
        if record.vote_user is None:
            out.append(Violation("vote_user", "must be present when a vote is recorded"))
        else:
            _check_identity(record.vote_user, "vote_user", out)
        if record.vote_session is None:
            out.append(Violation("vote_session", "must be present when a vote is recorded"))
        else:
            _check_session(record.vote_session, "vote_session", out)
        for side, events in (("a", vote.a_listen_data), ("b", vote.b_listen_data)):
            try:
                listened = effective_listen_seconds(events, now=vote.preference_time)
            except ListenOrderError:
                out.append(
                    Violation(f"vote.{side}_listen_data", "events must be sorted by time")
                )
                continue
            if listened < limits.listen_gate_seconds:
                out.append(
                    Violation(
                        f"vote.{side}_listen_data",
                        f"listened {listened:.3f}s at vote time, below the "
                        f"{limits.listen_gate_seconds}s gate",
                    )
                )
        if vote.feedback_time is not None and vote.feedback_time < vote.preference_time:
            out.append(Violation("vote.feedback_time", "must not precede the vote"))

    _check_timings(record, out)
    return out
