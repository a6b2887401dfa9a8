"""Canonical JSON serialization of battle records.

The wire and release format is UTF-8 JSON with fixed field names; times are
fractional epoch seconds as numbers, enumerations are uppercase strings, and
listen events and timings are two-element ``[label, time]`` arrays. Parsing is
strict: unknown or missing keys are errors so that round-trips are honest.

``record_to_dict``/``record_from_dict`` compose so that
``record_from_dict(record_to_dict(r)) == r`` for every valid record, and the
JSON tree of a parsed-then-reserialized document equals the original modulo
key order.
"""

from __future__ import annotations

import json
from typing import Any, Optional

from tunearena.domain.types import (
    BattleRecord,
    DetailedPrompt,
    FailedBattle,
    FailureInfo,
    GenerationMetadata,
    ListenEvent,
    ListenEventKind,
    Preference,
    Prompt,
    SessionInfo,
    SystemKey,
    UserIdentity,
    Vote,
)


class RecordParseError(ValueError):
    """Raised when a document does not match the canonical record schema."""


def canonical_dumps(obj: Any, *, sort_keys: bool = False, indent: int | None = None) -> str:
    """Dump a JSON tree the way the platform always does (ASCII, stable)."""
    if indent is None:
        return json.dumps(obj, ensure_ascii=True, sort_keys=sort_keys, separators=(",", ":"))
    return json.dumps(obj, ensure_ascii=True, sort_keys=sort_keys, indent=indent)


def _require(d: dict, keys: set[str], where: str) -> None:
    missing = keys - d.keys()
    extra = d.keys() - keys
    if missing:
        raise RecordParseError(f"{where}: missing keys {sorted(missing)}")
    if extra:
        raise RecordParseError(f"{where}: unknown keys {sorted(extra)}")


def _opt_float(value: Any) -> Optional[float]:
    return None if value is None else float(value)


def _opt_str(value: Any, where: str) -> Optional[str]:
    if value is None:
        return None
    if not isinstance(value, str):
        raise RecordParseError(f"{where}: expected string or null")
    return value


# -- leaf converters ---------------------------------------------------------


def prompt_to_dict(p: Prompt) -> dict:
    return {"prompt": p.prompt}


def prompt_from_dict(d: dict) -> Prompt:
    _require(d, {"prompt"}, "prompt")
    return Prompt(prompt=str(d["prompt"]))


def detailed_to_dict(dp: DetailedPrompt) -> dict:
    return {
        "overall_prompt": dp.overall_prompt,
        "instrumental": dp.instrumental,
        "lyrics": dp.lyrics,
        "duration": dp.duration,
    }


def detailed_from_dict(d: dict) -> DetailedPrompt:
    _require(d, {"overall_prompt", "instrumental", "lyrics", "duration"}, "prompt_detailed")
    return DetailedPrompt(
        overall_prompt=str(d["overall_prompt"]),
        instrumental=bool(d["instrumental"]),
        lyrics=_opt_str(d["lyrics"], "prompt_detailed.lyrics"),
        duration=_opt_float(d["duration"]),
    )


def identity_to_dict(u: UserIdentity) -> dict:
    return {
        "ip": u.ip,
        "salted_ip": u.salted_ip,
        "fingerprint": u.fingerprint,
        "salted_fingerprint": u.salted_fingerprint,
    }


def identity_from_dict(d: dict, where: str) -> UserIdentity:
    _require(d, {"ip", "salted_ip", "fingerprint", "salted_fingerprint"}, where)
    return UserIdentity(
        ip=_opt_str(d["ip"], f"{where}.ip"),
        salted_ip=str(d["salted_ip"]),
        fingerprint=_opt_str(d["fingerprint"], f"{where}.fingerprint"),
        salted_fingerprint=_opt_str(d["salted_fingerprint"], f"{where}.salted_fingerprint"),
    )


def session_to_dict(s: SessionInfo) -> dict:
    return {
        "uuid": s.uuid,
        "create_time": s.create_time,
        "frontend_git_hash": s.frontend_git_hash,
        "ack_tos": s.ack_tos,
        "new_battle_times": list(s.new_battle_times),
    }


def session_from_dict(d: dict, where: str) -> SessionInfo:
    _require(d, {"uuid", "create_time", "frontend_git_hash", "ack_tos", "new_battle_times"}, where)
    return SessionInfo(
        uuid=str(d["uuid"]),
        create_time=float(d["create_time"]),
        frontend_git_hash=str(d["frontend_git_hash"]),
        ack_tos=str(d["ack_tos"]),
        new_battle_times=tuple(float(t) for t in d["new_battle_times"]),
    )


def system_key_to_dict(k: SystemKey) -> dict:
    return {"system_tag": k.system_tag, "variant_tag": k.variant_tag}


def system_key_from_dict(d: dict, where: str = "system_key") -> SystemKey:
    _require(d, {"system_tag", "variant_tag"}, where)
    return SystemKey(system_tag=str(d["system_tag"]), variant_tag=str(d["variant_tag"]))


def metadata_to_dict(m: GenerationMetadata) -> dict:
    return {
        "system_key": system_key_to_dict(m.system_key),
        "system_git_hash": m.system_git_hash,
        "system_time_queued": m.system_time_queued,
        "system_time_started": m.system_time_started,
        "system_time_completed": m.system_time_completed,
        "gateway_time_started": m.gateway_time_started,
        "gateway_time_completed": m.gateway_time_completed,
        "gateway_num_retries": m.gateway_num_retries,
        "size_bytes": m.size_bytes,
        "lyrics": m.lyrics,
        "sample_rate": m.sample_rate,
        "num_channels": m.num_channels,
        "duration": m.duration,
        "checksum": m.checksum,
    }


_METADATA_KEYS = {
    "system_key",
    "system_git_hash",
    "system_time_queued",
    "system_time_started",
    "system_time_completed",
    "gateway_time_started",
    "gateway_time_completed",
    "gateway_num_retries",
    "size_bytes",
    "lyrics",
    "sample_rate",
    "num_channels",
    "duration",
    "checksum",
}


def metadata_from_dict(d: dict, where: str) -> GenerationMetadata:
    _require(d, _METADATA_KEYS, where)
    return GenerationMetadata(
        system_key=system_key_from_dict(d["system_key"], f"{where}.system_key"),
        system_git_hash=str(d["system_git_hash"]),
        system_time_queued=float(d["system_time_queued"]),
        system_time_started=float(d["system_time_started"]),
        system_time_completed=float(d["system_time_completed"]),
        gateway_time_started=_opt_float(d["gateway_time_started"]),
        gateway_time_completed=_opt_float(d["gateway_time_completed"]),
        gateway_num_retries=int(d["gateway_num_retries"]),
        size_bytes=int(d["size_bytes"]),
        lyrics=_opt_str(d["lyrics"], f"{where}.lyrics"),
        sample_rate=int(d["sample_rate"]),
        num_channels=int(d["num_channels"]),
        duration=float(d["duration"]),
        checksum=str(d["checksum"]),
    )


def listen_events_to_list(events: tuple[ListenEvent, ...]) -> list:
    return [[ev.kind.value, ev.time] for ev in events]


def listen_events_from_list(items: Any, where: str) -> tuple[ListenEvent, ...]:
    if not isinstance(items, list):
        raise RecordParseError(f"{where}: expected a list of [kind, time] pairs")
    events = []
    for i, item in enumerate(items):
        if not isinstance(item, list) or len(item) != 2:
            raise RecordParseError(f"{where}[{i}]: expected a [kind, time] pair")
        kind, time = item
        try:
            parsed = ListenEventKind(kind)
        except ValueError:
            raise RecordParseError(f"{where}[{i}]: unknown event kind {kind!r}") from None
        events.append(ListenEvent(kind=parsed, time=float(time)))
    return tuple(events)


def vote_to_dict(v: Vote) -> dict:
    d = {
        "a_listen_data": listen_events_to_list(v.a_listen_data),
        "b_listen_data": listen_events_to_list(v.b_listen_data),
        "preference": v.preference.value,
        "preference_time": v.preference_time,
        "feedback": v.feedback,
        "a_feedback": v.a_feedback,
        "b_feedback": v.b_feedback,
        "feedback_time": v.feedback_time,
    }
    # Extension fields serialize only when present so that records produced by
    # other writers round-trip unchanged.
    if v.a_listen_receipt_times is not None:
        d["a_listen_receipt_times"] = list(v.a_listen_receipt_times)
    if v.b_listen_receipt_times is not None:
        d["b_listen_receipt_times"] = list(v.b_listen_receipt_times)
    return d


_VOTE_KEYS = {
    "a_listen_data",
    "b_listen_data",
    "preference",
    "preference_time",
    "feedback",
    "a_feedback",
    "b_feedback",
    "feedback_time",
}
_VOTE_OPT_KEYS = {"a_listen_receipt_times", "b_listen_receipt_times"}


def vote_from_dict(d: dict) -> Vote:
    present_opt = d.keys() & _VOTE_OPT_KEYS
    _require({k: v for k, v in d.items() if k not in present_opt}, _VOTE_KEYS, "vote")
    try:
        preference = Preference(d["preference"])
    except ValueError:
        raise RecordParseError(f"vote.preference: unknown value {d['preference']!r}") from None
    receipts_a = d.get("a_listen_receipt_times")
    receipts_b = d.get("b_listen_receipt_times")
    return Vote(
        a_listen_data=listen_events_from_list(d["a_listen_data"], "vote.a_listen_data"),
        b_listen_data=listen_events_from_list(d["b_listen_data"], "vote.b_listen_data"),
        preference=preference,
        preference_time=float(d["preference_time"]),
        feedback=_opt_str(d["feedback"], "vote.feedback"),
        a_feedback=_opt_str(d["a_feedback"], "vote.a_feedback"),
        b_feedback=_opt_str(d["b_feedback"], "vote.b_feedback"),
        feedback_time=_opt_float(d["feedback_time"]),
        a_listen_receipt_times=None if receipts_a is None else tuple(float(t) for t in receipts_a),
        b_listen_receipt_times=None if receipts_b is None else tuple(float(t) for t in receipts_b),
    )


def timings_to_list(timings: tuple[tuple[str, float], ...]) -> list:
    return [[label, time] for label, time in timings]


def timings_from_list(items: Any, where: str = "timings") -> tuple[tuple[str, float], ...]:
    if not isinstance(items, list):
        raise RecordParseError(f"{where}: expected a list of [label, time] pairs")
    out = []
    for i, item in enumerate(items):
        if not isinstance(item, list) or len(item) != 2:
            raise RecordParseError(f"{where}[{i}]: expected a [label, time] pair")
        out.append((str(item[0]), float(item[1])))
    return tuple(out)


# -- battle records ----------------------------------------------------------

_RECORD_KEYS = {
    "uuid",
    "gateway_git_hash",
    "prompt",
    "prompt_detailed",
    "prompt_user",
    "prompt_session",
    "prompt_prebaked",
    "prompt_routed",
    "a_audio_url",
    "a_metadata",
    "b_audio_url",
    "b_metadata",
    "vote",
    "vote_user",
    "vote_session",
    "timings",
}


def record_to_dict(r: BattleRecord) -> dict:
    return {
        "uuid": r.uuid,
        "gateway_git_hash": r.gateway_git_hash,
        "prompt": prompt_to_dict(r.prompt),
        "prompt_detailed": detailed_to_dict(r.prompt_detailed),
        "prompt_user": identity_to_dict(r.prompt_user),
        "prompt_session": session_to_dict(r.prompt_session),
        "prompt_prebaked": r.prompt_prebaked,
        "prompt_routed": r.prompt_routed,
        "a_audio_url": r.a_audio_url,
        "a_metadata": metadata_to_dict(r.a_metadata),
        "b_audio_url": r.b_audio_url,
        "b_metadata": metadata_to_dict(r.b_metadata),
        "vote": vote_to_dict(r.vote) if r.vote is not None else None,
        "vote_user": identity_to_dict(r.vote_user) if r.vote_user is not None else None,
        "vote_session": session_to_dict(r.vote_session) if r.vote_session is not None else None,
        "timings": timings_to_list(r.timings),
    }


def record_from_dict(d: dict) -> BattleRecord:
    _require(d, _RECORD_KEYS, "battle record")
    return BattleRecord(
        uuid=str(d["uuid"]),
        gateway_git_hash=str(d["gateway_git_hash"]),
        prompt=prompt_from_dict(d["prompt"]),
        prompt_detailed=detailed_from_dict(d["prompt_detailed"]),
        prompt_user=identity_from_dict(d["prompt_user"], "prompt_user"),
        prompt_session=session_from_dict(d["prompt_session"], "prompt_session"),
        prompt_prebaked=bool(d["prompt_prebaked"]),
        prompt_routed=bool(d["prompt_routed"]),
        a_audio_url=str(d["a_audio_url"]),
        a_metadata=metadata_from_dict(d["a_metadata"], "a_metadata"),
        b_audio_url=str(d["b_audio_url"]),
        b_metadata=metadata_from_dict(d["b_metadata"], "b_metadata"),
        vote=vote_from_dict(d["vote"]) if d["vote"] is not None else None,
        vote_user=identity_from_dict(d["vote_user"], "vote_user")
        if d["vote_user"] is not None
        else None,
        vote_session=session_from_dict(d["vote_session"], "vote_session")
        if d["vote_session"] is not None
        else None,
        timings=timings_from_list(d["timings"]),
    )


_FAILED_KEYS = {
    "uuid",
    "gateway_git_hash",
    "prompt",
    "prompt_detailed",
    "prompt_user",
    "prompt_session",
    "prompt_prebaked",
    "prompt_routed",
    "failure",
    "timings",
}


def failed_battle_to_dict(r: FailedBattle) -> dict:
    return {
        "uuid": r.uuid,
        "gateway_git_hash": r.gateway_git_hash,
        "prompt": prompt_to_dict(r.prompt),
        "prompt_detailed": detailed_to_dict(r.prompt_detailed)
        if r.prompt_detailed is not None
        else None,
        "prompt_user": identity_to_dict(r.prompt_user),
        "prompt_session": session_to_dict(r.prompt_session),
        "prompt_prebaked": r.prompt_prebaked,
        "prompt_routed": r.prompt_routed,
        "failure": {
            "phase": r.failure.phase,
            "reason": r.failure.reason,
            "sides": list(r.failure.sides),
        },
        "timings": timings_to_list(r.timings),
    }


def failed_battle_from_dict(d: dict) -> FailedBattle:
    _require(d, _FAILED_KEYS, "failed battle record")
    fail = d["failure"]
    _require(fail, {"phase", "reason", "sides"}, "failure")
    return FailedBattle(
        uuid=str(d["uuid"]),
        gateway_git_hash=str(d["gateway_git_hash"]),
        prompt=prompt_from_dict(d["prompt"]),
        prompt_detailed=detailed_from_dict(d["prompt_detailed"])
        if d["prompt_detailed"] is not None
        else None,
        prompt_user=identity_from_dict(d["prompt_user"], "prompt_user"),
        prompt_session=session_from_dict(d["prompt_session"], "prompt_session"),
        prompt_prebaked=bool(d["prompt_prebaked"]),
        prompt_routed=bool(d["prompt_routed"]),
        failure=FailureInfo(
            phase=str(fail["phase"]),
            reason=str(fail["reason"]),
            sides=tuple(str(s) for s in fail["sides"]),
        ),
        timings=timings_from_list(d["timings"]),
    )


def battle_to_dict(record: BattleRecord | FailedBattle) -> dict:
    """Serialize either record kind; failed battles carry a ``failure`` key."""
    if isinstance(record, FailedBattle):
        return failed_battle_to_dict(record)
    return record_to_dict(record)


def battle_from_dict(d: dict) -> BattleRecord | FailedBattle:
    if "failure" in d:
        return failed_battle_from_dict(d)
    return record_from_dict(d)
