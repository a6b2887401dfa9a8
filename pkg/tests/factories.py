"""Builders for schema-valid synthetic battle records."""

from __future__ import annotations

import uuid as uuid_mod
from datetime import datetime, timezone

from tunearena.domain.types import (
    BattleRecord,
    DetailedPrompt,
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
from tunearena.hashing import digest128_hex

# noon UTC, July 5th 2026: a comfortably closed month by the time tests run
BASE_EPOCH = datetime(2026, 7, 5, 12, 0, 0, tzinfo=timezone.utc).timestamp()


def salted(name: str) -> str:
    return digest128_hex(f"salted:{name}")


def make_identity(name: str = "user-1") -> UserIdentity:
    return UserIdentity(ip=None, salted_ip=salted(name), fingerprint=None)


def make_session(t0: float = BASE_EPOCH, battles: int = 1) -> SessionInfo:
    return SessionInfo(
        uuid=str(uuid_mod.uuid4()),
        create_time=t0 - 30.0,
        frontend_git_hash="test-frontend/1.0",
        ack_tos=digest128_hex("consent text v1"),
        new_battle_times=tuple(t0 - 20.0 + i for i in range(battles)),
    )


def make_metadata(
    key: SystemKey,
    *,
    gen_start: float,
    gen_end: float,
    duration: float,
    checksum: str,
    lyrics: str | None = None,
    retries: int = 0,
) -> GenerationMetadata:
    span = gen_end - gen_start
    return GenerationMetadata(
        system_key=key,
        system_git_hash="test-system/1.0",
        system_time_queued=gen_start + span * 0.05,
        system_time_started=gen_start + span * 0.10,
        system_time_completed=gen_start + span * 0.90,
        size_bytes=int(duration * 16000),
        lyrics=lyrics,
        sample_rate=8000,
        num_channels=1,
        duration=duration,
        checksum=checksum,
        gateway_time_started=gen_start,
        gateway_time_completed=gen_end,
        gateway_num_retries=retries,
    )


def make_record(
    *,
    a_tag: str = "sys-a",
    b_tag: str = "sys-b",
    variant: str = "default",
    preference: Preference | None = Preference.A,
    t0: float = BASE_EPOCH,
    prompt_text: str = "calm synth instrumental",
    instrumental: bool = True,
    a_duration: float = 8.0,
    b_duration: float = 10.0,
    a_gen_seconds: float = 2.0,
    b_gen_seconds: float = 3.0,
    a_checksum: str | None = None,
    b_checksum: str | None = None,
    a_audio_url: str | None = None,
    b_audio_url: str | None = None,
    with_feedback: bool = False,
    listen_seconds: float = 5.0,
    user: str = "user-1",
    a_retries: int = 0,
    b_retries: int = 0,
) -> BattleRecord:
    """A fully valid record; ``preference=None`` leaves it unvoted."""
    a_key = SystemKey(system_tag=a_tag, variant_tag=variant)
    b_key = SystemKey(system_tag=b_tag, variant_tag=variant)
    a_ck = a_checksum or digest128_hex(f"audio:{a_tag}:{t0}")
    b_ck = b_checksum or digest128_hex(f"audio:{b_tag}:{t0}")

    cursor = t0
    timings: list[tuple[str, float]] = []

    def stamp(label: str, dt: float = 0.001) -> float:
        nonlocal cursor
        cursor += dt
        timings.append((label, cursor))
        return cursor

    stamp("parse")
    stamp("generate")
    stamp("route")
    stamp("sample_pair")
    stamp("generate_parallel_start")
    stamp(f"health_check_{a_key.label()}_start")
    stamp(f"health_check_{b_key.label()}_start")
    stamp(f"health_check_{a_key.label()}_end", 0.02)
    stamp(f"health_check_{b_key.label()}_end")
    a_start = stamp(f"generate_{a_key.label()}_start")
    b_start = stamp(f"generate_{b_key.label()}_start")
    a_end, b_end = a_start + a_gen_seconds, b_start + b_gen_seconds
    for label, t in sorted(
        [(f"generate_{a_key.label()}_end", a_end), (f"generate_{b_key.label()}_end", b_end)],
        key=lambda item: item[1],
    ):
        timings.append((label, t))
    cursor = max(a_end, b_end)
    stamp("generate_parallel_end")
    stamp("create_battle_obj")
    stamp("upload_audio", 0.01)
    stamp("upload_metadata", 0.01)
    delivered = cursor

    vote = None
    vote_user = None
    vote_session = None
    session = make_session(t0)
    if preference is not None:
        play = delivered + 1.0
        pause = play + listen_seconds
        listen = (
            ListenEvent(ListenEventKind.PLAY, play),
            ListenEvent(ListenEventKind.TICK, play + 1.0),
            ListenEvent(ListenEventKind.PAUSE, pause),
        )
        preference_time = pause + 1.0
        feedback_time = preference_time + 5.0 if with_feedback else None
        vote = Vote(
            a_listen_data=listen,
            b_listen_data=listen,
            preference=preference,
            preference_time=preference_time,
            feedback="close one" if with_feedback else None,
            a_feedback=None,
            b_feedback=None,
            feedback_time=feedback_time,
            a_listen_receipt_times=(pause + 0.2,),
            b_listen_receipt_times=(pause + 0.2,),
        )
        vote_user = make_identity(user)
        vote_session = session
        timings.append(("vote", preference_time + 0.1))
        if with_feedback:
            timings.append(("vote", feedback_time + 0.1))

    return BattleRecord(
        uuid=str(uuid_mod.uuid4()),
        gateway_git_hash="test-gateway/1.0",
        prompt=Prompt(prompt=prompt_text),
        prompt_detailed=DetailedPrompt(overall_prompt=prompt_text, instrumental=instrumental),
        prompt_user=make_identity(user),
        prompt_session=session,
        prompt_prebaked=False,
        prompt_routed=True,
        a_audio_url=a_audio_url or f"audio/{a_ck}.wav",
        a_metadata=make_metadata(
            a_key,
            gen_start=a_start,
            gen_end=a_end,
            duration=a_duration,
            checksum=a_ck,
            retries=a_retries,
        ),
        b_audio_url=b_audio_url or f"audio/{b_ck}.wav",
        b_metadata=make_metadata(
            b_key,
            gen_start=b_start,
            gen_end=b_end,
            duration=b_duration,
            checksum=b_ck,
            retries=b_retries,
        ),
        vote=vote,
        vote_user=vote_user,
        vote_session=vote_session,
        timings=tuple(timings),
    )
