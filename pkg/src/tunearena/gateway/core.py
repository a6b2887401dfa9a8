"""Battle lifecycle orchestration.

One battle runs gate -> route -> sample pair -> parallel generate -> blind
delivery -> telemetry -> gated vote -> reveal. Fairness rules enforced here:
both generations are awaited and delivered together, and nothing sent to the
client before the vote names a system, a provider, or a track duration.

Concurrency: battles are independent; per-battle state is guarded by an
asyncio lock so telemetry appends, gate checks, and the vote serialize within
a battle without battles blocking each other. The two generation calls of one
battle run concurrently and are joined before delivery.
"""

from __future__ import annotations

import asyncio
import dataclasses
import logging
import random
import time
import uuid as uuid_mod
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from tunearena import GATEWAY_VERSION
from tunearena.domain.listen import effective_listen_seconds
from tunearena.domain.types import (
    PHASE_TRANSITIONS,
    BattlePhase,
    BattleRecord,
    DetailedPrompt,
    FailedBattle,
    FailureInfo,
    GenerationMetadata,
    ListenEvent,
    Preference,
    Prompt,
    SessionInfo,
    SystemKey,
    UserIdentity,
    Vote,
)
from tunearena.endpoints.descriptor import GenerateRequest, SystemDescriptor
from tunearena.endpoints.errors import EndpointError
from tunearena.endpoints.routing import compatible_systems
from tunearena.errors import (
    BattleFailedError,
    BattlePhaseError,
    ConsentRequiredError,
    DuplicateFeedbackError,
    DuplicateVoteError,
    InvalidPromptError,
    InvalidRecordError,
    ListenOrderError,
    ModerationRejectedError,
    UnknownBattleError,
    UnknownSessionError,
    VoteGateNotMetError,
)
from tunearena.gate.ops import gate as run_gate
from tunearena.gate.ops import provision_lyrics
from tunearena.gate.types import AnalyzerBackend
from tunearena.gateway.config import GatewayConfig
from tunearena.gateway.ratelimit import TokenBucketLimiter
from tunearena.gateway.registry import EndpointRegistry
from tunearena.gateway.sampler import PairSampler, UniformPairSampler
from tunearena.hashing import digest128_hex
from tunearena.leaderboard import build_entries, emit_leaderboard, rtf
from tunearena.privacy import SaltConfig
from tunearena.store.battles import BattleStore

logger = logging.getLogger(__name__)

SIDES = ("A", "B")


@dataclass
class _SessionState:
    info: SessionInfo
    new_battle_times: list[float] = field(default_factory=list)

    def snapshot(self) -> SessionInfo:
        return dataclasses.replace(
            self.info, new_battle_times=tuple(self.new_battle_times)
        )


@dataclass
class _LiveBattle:
    uuid: str
    session_uuid: str
    phase: BattlePhase
    side_descriptors: dict[str, SystemDescriptor]
    timings: list[tuple[str, float]]
    record: Optional[BattleRecord] = None
    listen: dict[str, list[ListenEvent]] = field(default_factory=lambda: {"A": [], "B": []})
    receipts: dict[str, list[float]] = field(default_factory=lambda: {"A": [], "B": []})
    audio: dict[str, str] = field(default_factory=dict)  # side -> checksum
    feedback_recorded: bool = False
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)


@dataclass(frozen=True)
class BlindBattle:
    """What the client sees before voting: opaque audio references only."""

    battle_uuid: str
    a_audio_url: str
    b_audio_url: str


@dataclass(frozen=True)
class GateStatus:
    battle_uuid: str
    open: bool
    required_seconds: float
    a_listened_seconds: float
    b_listened_seconds: float


@dataclass(frozen=True)
class RevealSide:
    system: SystemKey
    display_name: str
    generation_seconds: float
    rtf: float
    duration_seconds: float
    retries: int


@dataclass(frozen=True)
class Reveal:
    battle_uuid: str
    preference: Preference
    a: RevealSide
    b: RevealSide
    download_url: Optional[str]


class _SideFailure(Exception):
    def __init__(self, side: str, reason: str):
        super().__init__(reason)
        self.side = side
        self.reason = reason


class Gateway:
    def __init__(
        self,
        *,
        registry: EndpointRegistry,
        analyzer: AnalyzerBackend,
        store: BattleStore,
        salt: SaltConfig,
        config: GatewayConfig | None = None,
        clock: Callable[[], float] = time.time,
        rng: random.Random | None = None,
        sampler: PairSampler | None = None,
        gateway_version: str = GATEWAY_VERSION,
    ):
        self.registry = registry
        self.analyzer = analyzer
        self.store = store
        self.salt = salt
        self.config = config or GatewayConfig()
        self.clock = clock
        self.rng = rng or random.Random()
        self.sampler = sampler or UniformPairSampler()
        self.gateway_version = gateway_version
        self.consent_digest = digest128_hex(self.config.consent_text)
        self._sessions: dict[str, _SessionState] = {}
        self._battles: dict[str, _LiveBattle] = {}
        self._limiter = TokenBucketLimiter(
            self.config.rate_limit_per_minute, self.config.rate_limit_burst, clock
        )
        self._leaderboard_cache: tuple[int, tuple[list, list]] | None = None

    # -- sessions -------------------------------------------------------------

    def consent(self) -> tuple[str, str]:
        return self.config.consent_text, self.consent_digest

    def create_session(
        self, ack_tos: str, frontend_version: str = "unknown"
    ) -> SessionInfo:
        if ack_tos != self.consent_digest:
            raise ConsentRequiredError(
                "acknowledged consent digest does not match the current consent text"
            )
        info = SessionInfo(
            uuid=str(uuid_mod.uuid4()),
            create_time=self.clock(),
            frontend_git_hash=frontend_version,
            ack_tos=ack_tos,
            new_battle_times=(),
        )
        self._sessions[info.uuid] = _SessionState(info=info)
        return info

    def _session(self, session_uuid: str) -> _SessionState:
        try:
            return self._sessions[session_uuid]
        except KeyError:
            raise UnknownSessionError(f"unknown session {session_uuid}") from None

    def _battle(self, battle_uuid: str) -> _LiveBattle:
        try:
            return self._battles[battle_uuid]
        except KeyError:
            raise UnknownBattleError(f"unknown battle {battle_uuid}") from None

    def _transition(self, battle: _LiveBattle, to: BattlePhase) -> None:
        if to not in PHASE_TRANSITIONS[battle.phase]:
            raise BattlePhaseError(
                f"illegal phase transition {battle.phase.value} -> {to.value}"
            )
        battle.phase = to

    # -- battle lifecycle ------------------------------------------------------

    async def create_battle(
        self,
        session_uuid: str,
        prompt_text: str,
        identity: UserIdentity,
        *,
        prebaked: bool = False,
    ) -> BlindBattle:
        session = self._session(session_uuid)
        self._require_scrubbed(identity)
        self._limiter.check(identity.salted_ip)
        session.new_battle_times.append(self.clock())

        prompt = Prompt(prompt=prompt_text)
        if not prompt_text.strip():
            raise InvalidPromptError("prompt must be non-empty")
        if len(prompt_text) > self.config.limits.max_prompt_chars:
            raise InvalidPromptError(
                f"prompt exceeds {self.config.limits.max_prompt_chars} characters"
            )

        timings: list[tuple[str, float]] = []

        def stamp(label: str) -> float:
            now = self.clock()
            timings.append((label, now))
            return now

        result = await run_gate(prompt, self.analyzer)
        stamp("parse")
        if not result.verdict.accepted:
            raise ModerationRejectedError(
                result.verdict.category.value, result.verdict.reason
            )
        detailed = result.detailed
        logger.info(
            "battle gate passed (analyzer config %s): instrumental=%s duration=%s",
            self.analyzer.config_digest,
            detailed.instrumental,
            detailed.duration,
        )
        stamp("generate")

        battle_uuid = str(uuid_mod.uuid4())
        compatible = compatible_systems(detailed, self.registry.descriptors())
        stamp("route")
        available = self.registry.available(compatible)
        a_desc, b_desc = self.sampler.sample(available, self.rng)
        assert a_desc.key != b_desc.key, "sampler returned a self-battle"
        stamp("sample_pair")

        battle = _LiveBattle(
            uuid=battle_uuid,
            session_uuid=session_uuid,
            phase=BattlePhase.CREATED,
            side_descriptors={"A": a_desc, "B": b_desc},
            timings=timings,
        )
        self._battles[battle_uuid] = battle

        lyrics = None
        if not detailed.instrumental and any(
            d.requires_explicit_lyrics for d in (a_desc, b_desc)
        ):
            lyrics = await provision_lyrics(prompt, detailed, self.analyzer)

        self._transition(battle, BattlePhase.GENERATING)
        stamp("generate_parallel_start")
        results = await asyncio.gather(
            self._run_side("A", a_desc, detailed, lyrics, stamp),
            self._run_side("B", b_desc, detailed, lyrics, stamp),
            return_exceptions=True,
        )
        failures = [r for r in results if isinstance(r, _SideFailure)]
        unexpected = [
            r for r in results if isinstance(r, BaseException) and not isinstance(r, _SideFailure)
        ]
        if unexpected:
            raise unexpected[0]
        if failures:
            stamp("generate_parallel_end")
            self._fail_battle(battle, session, prompt, detailed, identity, prebaked, failures)
            raise BattleFailedError(
                "generation failed: " + "; ".join(f.reason for f in failures)
            )
        stamp("generate_parallel_end")

        (audio_a, meta_a), (audio_b, meta_b) = results
        stamp("create_battle_obj")
        try:
            # audio first, record last: a record is never visible without
            # its payloads, even across a crash mid-sequence
            ck_a = self.store.put_audio(audio_a)
            ck_b = self.store.put_audio(audio_b)
            battle.audio = {"A": ck_a, "B": ck_b}
            stamp("upload_audio")
            stamp("upload_metadata")
            record = BattleRecord(
                uuid=battle_uuid,
                gateway_git_hash=self.gateway_version,
                prompt=prompt,
                prompt_detailed=detailed,
                prompt_user=identity,
                prompt_session=session.snapshot(),
                prompt_prebaked=prebaked,
                prompt_routed=True,
                a_audio_url=self.store.audio_url_for(ck_a),
                a_metadata=meta_a,
                b_audio_url=self.store.audio_url_for(ck_b),
                b_metadata=meta_b,
                vote=None,
                vote_user=None,
                vote_session=None,
                timings=tuple(timings),
            )
            self.store.append_battle(record)
        except (OSError, InvalidRecordError) as exc:
            self._transition(battle, BattlePhase.FAILED)
            logger.exception("persistence failed for battle %s", battle_uuid)
            raise BattleFailedError(f"storage failure: {exc}") from exc
        battle.record = record
        self._transition(battle, BattlePhase.DELIVERED)
        return BlindBattle(
            battle_uuid=battle_uuid,
            a_audio_url=f"/battles/{battle_uuid}/audio/a",
            b_audio_url=f"/battles/{battle_uuid}/audio/b",
        )

    async def _run_side(
        self,
        side: str,
        desc: SystemDescriptor,
        detailed: DetailedPrompt,
        lyrics: Optional[str],
        stamp: Callable[[str], float],
    ) -> tuple[bytes, GenerationMetadata]:
        label = desc.key.label()
        endpoint = self.registry.endpoint_for(desc.key)
        stamp(f"health_check_{label}_start")
        status = await endpoint.health(self.config.health_budget_seconds)
        stamp(f"health_check_{label}_end")
        if not status.healthy:
            self.registry.mark_unhealthy(desc.key, status.reason)
            raise _SideFailure(side, f"{label} unhealthy: {status.reason}")

        wants_lyrics = desc.requires_explicit_lyrics and not detailed.instrumental
        request = GenerateRequest(
            detailed=detailed,
            provisioned_lyrics=lyrics if wants_lyrics else None,
            deadline=self.config.generate_deadline_seconds,
            attempt=0,
        )
        gateway_started = stamp(f"generate_{label}_start")
        attempt = 0
        async with self.registry.guard(desc.key):
            while True:
                try:
                    response = await endpoint.generate(
                        dataclasses.replace(request, attempt=attempt)
                    )
                    break
                except EndpointError as exc:
                    if not exc.retryable or attempt >= self.config.generate_retries:
                        stamp(f"generate_{label}_end")
                        raise _SideFailure(side, f"{label}: {exc}") from exc
                    attempt += 1
                    logger.warning("retrying %s after %s", label, exc)
        gateway_completed = stamp(f"generate_{label}_end")

        if digest128_hex(response.audio) != response.metadata.checksum:
            raise _SideFailure(side, f"{label}: payload checksum mismatch")
        metadata = dataclasses.replace(
            response.metadata,
            gateway_time_started=gateway_started,
            gateway_time_completed=gateway_completed,
            gateway_num_retries=attempt,
        )
        return response.audio, metadata

    def _fail_battle(
        self,
        battle: _LiveBattle,
        session: _SessionState,
        prompt: Prompt,
        detailed: DetailedPrompt,
        identity: UserIdentity,
        prebaked: bool,
        failures: Sequence[_SideFailure],
    ) -> None:
        self._transition(battle, BattlePhase.FAILED)
        failed = FailedBattle(
            uuid=battle.uuid,
            gateway_git_hash=self.gateway_version,
            prompt=prompt,
            prompt_detailed=detailed,
            prompt_user=identity,
            prompt_session=session.snapshot(),
            prompt_prebaked=prebaked,
            prompt_routed=True,
            failure=FailureInfo(
                phase=BattlePhase.GENERATING.value,
                reason="; ".join(f.reason for f in failures),
                sides=tuple(sorted(f.side for f in failures)),
            ),
            timings=tuple(battle.timings),
        )
        self.store.append_battle(failed)

    # -- telemetry and voting --------------------------------------------------

    async def submit_listen_events(
        self, battle_uuid: str, side: str, events: Sequence[ListenEvent]
    ) -> int:
        battle = self._battle(battle_uuid)
        side = side.upper()
        if side not in SIDES:
            raise UnknownBattleError(f"unknown side {side!r}")
        async with battle.lock:
            if battle.phase is BattlePhase.VOTED:
                raise BattlePhaseError("voting has closed; telemetry no longer accepted")
            if battle.phase is not BattlePhase.DELIVERED:
                raise BattlePhaseError(f"battle is {battle.phase.value}, not DELIVERED")
            times = [e.time for e in events]
            if any(b < a for a, b in zip(times, times[1:])):
                raise ListenOrderError("batch timestamps must be non-decreasing")
            log = battle.listen[side]
            if log and times and times[0] < log[-1].time:
                raise ListenOrderError(
                    "batch starts before the last stored event for this side"
                )
            log.extend(events)
            battle.receipts[side].append(self.clock())
            return len(events)

    def _listened(self, battle: _LiveBattle, now: float) -> tuple[float, float]:
        return (
            effective_listen_seconds(battle.listen["A"], now),
            effective_listen_seconds(battle.listen["B"], now),
        )

    def vote_gate_open(self, battle_uuid: str, now: float | None = None) -> bool:
        return self.gate_status(battle_uuid, now).open

    def gate_status(self, battle_uuid: str, now: float | None = None) -> GateStatus:
        battle = self._battle(battle_uuid)
        if battle.phase not in (BattlePhase.DELIVERED, BattlePhase.VOTED):
            raise BattlePhaseError(f"battle is {battle.phase.value}, not DELIVERED")
        now = self.clock() if now is None else now
        a_listened, b_listened = self._listened(battle, now)
        required = self.config.listen_gate_seconds
        return GateStatus(
            battle_uuid=battle_uuid,
            open=a_listened >= required and b_listened >= required,
            required_seconds=required,
            a_listened_seconds=a_listened,
            b_listened_seconds=b_listened,
        )

    async def submit_vote(
        self,
        battle_uuid: str,
        session_uuid: str,
        preference: Preference,
        identity: UserIdentity,
    ) -> Reveal:
        battle = self._battle(battle_uuid)
        session = self._session(session_uuid)
        self._require_scrubbed(identity)
        async with battle.lock:
            if battle.phase is BattlePhase.VOTED:
                raise DuplicateVoteError("this battle has already been voted on")
            if battle.phase is not BattlePhase.DELIVERED:
                raise BattlePhaseError(f"battle is {battle.phase.value}, not DELIVERED")
            now = self.clock()
            a_listened, b_listened = self._listened(battle, now)
            required = self.config.listen_gate_seconds
            if a_listened < required or b_listened < required:
                raise VoteGateNotMetError(
                    a_remaining=max(0.0, required - a_listened),
                    b_remaining=max(0.0, required - b_listened),
                    required=required,
                )
            vote = Vote(
                a_listen_data=tuple(battle.listen["A"]),
                b_listen_data=tuple(battle.listen["B"]),
                preference=preference,
                preference_time=now,
                a_listen_receipt_times=tuple(battle.receipts["A"]),
                b_listen_receipt_times=tuple(battle.receipts["B"]),
            )
            battle.timings.append(("vote", self.clock()))
            record = dataclasses.replace(
                battle.record,
                vote=vote,
                vote_user=identity,
                vote_session=session.snapshot(),
                timings=tuple(battle.timings),
            )
            self.store.append_revision(record)
            battle.record = record
            self._transition(battle, BattlePhase.VOTED)
            self._leaderboard_cache = None
        return self._reveal(battle, record)

    def _reveal(self, battle: _LiveBattle, record: BattleRecord) -> Reveal:
        sides = {}
        for side, metadata in (("A", record.a_metadata), ("B", record.b_metadata)):
            desc = battle.side_descriptors[side]
            span = metadata.system_span
            sides[side] = RevealSide(
                system=metadata.system_key,
                display_name=desc.display_name,
                generation_seconds=span,
                rtf=rtf(metadata.duration, span),
                duration_seconds=metadata.duration,
                retries=metadata.gateway_num_retries,
            )
        download = None
        if record.vote.preference.decisive:
            chosen = record.vote.preference.value.lower()
            download = f"/battles/{battle.uuid}/audio/{chosen}?download=1"
        return Reveal(
            battle_uuid=battle.uuid,
            preference=record.vote.preference,
            a=sides["A"],
            b=sides["B"],
            download_url=download,
        )

    async def submit_feedback(
        self,
        battle_uuid: str,
        feedback: Optional[str] = None,
        a_feedback: Optional[str] = None,
        b_feedback: Optional[str] = None,
    ) -> bool:
        battle = self._battle(battle_uuid)
        async with battle.lock:
            if battle.phase is not BattlePhase.VOTED:
                raise BattlePhaseError("feedback is accepted only after voting")
            fields = {
                "feedback": (feedback or "").strip() or None,
                "a_feedback": (a_feedback or "").strip() or None,
                "b_feedback": (b_feedback or "").strip() or None,
            }
            if not any(fields.values()):
                return False
            if battle.feedback_recorded:
                raise DuplicateFeedbackError("feedback already recorded for this battle")
            now = self.clock()
            vote = dataclasses.replace(
                battle.record.vote, feedback_time=now, **fields
            )
            battle.timings.append(("vote", self.clock()))
            record = dataclasses.replace(
                battle.record, vote=vote, timings=tuple(battle.timings)
            )
            self.store.append_revision(record)
            battle.record = record
            battle.feedback_recorded = True
            return True

    # -- delivery and reporting -------------------------------------------------

    def audio_payload(self, battle_uuid: str, side: str) -> bytes:
        battle = self._battle(battle_uuid)
        side = side.upper()
        if side not in SIDES:
            raise UnknownBattleError(f"unknown side {side!r}")
        if battle.phase not in (BattlePhase.DELIVERED, BattlePhase.VOTED):
            raise BattlePhaseError("audio is available once the battle is delivered")
        return self.store.get_audio(battle.audio[side])

    def leaderboard(self) -> tuple[list[dict], list[dict]]:
        cache_key = len(self.store)
        if self._leaderboard_cache and self._leaderboard_cache[0] == cache_key:
            return self._leaderboard_cache[1]
        records = [
            r
            for r in self.store.latest_records().values()
            if isinstance(r, BattleRecord) and r.vote is not None
        ]
        entries = build_entries(
            records,
            self.registry.descriptors(),
            n_resamples=self.config.bootstrap_resamples,
            seed=self.config.bootstrap_seed,
        )
        result = emit_leaderboard(entries)
        self._leaderboard_cache = (cache_key, result)
        return result

    @staticmethod
    def _require_scrubbed(identity: UserIdentity) -> None:
        if identity.ip is not None or identity.fingerprint is not None:
            raise ValueError(
                "raw identifiers must be scrubbed at the service boundary"
            )
