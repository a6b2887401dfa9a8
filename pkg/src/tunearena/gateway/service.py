"""Public HTTP service: the platform's only client-facing surface.

Raw identifiers are pseudonymized inside the request handlers, before any
value reaches the gateway; nothing downstream ever sees an IP address or
fingerprint. Responses before the vote are limited to opaque references.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field

from tunearena.domain.serialize import RecordParseError, listen_events_from_list
from tunearena.domain.types import Preference
from tunearena.errors import TuneArenaError
from tunearena.gateway.core import Gateway
from tunearena.privacy import scrub_identity
from tunearena.domain.types import UserIdentity


class ConsentResponse(BaseModel):
    text: str
    digest: str


class CreateSessionRequest(BaseModel):
    ack_tos: str
    frontend_version: str = "unknown"


class SessionResponse(BaseModel):
    session_uuid: str
    create_time: float
    ack_tos: str


class CreateBattleRequest(BaseModel):
    session_uuid: str
    prompt: str
    prebaked: bool = False


class BlindBattleResponse(BaseModel):
    battle_uuid: str
    a_audio_url: str
    b_audio_url: str


class ListenBatchRequest(BaseModel):
    side: str = Field(pattern="(?i)^[ab]$")
    events: list[tuple[str, float]]


class ListenBatchResponse(BaseModel):
    battle_uuid: str
    accepted: int


class GateStatusResponse(BaseModel):
    battle_uuid: str
    open: bool
    required_seconds: float
    a_listened_seconds: float
    b_listened_seconds: float


class VoteRequest(BaseModel):
    session_uuid: str
    preference: Preference


class SystemKeyModel(BaseModel):
    system_tag: str
    variant_tag: str


class RevealSideModel(BaseModel):
    system: SystemKeyModel
    display_name: str
    generation_seconds: float
    rtf: float
    duration_seconds: float
    retries: int


class RevealResponse(BaseModel):
    battle_uuid: str
    preference: Preference
    a: RevealSideModel
    b: RevealSideModel
    download_url: Optional[str]


class FeedbackRequest(BaseModel):
    feedback: Optional[str] = None
    a_feedback: Optional[str] = None
    b_feedback: Optional[str] = None


class FeedbackResponse(BaseModel):
    battle_uuid: str
    recorded: bool


class LeaderboardResponse(BaseModel):
    entries: list[dict]
    scatter: list[dict]


def _reveal_side(side) -> RevealSideModel:
    return RevealSideModel(
        system=SystemKeyModel(
            system_tag=side.system.system_tag, variant_tag=side.system.variant_tag
        ),
        display_name=side.display_name,
        generation_seconds=side.generation_seconds,
        rtf=side.rtf,
        duration_seconds=side.duration_seconds,
        retries=side.retries,
    )


def build_service_app(gateway: Gateway) -> FastAPI:
    app = FastAPI(title="tunearena", version=gateway.gateway_version)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def identity_from(request: Request) -> UserIdentity:
        forwarded = request.headers.get("x-forwarded-for", "")
        ip = forwarded.split(",")[0].strip() if forwarded else None
        if not ip:
            ip = request.client.host if request.client else "unknown-client"
        fingerprint = request.headers.get("x-client-fingerprint") or None
        return scrub_identity(
            UserIdentity(ip=ip, fingerprint=fingerprint), gateway.salt
        )

    @app.exception_handler(TuneArenaError)
    async def platform_error(request: Request, exc: TuneArenaError):
        return JSONResponse(status_code=exc.http_status, content=exc.payload())

    @app.exception_handler(RecordParseError)
    async def parse_error(request: Request, exc: RecordParseError):
        return JSONResponse(
            status_code=400, content={"code": "bad_request", "message": str(exc)}
        )

    @app.get("/consent", response_model=ConsentResponse)
    async def consent():
        text, digest = gateway.consent()
        return ConsentResponse(text=text, digest=digest)

    @app.post("/sessions", response_model=SessionResponse)
    async def create_session(body: CreateSessionRequest):
        info = gateway.create_session(body.ack_tos, body.frontend_version)
        return SessionResponse(
            session_uuid=info.uuid, create_time=info.create_time, ack_tos=info.ack_tos
        )

    @app.post("/battles", response_model=BlindBattleResponse)
    async def create_battle(body: CreateBattleRequest, request: Request):
        blind = await gateway.create_battle(
            body.session_uuid,
            body.prompt,
            identity_from(request),
            prebaked=body.prebaked,
        )
        return BlindBattleResponse(
            battle_uuid=blind.battle_uuid,
            a_audio_url=blind.a_audio_url,
            b_audio_url=blind.b_audio_url,
        )

    @app.get("/battles/{battle_uuid}/audio/{side}")
    async def fetch_audio(battle_uuid: str, side: str, download: int = Query(default=0)):
        payload = gateway.audio_payload(battle_uuid, side)
        headers = {}
        if download:
            headers["Content-Disposition"] = (
                f'attachment; filename="{battle_uuid}-{side.lower()}.wav"'
            )
        return Response(content=payload, media_type="audio/wav", headers=headers)

    @app.post("/battles/{battle_uuid}/listen", response_model=ListenBatchResponse)
    async def submit_listen(battle_uuid: str, body: ListenBatchRequest):
        events = listen_events_from_list(
            [[kind, t] for kind, t in body.events], "events"
        )
        accepted = await gateway.submit_listen_events(battle_uuid, body.side, events)
        return ListenBatchResponse(battle_uuid=battle_uuid, accepted=accepted)

    @app.get("/battles/{battle_uuid}/gate", response_model=GateStatusResponse)
    async def gate_status(battle_uuid: str):
        status = gateway.gate_status(battle_uuid)
        return GateStatusResponse(
            battle_uuid=status.battle_uuid,
            open=status.open,
            required_seconds=status.required_seconds,
            a_listened_seconds=status.a_listened_seconds,
            b_listened_seconds=status.b_listened_seconds,
        )

    @app.post("/battles/{battle_uuid}/vote", response_model=RevealResponse)
    async def submit_vote(battle_uuid: str, body: VoteRequest, request: Request):
        reveal = await gateway.submit_vote(
            battle_uuid, body.session_uuid, body.preference, identity_from(request)
        )
        return RevealResponse(
            battle_uuid=reveal.battle_uuid,
            preference=reveal.preference,
            a=_reveal_side(reveal.a),
            b=_reveal_side(reveal.b),
            download_url=reveal.download_url,
        )

    @app.post("/battles/{battle_uuid}/feedback", response_model=FeedbackResponse)
    async def submit_feedback(battle_uuid: str, body: FeedbackRequest):
        recorded = await gateway.submit_feedback(
            battle_uuid, body.feedback, body.a_feedback, body.b_feedback
        )
        return FeedbackResponse(battle_uuid=battle_uuid, recorded=recorded)

    @app.get("/leaderboard", response_model=LeaderboardResponse)
    async def leaderboard():
        entries, scatter = gateway.leaderboard()
        return LeaderboardResponse(entries=entries, scatter=scatter)

    return app
