"""Error types surfaced through the public service API.

Each error carries a stable ``code`` so clients can branch on failures without
parsing messages. Transport-level endpoint errors live in
:mod:`tunearena.endpoints.errors`; these are the user-facing ones.
"""

from __future__ import annotations


class TuneArenaError(Exception):
    """Base class for all platform errors."""

    code = "internal_error"
    http_status = 500

    def payload(self) -> dict:
        return {"code": self.code, "message": str(self)}


class InvalidPromptError(TuneArenaError):
    code = "invalid_prompt"
    http_status = 400


class ConsentRequiredError(TuneArenaError):
    """Acknowledged consent digest does not match the currently served text."""

    code = "consent_required"
    http_status = 409


class UnknownSessionError(TuneArenaError):
    code = "unknown_session"
    http_status = 404


class UnknownBattleError(TuneArenaError):
    code = "unknown_battle"
    http_status = 404


class ModerationRejectedError(TuneArenaError):
    code = "moderation_rejected"
    http_status = 422

    def __init__(self, category: str, reason: str):
        super().__init__(reason)
        self.category = category
        self.reason = reason

    def payload(self) -> dict:
        return {"code": self.code, "message": self.reason, "category": self.category}


class GateUnavailableError(TuneArenaError):
    """Prompt analysis backend is down; moderation fails closed."""

    code = "gate_unavailable"
    http_status = 503

    def payload(self) -> dict:
        return {"code": self.code, "message": str(self), "retryable": True}


class NoOpponentsError(TuneArenaError):
    """Fewer than two healthy compatible systems for this prompt."""

    code = "no_opponents"
    http_status = 503


class BattleFailedError(TuneArenaError):
    """A generation failed after retries; the battle was aborted."""

    code = "generation_failed"
    http_status = 502

    def payload(self) -> dict:
        return {"code": self.code, "message": str(self), "retryable": True}


class BattlePhaseError(TuneArenaError):
    """Operation not allowed in the battle's current phase."""

    code = "battle_phase"
    http_status = 409


class ListenOrderError(TuneArenaError):
    """Telemetry batch with out-of-order timestamps."""

    code = "listen_order"
    http_status = 400


class VoteGateNotMetError(TuneArenaError):
    """Vote attempted before the minimum listen gate; carries remaining seconds."""

    code = "gate_not_met"
    http_status = 409

    def __init__(self, a_remaining: float, b_remaining: float, required: float):
        super().__init__(
            f"listen gate not met: {a_remaining:.2f}s remaining on A, "
            f"{b_remaining:.2f}s remaining on B"
        )
        self.a_remaining = a_remaining
        self.b_remaining = b_remaining
        self.required = required

    def payload(self) -> dict:
        return {
            "code": self.code,
            "message": str(self),
            "required_seconds": self.required,
            "a_remaining_seconds": self.a_remaining,
            "b_remaining_seconds": self.b_remaining,
        }


class DuplicateVoteError(TuneArenaError):
    code = "already_voted"
    http_status = 409


class DuplicateFeedbackError(TuneArenaError):
    code = "feedback_recorded"
    http_status = 409


class RateLimitedError(TuneArenaError):
    code = "rate_limited"
    http_status = 429


class StorageConflictError(TuneArenaError):
    code = "storage_conflict"
    http_status = 409


class InvalidRecordError(TuneArenaError):
    """A record failed schema validation on its way into the store."""

    code = "invalid_record"
    http_status = 500

    def __init__(self, violations):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = list(violations)
