from __future__ import annotations

from dataclasses import dataclass, field

from tunearena.domain.types import DomainLimits

DEFAULT_CONSENT_TEXT = """\
Listening study consent

You are about to take part in a research study on music generation quality.
You will type a prompt, listen to two anonymous machine-generated tracks, and
tell us which you prefer. We record your prompt, playback actions with
timestamps (play, pause, and once-per-second heartbeats), your vote, and any
written feedback, together with pseudonymous identifiers derived from your
network address via salted one-way hashing. Raw addresses are never stored.

All collected data, including the generated audio where licenses permit, is
published openly on a rolling monthly schedule. Do not include personal
information in your prompts or feedback. Participation is voluntary and you
may stop at any time. By continuing you confirm you are at least 18 years old
and consent to the collection and public release described above.
"""


@dataclass(frozen=True)
class GatewayConfig:
    """Operator-tunable knobs; defaults match the documented platform policy."""

    consent_text: str = DEFAULT_CONSENT_TEXT
    listen_gate_seconds: float = 4.0
    generate_deadline_seconds: float = 120.0
    generate_retries: int = 1
    health_budget_seconds: float = 10.0
    health_cooldown_seconds: float = 30.0
    limits: DomainLimits = field(default_factory=DomainLimits)
    # token bucket per salted identifier on battle creation; 0 disables
    rate_limit_per_minute: float = 60.0
    rate_limit_burst: int = 20
    bootstrap_resamples: int = 200
    bootstrap_seed: int = 0
