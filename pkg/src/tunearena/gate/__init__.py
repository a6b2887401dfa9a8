"""Prompt moderation, structured extraction, and lyrics provisioning."""

from tunearena.gate.types import (
    AnalyzerBackend,
    GateResult,
    ModerationCategory,
    ModerationVerdict,
)
from tunearena.gate.ops import gate, provision_lyrics
from tunearena.gate.rules import RuleAnalyzer, RuleConfig, rule_analyze
from tunearena.gate.remote import RemoteAnalyzer

__all__ = [
    "AnalyzerBackend",
    "GateResult",
    "ModerationCategory",
    "ModerationVerdict",
    "RemoteAnalyzer",
    "RuleAnalyzer",
    "RuleConfig",
    "gate",
    "provision_lyrics",
    "rule_analyze",
]
