"""Deterministic rule-engine analyzer.

This backend exists so the platform and its tests run without a remote LLM:
moderation via deny-lists, vocal inference via a cue lexicon, and duration
extraction via a numeral-plus-time-unit grammar. It is a pure function of
(prompt, rules): repeated calls agree exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import yaml

from tunearena.domain.types import DetailedPrompt, Prompt
from tunearena.gate.types import GateResult, ModerationCategory, ModerationVerdict
from tunearena.hashing import digest128_hex


class GateConfigError(ValueError):
    """Malformed rule configuration; raised at load time, never per request."""


# numeral + explicit time unit; bare "s" is excluded on purpose ("80s synthwave")
_DURATION = re.compile(
    r"(?<![\w.])(\d+(?:\.\d+)?)[\s-]*(seconds?|secs?|sec|minutes?|mins?|min)\b",
    re.IGNORECASE,
)

# a clearly delimited verbatim lyric block, e.g. `... lyrics: "we built this"`
_VERBATIM_LYRICS = re.compile(r"lyrics\s*:\s*\"([^\"]{1,2000})\"", re.IGNORECASE)

_CATEGORY_ORDER = (
    ModerationCategory.COPYRIGHT,
    ModerationCategory.CULTURAL,
    ModerationCategory.EXPLICIT,
)


def _term_pattern(terms: tuple[str, ...]) -> re.Pattern | None:
    if not terms:
        return None
    alternatives = "|".join(re.escape(t) for t in sorted(terms, key=len, reverse=True))
    return re.compile(rf"\b(?:{alternatives})\b", re.IGNORECASE)


@dataclass(frozen=True)
class RuleConfig:
    version: str
    deny: dict[ModerationCategory, tuple[str, ...]]
    vocal_positive: tuple[str, ...]
    vocal_negative: tuple[str, ...]
    digest: str

    @classmethod
    def from_text(cls, text: str) -> "RuleConfig":
        try:
            raw = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise GateConfigError(f"rule config is not valid YAML: {exc}") from exc
        if not isinstance(raw, dict):
            raise GateConfigError("rule config must be a mapping")
        try:
            version = str(raw["version"])
            deny_raw = raw["deny"]
            cues = raw["vocal_cues"]
            deny = {}
            for cat in ModerationCategory:
                terms = deny_raw.get(cat.value.lower(), [])
                deny[cat] = tuple(str(t).strip().lower() for t in terms)
            positive = tuple(str(t).strip().lower() for t in cues["positive"])
            negative = tuple(str(t).strip().lower() for t in cues["negative"])
        except (KeyError, TypeError, AttributeError) as exc:
            raise GateConfigError(f"rule config missing required section: {exc}") from exc
        if not positive:
            raise GateConfigError("vocal_cues.positive must be non-empty")
        return cls(
            version=version,
            deny=deny,
            vocal_positive=positive,
            vocal_negative=negative,
            digest=digest128_hex(text),
        )

    @classmethod
    def load(cls, path: str | Path) -> "RuleConfig":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def default(cls) -> "RuleConfig":
        text = resources.files("tunearena.gate").joinpath("default_rules.yaml").read_text()
        return cls.from_text(text)


def parse_duration_seconds(text: str) -> float | None:
    """Extract an explicitly stated duration, or None.

    Never invents one: only a numeral followed by a time unit counts.
    """
    m = _DURATION.search(text)
    if m is None:
        return None
    value = float(m.group(1))
    unit = m.group(2).lower()
    if unit.startswith("min"):
        value *= 60.0
    return value


def infer_instrumental(text: str, rules: RuleConfig) -> bool:
    """Vocals implied => False; explicit negation cues win over positives."""
    negative = _term_pattern(rules.vocal_negative)
    if negative is not None and negative.search(text):
        return True
    positive = _term_pattern(rules.vocal_positive)
    return not (positive is not None and positive.search(text))


def extract_verbatim_lyrics(text: str) -> str | None:
    m = _VERBATIM_LYRICS.search(text)
    return m.group(1) if m else None


def moderate(text: str, rules: RuleConfig) -> ModerationVerdict:
    for category in _CATEGORY_ORDER:
        pattern = _term_pattern(rules.deny[category])
        if pattern is None:
            continue
        m = pattern.search(text)
        if m:
            return ModerationVerdict(
                accepted=False,
                category=category,
                reason=f"prompt matches the {category.value.lower()} deny-list: {m.group(0)!r}",
            )
    return ModerationVerdict(accepted=True)


def rule_analyze(prompt: Prompt, rules: RuleConfig) -> GateResult:
    text = prompt.prompt
    verdict = moderate(text, rules)
    if not verdict.accepted:
        return GateResult(verdict=verdict)
    instrumental = infer_instrumental(text, rules)
    lyrics = None if instrumental else extract_verbatim_lyrics(text)
    return GateResult(
        verdict=verdict,
        detailed=DetailedPrompt(
            overall_prompt=text,
            instrumental=instrumental,
            lyrics=lyrics,
            duration=parse_duration_seconds(text),
        ),
    )


_STOPWORDS = frozenset(
    "a an and the with of for in on to about called over under this that "
    "my your our их some any".split()
)


def scaffold_lyrics(text: str) -> str:
    """Deterministic verse/chorus expansion of the prompt's content words."""
    words = [w.lower() for w in re.findall(r"[a-zA-Z][a-zA-Z'-]*", text)]
    theme_words = [w for w in words if w not in _STOPWORDS][:6] or ["music"]
    theme = " ".join(theme_words)
    hook = " ".join(theme_words[:3]) or "music"
    return (
        f"[Verse 1]\nWe gather where the {hook} plays\n"
        f"Chasing {theme} through the haze\n"
        f"Every beat a borrowed line\nEvery echo yours and mine\n"
        f"[Chorus]\nSing it out, {hook}\nLet the speakers overflow\n"
        f"Sing it out, {hook}\nTake us where the {theme_words[0]} goes\n"
        f"[Verse 2]\nDaylight fades, the chords remain\n"
        f"{theme.capitalize()} humming through the rain\n"
        f"Hold the note and hold it long\nWe are verses in one song\n"
        f"[Outro]\nSing it out, {hook}\nOne more time before we go"
    )


class RuleAnalyzer:
    """AnalyzerBackend over a loaded rule configuration."""

    def __init__(self, rules: RuleConfig | None = None):
        self.rules = rules or RuleConfig.default()

    @property
    def config_digest(self) -> str:
        return self.rules.digest

    async def analyze(self, prompt: Prompt) -> GateResult:
        return rule_analyze(prompt, self.rules)

    async def write_lyrics(self, prompt: Prompt) -> str:
        return scaffold_lyrics(prompt.prompt)
