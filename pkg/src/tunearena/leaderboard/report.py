"""Leaderboard entries, table/scatter emission, and the speed metric."""

from __future__ import annotations

import statistics
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Optional

from tunearena.domain.types import BattleRecord, SystemKey
from tunearena.endpoints.descriptor import SystemDescriptor
from tunearena.leaderboard.bootstrap import bootstrap_ci
from tunearena.leaderboard.bt import fit_bradley_terry
from tunearena.leaderboard.outcomes import build_outcomes


def rtf(duration: float, generation_span: float) -> float:
    """Real-time factor: seconds of audio per second of generation wall clock.

    The span is system-side (completed minus started) so network transport
    does not penalize API-hosted systems.
    """
    if duration <= 0:
        raise ValueError("duration must be positive")
    if generation_span <= 0:
        raise ValueError("generation span must be positive")
    return duration / generation_span


@dataclass(frozen=True)
class LeaderboardEntry:
    system: SystemKey
    arena_score: float
    ci_low: float
    ci_high: float
    votes: int
    median_rtf: float
    provider: str
    license: str
    training_data_info: str
    access: str
    both_bad_rate: float
    unstable: bool
    component: int

    def __post_init__(self) -> None:
        if not (self.ci_low <= self.arena_score <= self.ci_high):
            raise ValueError("interval must contain the point score")


TABLE_COLUMNS = (
    "system",
    "arena_score",
    "ci_low",
    "ci_high",
    "votes",
    "median_rtf",
    "provider",
    "license",
    "training_data_info",
    "both_bad_rate",
)

SCATTER_COLUMNS = (
    "system",
    "median_rtf",
    "arena_score",
    "license",
    "training_data_info",
    "access",
)


def _median_rtfs(records: Sequence[BattleRecord]) -> dict[SystemKey, float]:
    values: dict[SystemKey, list[float]] = {}
    for record in records:
        if record.vote is None:
            continue
        for metadata in (record.a_metadata, record.b_metadata):
            span = metadata.system_span
            if span > 0 and metadata.duration > 0:
                values.setdefault(metadata.system_key, []).append(
                    rtf(metadata.duration, span)
                )
    return {key: statistics.median(v) for key, v in values.items()}


def build_entries(
    records: Sequence[BattleRecord],
    descriptors: Iterable[SystemDescriptor] | Mapping[SystemKey, SystemDescriptor] = (),
    *,
    n_resamples: int = 1000,
    seed: int = 0,
) -> list[LeaderboardEntry]:
    """Fit scores and intervals over voted records; one entry per system."""
    if isinstance(descriptors, Mapping):
        by_key = dict(descriptors)
    else:
        by_key = {d.key: d for d in descriptors}

    voted = [r for r in records if r.vote is not None]
    matrix, _ = build_outcomes(voted)
    if matrix.n == 0:
        return []
    fit = fit_bradley_terry(matrix)
    scores = fit.scores()
    intervals = bootstrap_ci(voted, n_resamples=n_resamples, seed=seed)
    medians = _median_rtfs(voted)
    component_of = {
        key: i for i, component in enumerate(fit.components) for key in component
    }

    entries = []
    for key in matrix.systems:
        desc: Optional[SystemDescriptor] = by_key.get(key)
        votes = matrix.votes_for(key)
        ci = intervals[key]
        entries.append(
            LeaderboardEntry(
                system=key,
                arena_score=scores[key],
                ci_low=ci.low,
                ci_high=ci.high,
                votes=votes,
                median_rtf=medians.get(key, 0.0),
                provider=desc.provider if desc else "unknown",
                license=desc.license if desc else "unknown",
                training_data_info=desc.training_data_info if desc else "unknown",
                access=desc.access.value if desc else "unknown",
                both_bad_rate=matrix.both_bad_count(key) / votes if votes else 0.0,
                unstable=ci.unstable or key in fit.degenerate,
                component=component_of.get(key, 0),
            )
        )
    return entries


_SORT_KEYS = set(TABLE_COLUMNS)
_FILTER_KEYS = {"provider", "license", "training_data_info", "access", "system"}


def _cell(entry: LeaderboardEntry, column: str):
    if column == "system":
        return entry.system.label()
    return getattr(entry, column)


def emit_leaderboard(
    entries: Sequence[LeaderboardEntry],
    sort_key: str = "arena_score",
    filters: Mapping[str, str] | None = None,
) -> tuple[list[dict], list[dict]]:
    """Rows for the table and the speed-versus-score scatter plot.

    Numeric sort keys order descending (best first); ``system`` ascending.
    """
    if sort_key not in _SORT_KEYS:
        raise ValueError(
            f"unknown sort key {sort_key!r}; valid keys: {', '.join(sorted(_SORT_KEYS))}"
        )
    selected = list(entries)
    for key, value in (filters or {}).items():
        if key not in _FILTER_KEYS:
            raise ValueError(
                f"unknown filter {key!r}; valid filters: {', '.join(sorted(_FILTER_KEYS))}"
            )
        selected = [e for e in selected if str(_cell(e, key)) == value]

    selected.sort(
        key=lambda e: _cell(e, sort_key), reverse=sort_key != "system"
    )
    table = [{column: _cell(e, column) for column in TABLE_COLUMNS} for e in selected]
    scatter = [{column: _cell(e, column) for column in SCATTER_COLUMNS} for e in selected]
    return table, scatter
