"""Bradley-Terry scores, bootstrap intervals, and leaderboard emission."""

from tunearena.leaderboard.outcomes import OutcomeMatrix, build_outcomes
from tunearena.leaderboard.bt import BTFit, arena_score, fit_bradley_terry, fit_strengths
from tunearena.leaderboard.bootstrap import CIResult, bootstrap_ci
from tunearena.leaderboard.report import (
    LeaderboardEntry,
    SCATTER_COLUMNS,
    TABLE_COLUMNS,
    build_entries,
    emit_leaderboard,
    rtf,
)

__all__ = [
    "BTFit",
    "CIResult",
    "LeaderboardEntry",
    "OutcomeMatrix",
    "SCATTER_COLUMNS",
    "TABLE_COLUMNS",
    "arena_score",
    "bootstrap_ci",
    "build_entries",
    "build_outcomes",
    "emit_leaderboard",
    "fit_bradley_terry",
    "fit_strengths",
    "rtf",
]
