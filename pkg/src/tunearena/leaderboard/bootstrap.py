"""Percentile bootstrap confidence intervals for displayed scores."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from tunearena.domain.types import BattleRecord, Preference, SystemKey
from tunearena.leaderboard.bt import arena_score, fit_strengths
from tunearena.leaderboard.outcomes import build_outcomes

MIN_RESAMPLES = 100
# below this many appearances a system's interval is reported but flagged
MIN_VOTES_STABLE = 10


@dataclass(frozen=True)
class CIResult:
    low: float
    high: float
    unstable: bool


def bootstrap_ci(
    records: Sequence[BattleRecord],
    n_resamples: int = 1000,
    *,
    seed: int = 0,
    alpha: float = 0.05,
) -> dict[SystemKey, CIResult]:
    """Resample battles with replacement, refit, take percentile bounds.

    Seeded and reproducible. Intervals are widened (if needed) to contain the
    full-data point score, and flagged unstable for thinly-voted systems.
    """
    if n_resamples < MIN_RESAMPLES:
        raise ValueError(f"n_resamples must be at least {MIN_RESAMPLES}")
    voted = [r for r in records if r.vote is not None]
    matrix, _ = build_outcomes(voted)
    if matrix.n == 0:
        return {}
    point_beta = fit_strengths(matrix.effective_wins())
    point_scores = {key: arena_score(point_beta[i]) for i, key in enumerate(matrix.systems)}

    index = matrix.index
    n_sys = matrix.n
    triples = np.array(
        [
            [
                index[r.a_metadata.system_key],
                index[r.b_metadata.system_key],
                0
                if r.vote.preference is Preference.A
                else 1
                if r.vote.preference is Preference.B
                else 2,
            ]
            for r in voted
        ],
        dtype=np.int64,
    )

    rng = np.random.default_rng(seed)
    samples: list[list[float]] = [[] for _ in range(n_sys)]
    for _ in range(n_resamples):
        chosen = triples[rng.integers(0, len(triples), len(triples))]
        wins = np.zeros((n_sys, n_sys))
        a_idx, b_idx, outcome = chosen[:, 0], chosen[:, 1], chosen[:, 2]
        np.add.at(wins, (a_idx[outcome == 0], b_idx[outcome == 0]), 1.0)
        np.add.at(wins, (b_idx[outcome == 1], a_idx[outcome == 1]), 1.0)
        np.add.at(wins, (a_idx[outcome == 2], b_idx[outcome == 2]), 0.5)
        np.add.at(wins, (b_idx[outcome == 2], a_idx[outcome == 2]), 0.5)
        present = (wins.sum(axis=0) + wins.sum(axis=1)) > 0
        beta = fit_strengths(wins)
        for i in range(n_sys):
            if present[i]:
                samples[i].append(arena_score(beta[i]))

    out: dict[SystemKey, CIResult] = {}
    for i, key in enumerate(matrix.systems):
        point = point_scores[key]
        scores = samples[i]
        if scores:
            low = float(np.percentile(scores, 100 * alpha / 2))
            high = float(np.percentile(scores, 100 * (1 - alpha / 2)))
        else:
            low = high = point
        unstable = (
            matrix.votes_for(key) < MIN_VOTES_STABLE
            or len(scores) < 0.8 * n_resamples
        )
        out[key] = CIResult(low=min(low, point), high=max(high, point), unstable=unstable)
    return out
