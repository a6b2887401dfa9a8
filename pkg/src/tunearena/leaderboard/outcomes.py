"""Aggregation of voted battles into pairwise outcome counts."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from tunearena.domain.types import BattleRecord, Preference, SystemKey


@dataclass
class OutcomeMatrix:
    """Pairwise outcome counts over an ordered system list.

    ``wins[i][j]`` counts battles i beat j. ``ties`` pools TIE and BOTH_BAD
    (symmetric); BOTH_BAD is additionally tracked on its own as a quality
    signal. Ties count as half a win for each side in the likelihood.
    """

    systems: tuple[SystemKey, ...]
    wins: np.ndarray
    ties: np.ndarray
    both_bad: np.ndarray
    index: dict[SystemKey, int] = field(init=False)

    def __post_init__(self) -> None:
        self.index = {key: i for i, key in enumerate(self.systems)}

    @property
    def n(self) -> int:
        return len(self.systems)

    def effective_wins(self) -> np.ndarray:
        return self.wins + 0.5 * self.ties

    def comparisons(self) -> np.ndarray:
        """n_ij: total battles between i and j, any outcome."""
        return self.wins + self.wins.T + self.ties

    def votes_for(self, key: SystemKey) -> int:
        i = self.index[key]
        return int(self.wins[i, :].sum() + self.wins[:, i].sum() + self.ties[i, :].sum())

    def both_bad_count(self, key: SystemKey) -> int:
        return int(self.both_bad[self.index[key], :].sum())

    def total_battles(self) -> int:
        return int(self.wins.sum() + self.ties.sum() / 2)


def build_outcomes(records: Iterable[BattleRecord]) -> tuple[OutcomeMatrix, int]:
    """Count outcomes from voted records; returns (matrix, skipped_unvoted)."""
    triples: list[tuple[SystemKey, SystemKey, Preference]] = []
    skipped = 0
    for record in records:
        if record.vote is None:
            skipped += 1
            continue
        triples.append(
            (record.a_metadata.system_key, record.b_metadata.system_key, record.vote.preference)
        )

    keys = sorted(
        {k for a, b, _ in triples for k in (a, b)}, key=lambda k: (k.system_tag, k.variant_tag)
    )
    index = {key: i for i, key in enumerate(keys)}
    n = len(keys)
    wins = np.zeros((n, n))
    ties = np.zeros((n, n))
    both_bad = np.zeros((n, n))
    for a, b, preference in triples:
        i, j = index[a], index[b]
        if preference is Preference.A:
            wins[i, j] += 1
        elif preference is Preference.B:
            wins[j, i] += 1
        else:
            ties[i, j] += 1
            ties[j, i] += 1
            if preference is Preference.BOTH_BAD:
                both_bad[i, j] += 1
                both_bad[j, i] += 1
    return OutcomeMatrix(systems=tuple(keys), wins=wins, ties=ties, both_bad=both_bad), skipped
