"""Opponent pair selection.

The shipped sampler is uniform over unordered pairs with an independent fair
coin for side assignment. The interface is the pluggable hook for smarter
strategies (coverage-weighted, uncertainty-driven) later.
"""

from __future__ import annotations

import random
from itertools import combinations
from typing import Protocol, Sequence

from tunearena.domain.types import SystemKey
from tunearena.endpoints.descriptor import SystemDescriptor
from tunearena.errors import NoOpponentsError


class PairSampler(Protocol):
    def sample(
        self, compatible: Sequence[SystemDescriptor], rng: random.Random
    ) -> tuple[SystemDescriptor, SystemDescriptor]:
        """Return the (A, B) descriptors for one battle."""
        ...


class UniformPairSampler:
    def sample(
        self, compatible: Sequence[SystemDescriptor], rng: random.Random
    ) -> tuple[SystemDescriptor, SystemDescriptor]:
        if len(compatible) < 2:
            raise NoOpponentsError(
                f"need at least 2 healthy compatible systems, have {len(compatible)}"
            )
        ordered = sorted(compatible, key=lambda d: d.key.label())
        pairs = list(combinations(ordered, 2))
        first, second = pairs[rng.randrange(len(pairs))]
        if rng.random() < 0.5:
            return first, second
        return second, first


def sample_pair(
    compatible: Sequence[SystemDescriptor], rng: random.Random
) -> tuple[SystemKey, SystemKey]:
    a, b = UniformPairSampler().sample(compatible, rng)
    return a.key, b.key
