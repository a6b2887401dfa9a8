"""Maximum-likelihood strength fitting under the logit pairwise-win model.

The fit uses minorization-maximization updates (Hunter 2004 style): robust,
monotone in likelihood, and free of step-size tuning. Identifiability is
fixed by centering strengths to mean zero within each connected component of
the comparison graph; disconnected components are fitted separately and
flagged rather than silently joined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from tunearena.domain.types import SystemKey
from tunearena.leaderboard.outcomes import OutcomeMatrix

CONVERGENCE_TOL = 1e-8
MAX_ITERATIONS = 10_000

# display transform: 400 points per decade of win odds, anchored at 1000
SCORE_ANCHOR = 1000.0
SCORE_SCALE = 400.0 / math.log(10.0)


def arena_score(beta: float) -> float:
    """Affine display transform; rank order is identical to strength order."""
    return SCORE_ANCHOR + SCORE_SCALE * beta


def _components(active: np.ndarray) -> list[list[int]]:
    n = active.shape[0]
    seen = [False] * n
    out = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        component = [start]
        frontier = [start]
        while frontier:
            node = frontier.pop()
            for nxt in np.nonzero(active[node] | active[:, node])[0]:
                if not seen[nxt]:
                    seen[nxt] = True
                    component.append(int(nxt))
                    frontier.append(int(nxt))
        out.append(sorted(component))
    return out


# strengths are clamped to this band; systems at the likelihood boundary
# (never lost or never won) would otherwise run away until overflow
MAX_ABS_STRENGTH = 30.0


def _fit_component(
    wins: np.ndarray, tol: float, max_iter: int
) -> tuple[np.ndarray, int, bool]:
    """MM iteration on one connected block of effective wins."""
    n = wins.shape[0]
    if n == 1:
        return np.zeros(1), 0, True
    totals = wins + wins.T
    active = totals > 0
    row_wins = wins.sum(axis=1)
    log_p = np.zeros(n)
    for iteration in range(1, max_iter + 1):
        p = np.exp(log_p)
        pairwise = np.zeros_like(wins)
        denom = np.add.outer(p, p)
        pairwise[active] = totals[active] / denom[active]
        p_new = row_wins / np.maximum(pairwise.sum(axis=1), 1e-300)
        new_log = np.log(np.maximum(p_new, 1e-300))
        new_log -= new_log.mean()
        new_log = np.clip(new_log, -MAX_ABS_STRENGTH, MAX_ABS_STRENGTH)
        delta = np.max(np.abs(new_log - log_p))
        log_p = new_log
        if delta < tol:
            return log_p, iteration, True
    return log_p, max_iter, False


@dataclass(frozen=True)
class BTFit:
    systems: tuple[SystemKey, ...]
    beta: dict[SystemKey, float]
    components: tuple[tuple[SystemKey, ...], ...]
    connected: bool
    degenerate: tuple[SystemKey, ...]
    iterations: int
    converged: bool

    def scores(self) -> dict[SystemKey, float]:
        return {key: arena_score(b) for key, b in self.beta.items()}


def fit_strengths(
    wins_eff: np.ndarray, *, tol: float = CONVERGENCE_TOL, max_iter: int = MAX_ITERATIONS
) -> np.ndarray:
    """Strengths for a dense effective-win matrix, centered per component."""
    n = wins_eff.shape[0]
    beta = np.zeros(n)
    for component in _components(wins_eff + wins_eff.T > 0):
        idx = np.ix_(component, component)
        sub_beta, _, _ = _fit_component(wins_eff[idx], tol, max_iter)
        beta[component] = sub_beta
    return beta


def fit_bradley_terry(
    matrix: OutcomeMatrix, *, tol: float = CONVERGENCE_TOL, max_iter: int = MAX_ITERATIONS
) -> BTFit:
    if matrix.n == 0:
        return BTFit(
            systems=(), beta={}, components=(), connected=True, degenerate=(),
            iterations=0, converged=True,
        )
    wins_eff = matrix.effective_wins()
    components = _components(matrix.comparisons() > 0)

    beta = np.zeros(matrix.n)
    iterations = 0
    converged = True
    for component in components:
        idx = np.ix_(component, component)
        sub_beta, sub_iter, sub_ok = _fit_component(wins_eff[idx], tol, max_iter)
        beta[component] = sub_beta
        iterations = max(iterations, sub_iter)
        converged = converged and sub_ok

    # systems that never scored or never conceded sit at the likelihood
    # boundary; their strengths are clamped by iteration count, not finite MLE
    degenerate = [
        matrix.systems[i]
        for i in range(matrix.n)
        if wins_eff[i, :].sum() == 0 or wins_eff[:, i].sum() == 0
    ]
    return BTFit(
        systems=matrix.systems,
        beta={key: float(beta[i]) for i, key in enumerate(matrix.systems)},
        components=tuple(tuple(matrix.systems[i] for i in c) for c in components),
        connected=len(components) <= 1,
        degenerate=tuple(degenerate),
        iterations=iterations,
        converged=converged,
    )
