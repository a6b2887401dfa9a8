"""Independent oracles for rating math, deliberately unlike the shipped code.

The brute-force MLE here searches the likelihood surface on a shrinking grid,
sharing no code path with the iterative fitter it checks.
"""

from __future__ import annotations

import numpy as np


def bt_log_likelihood(points: np.ndarray, wins: np.ndarray) -> np.ndarray:
    """Log-likelihood of strength vectors under the logit win model.

    points: (m, n) candidate strength vectors; wins: (n, n) effective win
    counts (ties already folded in as half wins). Returns (m,) values.
    """
    m = points.shape[0]
    ll = np.zeros(m)
    n = wins.shape[0]
    for i in range(n):
        for j in range(n):
            if i == j or wins[i, j] == 0:
                continue
            diff = points[:, i] - points[:, j]
            ll += wins[i, j] * (-np.logaddexp(0.0, -diff))
    return ll


def grid_search_mle(
    wins: np.ndarray, *, span: float = 12.0, grid: int = 9, rounds: int = 22
) -> np.ndarray:
    """Zooming grid search for the maximum-likelihood strengths.

    Fixes the first coordinate at zero for identifiability, then recenters
    the result to mean zero. Resolution after the final round is far below
    the 1e-3 comparison tolerance.
    """
    n = wins.shape[0]
    if n == 1:
        return np.zeros(1)
    free = n - 1
    centers = np.zeros(free)
    half = span
    for _ in range(rounds):
        axes = [np.linspace(c - half, c + half, grid) for c in centers]
        mesh = np.meshgrid(*axes, indexing="ij")
        candidates = np.stack([m.ravel() for m in mesh], axis=1)
        points = np.concatenate([np.zeros((candidates.shape[0], 1)), candidates], axis=1)
        best = int(np.argmax(bt_log_likelihood(points, wins)))
        centers = candidates[best]
        half *= 1.5 / (grid - 1) * 2  # keep a bit more than one cell each side
    beta = np.concatenate([[0.0], centers])
    return beta - beta.mean()


def random_outcome_matrix(
    rng: np.random.Generator, *, max_systems: int = 4, max_battles: int = 20
) -> tuple[np.ndarray, np.ndarray]:
    """Random (wins, ties) over 2..max_systems systems and 1..max_battles battles."""
    n = int(rng.integers(2, max_systems + 1))
    battles = int(rng.integers(1, max_battles + 1))
    wins = np.zeros((n, n))
    ties = np.zeros((n, n))
    for _ in range(battles):
        i, j = rng.choice(n, size=2, replace=False)
        r = rng.random()
        if r < 0.4:
            wins[i, j] += 1
        elif r < 0.8:
            wins[j, i] += 1
        else:
            ties[i, j] += 1
            ties[j, i] += 1
    return wins, ties


def has_finite_mle(wins_eff: np.ndarray) -> bool:
    """Ford's condition: the effective-win digraph must be strongly connected."""
    n = wins_eff.shape[0]
    adj = wins_eff > 0

    def reachable(start: int, graph: np.ndarray) -> set[int]:
        seen = {start}
        frontier = [start]
        while frontier:
            node = frontier.pop()
            for nxt in np.nonzero(graph[node])[0]:
                if nxt not in seen:
                    seen.add(int(nxt))
                    frontier.append(int(nxt))
        return seen

    return len(reachable(0, adj)) == n and len(reachable(0, adj.T)) == n
