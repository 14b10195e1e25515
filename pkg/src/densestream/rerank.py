"""Diversity-aware ordering of reported stories.

Greedy selection: at each step pick the story maximizing
density * (1 - penalty * coverage), where coverage is the fraction of the
story's entities already covered by earlier picks.  Ties break toward the
lexicographically smallest vertex set, so the order is deterministic.
"""

from __future__ import annotations

from typing import Iterable


def rerank_diverse(stories: Iterable[tuple[Iterable[int], float]],
                   penalty: float = 0.8,
                   limit: int | None = None) -> list[tuple[tuple[int, ...], float, float]]:
    """Returns (vertices, density, adjusted score) in pick order."""
    if not 0.0 <= penalty <= 1.0:
        raise ValueError("penalty must lie in [0, 1]")
    pool = [(tuple(sorted(set(vs))), float(d)) for vs, d in stories]
    for vs, d in pool:
        if d < 0:
            raise ValueError("story densities must be non-negative")
    covered: set[int] = set()
    picked: list[tuple[tuple[int, ...], float, float]] = []
    while pool and (limit is None or len(picked) < limit):
        best_i = -1
        best_adj = 0.0
        for i, (vs, d) in enumerate(pool):
            overlap = sum(1 for v in vs if v in covered)
            adj = d * (1.0 - penalty * overlap / len(vs))
            if (best_i < 0 or adj > best_adj
                    or (adj == best_adj and vs < pool[best_i][0])):
                best_i, best_adj = i, adj
        vs, d = pool.pop(best_i)
        picked.append((vs, d, best_adj))
        covered.update(vs)
    return picked
