"""Independent oracles used by tests; no dynamic programming anywhere.

The local-alignment oracle enumerates every monotone index pairing between
the two sequences. Each pairing's score is the sum of its pair scores plus
a gap penalty for every unmatched position strictly inside the aligned
span (an optimal local alignment never starts or ends with a gap, so those
need not be enumerated). The maximum over all pairings, floored at zero,
equals the best local-alignment score.
"""

from __future__ import annotations

from itertools import combinations
from typing import Sequence


def local_alignment_best_score(
    a: Sequence[str],
    b: Sequence[str],
    match: float,
    mismatch: float,
    gap: float,
) -> float:
    best = 0.0
    m, n = len(a), len(b)
    for k in range(1, min(m, n) + 1):
        for ia in combinations(range(m), k):
            span_a = ia[-1] - ia[0] + 1 - k
            for ib in combinations(range(n), k):
                score = sum(
                    match if a[p] == b[q] else mismatch for p, q in zip(ia, ib)
                )
                score += gap * (span_a + (ib[-1] - ib[0] + 1 - k))
                if score > best:
                    best = score
    return best


def pearson_oracle(x: Sequence[float], y: Sequence[float]) -> float:
    """Closed-form sample correlation, written independently of the package."""
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    cov = sum((xi - mx) * (yi - my) for xi, yi in zip(x, y))
    vx = sum((xi - mx) ** 2 for xi in x)
    vy = sum((yi - my) ** 2 for yi in y)
    return cov / (vx * vy) ** 0.5
