"""Smith-Waterman local alignment between phoneme sequences.

The canonical sequence (mapped from the transcript) is aligned against the
recognized sequence; the raw alignment score is normalized by the best
score the canonical sequence could achieve, giving a similarity in [0, 1]
where 1.0 means every canonical phoneme was matched contiguously.

Token equality is exact symbol equality. A substitution-cost hook can
replace the match/mismatch scoring for experiments with phonetic-distance
matrices; it is off by default.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .phonemes import EmptyCanonical

# Gap marker inside aligned_pairs: the other side consumed a token with no
# counterpart on this side.
GAP = None

SubstitutionFn = Callable[[str, str], float]


@dataclass(frozen=True)
class ScoringScheme:
    """Classic linear-gap scoring; defaults are the usual (+2, -1, -1)."""

    match_reward: float = 2.0
    mismatch_penalty: float = -1.0
    gap_penalty: float = -1.0

    def __post_init__(self):
        if not self.match_reward > 0:
            raise ValueError("match_reward must be > 0")
        if self.mismatch_penalty > 0:
            raise ValueError("mismatch_penalty must be <= 0")
        if self.gap_penalty > 0:
            raise ValueError("gap_penalty must be <= 0")

    def pair_score(self, a: str, b: str, substitution: SubstitutionFn | None = None) -> float:
        if substitution is not None:
            return substitution(a, b)
        return self.match_reward if a == b else self.mismatch_penalty


@dataclass(frozen=True)
class AlignmentResult:
    """Optimal local alignment: its score, traceback pairs, and spans.

    ``aligned_pairs`` holds ``(canonical_index, recognized_index)`` tuples
    where either side may be :data:`GAP`. Spans are half-open index ranges
    covered on each side, or ``None`` for an empty alignment.
    """

    score: float
    aligned_pairs: tuple[tuple[int | None, int | None], ...] = ()
    canonical_span: tuple[int, int] | None = None
    recognized_span: tuple[int, int] | None = None


_DIAG, _UP, _LEFT, _STOP = 1, 2, 3, 0


def smith_waterman(
    a: Sequence[str],
    b: Sequence[str],
    scheme: ScoringScheme = ScoringScheme(),
    substitution: SubstitutionFn | None = None,
) -> AlignmentResult:
    """Best local alignment of ``a`` (canonical) against ``b`` (recognized).

    Standard recurrence ``H[i][j] = max(0, diag + s, up + gap, left + gap)``
    with one deterministic traceback: cell ties prefer diagonal, then up
    (gap in ``b``), then left (gap in ``a``); among equal-scoring end cells
    the smallest ``(i, j)`` wins. Either side empty yields score 0.
    """
    m, n = len(a), len(b)
    if m == 0 or n == 0:
        return AlignmentResult(score=0.0)

    h = [[0.0] * (n + 1) for _ in range(m + 1)]
    move = [[_STOP] * (n + 1) for _ in range(m + 1)]
    best, best_i, best_j = 0.0, 0, 0
    for i in range(1, m + 1):
        row = h[i]
        prev = h[i - 1]
        for j in range(1, n + 1):
            diag = prev[j - 1] + scheme.pair_score(a[i - 1], b[j - 1], substitution)
            up = prev[j] + scheme.gap_penalty
            left = row[j - 1] + scheme.gap_penalty
            score = max(0.0, diag, up, left)
            row[j] = score
            if score <= 0.0:
                move[i][j] = _STOP
            elif score == diag:
                move[i][j] = _DIAG
            elif score == up:
                move[i][j] = _UP
            else:
                move[i][j] = _LEFT
            if score > best:
                best, best_i, best_j = score, i, j

    if best <= 0.0:
        return AlignmentResult(score=0.0)

    pairs: list[tuple[int | None, int | None]] = []
    i, j = best_i, best_j
    while move[i][j] != _STOP:
        step = move[i][j]
        if step == _DIAG:
            pairs.append((i - 1, j - 1))
            i, j = i - 1, j - 1
        elif step == _UP:
            pairs.append((i - 1, GAP))
            i -= 1
        else:
            pairs.append((GAP, j - 1))
            j -= 1
    pairs.reverse()
    a_indices = [p for p, _ in pairs if p is not None]
    b_indices = [q for _, q in pairs if q is not None]
    return AlignmentResult(
        score=best,
        aligned_pairs=tuple(pairs),
        canonical_span=(a_indices[0], a_indices[-1] + 1) if a_indices else None,
        recognized_span=(b_indices[0], b_indices[-1] + 1) if b_indices else None,
    )


def match_similarity(
    canonical: Sequence[str],
    recognized: Sequence[str],
    scheme: ScoringScheme = ScoringScheme(),
    substitution: SubstitutionFn | None = None,
) -> float:
    """Normalized local-alignment similarity in [0, 1].

    The raw score divides by ``match_reward * len(canonical)``, the score of
    a perfect contiguous match, so 1.0 means the canonical sequence appears
    intact inside the recognized one. Raises :class:`EmptyCanonical` when
    the canonical side is empty; an empty recognized side scores 0.0.
    """
    if len(canonical) == 0:
        raise EmptyCanonical("cannot score against an empty canonical sequence")
    result = smith_waterman(canonical, recognized, scheme, substitution)
    value = result.score / (scheme.match_reward * len(canonical))
    return min(1.0, max(0.0, value))
