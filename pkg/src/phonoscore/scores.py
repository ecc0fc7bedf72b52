"""Score-table transforms: min-max normalization, refinement, and fusion.

All transforms are pure functions over immutable tables. Normalization is
computed across the utterance set of the run being evaluated; a degenerate
(constant) table maps to 0.5 everywhere so downstream averaging stays
defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

DIMENSIONS = ("accuracy", "fluency", "prosody")


class EmptyTable(ValueError):
    pass


class IdMismatch(ValueError):
    def __init__(self, only_left: set[str], only_right: set[str]):
        super().__init__(
            f"utterance sets differ: only-left={sorted(only_left)} only-right={sorted(only_right)}"
        )
        self.only_left = only_left
        self.only_right = only_right


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class ScoreTable:
    """Per-utterance scores for one dimension."""

    dimension: str
    entries: Mapping[str, float]
    scale_note: str = ""

    def __post_init__(self):
        if self.dimension not in DIMENSIONS:
            raise ValueError(f"unknown dimension: {self.dimension!r}")
        entries = dict(self.entries)
        for utt_id, value in entries.items():
            if not math.isfinite(value):
                raise ValueError(f"non-finite score for {utt_id!r}: {value}")
        object.__setattr__(self, "entries", MappingProxyType(entries))

    def ids(self) -> set[str]:
        return set(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def min_max_normalize(table: ScoreTable) -> ScoreTable:
    """Affine rescale to [0, 1]; a constant table maps to 0.5 everywhere."""
    if len(table) == 0:
        raise EmptyTable(f"cannot normalize an empty {table.dimension} table")
    lo = min(table.entries.values())
    hi = max(table.entries.values())
    if hi == lo:
        entries = {u: 0.5 for u in table.entries}
        note = "minmax degenerate (constant input -> 0.5)"
    else:
        entries = {u: (v - lo) / (hi - lo) for u, v in table.entries.items()}
        note = f"minmax over n={len(table)}"
    return ScoreTable(table.dimension, entries, scale_note=note)


def refine_accuracy(llm_scores: ScoreTable, match_scores: ScoreTable) -> ScoreTable:
    """Average the normalized LLM accuracy with the normalized match score.

    Utterances absent from ``match_scores`` (no canonical sequence could be
    built upstream) fall back to their normalized LLM score alone; the
    fallback count is flagged in ``scale_note``. Match entries for unknown
    utterances raise :class:`IdMismatch`.
    """
    extra = match_scores.ids() - llm_scores.ids()
    if extra:
        raise IdMismatch(set(), extra)
    norm_llm = min_max_normalize(llm_scores)
    norm_match = min_max_normalize(match_scores) if len(match_scores) else match_scores
    entries = {}
    fallbacks = 0
    for utt_id, llm_value in norm_llm.entries.items():
        if utt_id in norm_match.entries:
            entries[utt_id] = 0.5 * (llm_value + norm_match.entries[utt_id])
        else:
            entries[utt_id] = llm_value
            fallbacks += 1
    note = "avg(normalized llm, normalized match)"
    if fallbacks:
        note += f"; {fallbacks} without match score (llm only)"
    return ScoreTable("accuracy", entries, scale_note=note)


def fuse_models(a: ScoreTable, b: ScoreTable) -> ScoreTable:
    """Normalize each table independently, then average per utterance."""
    if a.dimension != b.dimension:
        raise DimensionMismatch(f"{a.dimension} vs {b.dimension}")
    if a.ids() != b.ids():
        raise IdMismatch(a.ids() - b.ids(), b.ids() - a.ids())
    norm_a = min_max_normalize(a)
    norm_b = min_max_normalize(b)
    entries = {
        utt_id: 0.5 * (norm_a.entries[utt_id] + norm_b.entries[utt_id])
        for utt_id in norm_a.entries
    }
    return ScoreTable(a.dimension, entries, scale_note="fused avg of two normalized models")
