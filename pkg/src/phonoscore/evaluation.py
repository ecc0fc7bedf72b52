"""Evaluation against human labels and reasoning-annotation tallies.

Predictions are compared to sentence-level labels with the Pearson
correlation coefficient, computed over the utterance intersection;
utterances missing on either side are counted and reported, never silently
dropped. Reasoning annotations tally token coverage per category.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .scores import ScoreTable

REASONING_CATEGORIES = ("hallucination", "correct", "constructive", "irrelevant")


class LengthMismatch(ValueError):
    pass


class ZeroVariance(ValueError):
    def __init__(self, side: str):
        super().__init__(f"{side} values are constant; correlation is undefined")
        self.side = side


class EmptyAnnotations(ValueError):
    pass


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient of two equal-length vectors."""
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y, dtype=float)
    if xv.ndim != 1 or yv.ndim != 1 or xv.shape != yv.shape:
        raise LengthMismatch(f"shapes {xv.shape} vs {yv.shape}")
    if xv.size < 2:
        raise LengthMismatch("need at least 2 points")
    dx = xv - xv.mean()
    dy = yv - yv.mean()
    sx = float(np.dot(dx, dx))
    sy = float(np.dot(dy, dy))
    if sx == 0.0:
        raise ZeroVariance("x")
    if sy == 0.0:
        raise ZeroVariance("y")
    return float(np.dot(dx, dy) / np.sqrt(sx * sy))


@dataclass(frozen=True)
class LabelSet:
    """Human sentence-level scores keyed by utterance id."""

    entries: Mapping[str, dict[str, float]]
    scale: str = "unspecified"

    def values_for(self, dimension: str) -> dict[str, float]:
        return {
            utt_id: scores[dimension]
            for utt_id, scores in self.entries.items()
            if dimension in scores
        }


def load_labels(path: str | Path, scale: str = "unspecified") -> LabelSet:
    """Read a labels JSONL file of ``{utt_id, accuracy?, fluency?, prosody?}``."""
    entries: dict[str, dict[str, float]] = {}
    for line_number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        record = json.loads(line)
        utt_id = record["utt_id"]
        scores = {
            dim: float(record[dim])
            for dim in ("accuracy", "fluency", "prosody")
            if record.get(dim) is not None
        }
        if not scores:
            raise ValueError(f"line {line_number}: no scores for {utt_id!r}")
        entries[utt_id] = scores
    return LabelSet(entries, scale=scale)


@dataclass(frozen=True)
class DimensionEval:
    table_name: str
    pcc: float | None
    n: int
    missing_predictions: int
    missing_labels: int
    error: str | None = None


@dataclass(frozen=True)
class EvalReport:
    config_id: str
    dimensions: dict[str, DimensionEval] = field(default_factory=dict)
    label_scale: str = "unspecified"
    coverage: dict[str, dict[str, float]] | None = None

    def to_record(self) -> dict:
        return {
            "config_id": self.config_id,
            "label_scale": self.label_scale,
            "dimensions": {
                dim: {
                    "table": d.table_name,
                    "pcc": d.pcc,
                    "n": d.n,
                    "missing_predictions": d.missing_predictions,
                    "missing_labels": d.missing_labels,
                    "error": d.error,
                }
                for dim, d in self.dimensions.items()
            },
            **({"coverage": self.coverage} if self.coverage is not None else {}),
        }

    def to_text(self) -> str:
        header = f"{'dimension':<10} {'table':<26} {'pcc':>8} {'n':>4} {'miss_pred':>9} {'miss_label':>10}"
        lines = [header, "-" * len(header)]
        for dim, d in self.dimensions.items():
            pcc = f"{d.pcc:.4f}" if d.pcc is not None else (d.error or "n/a")
            lines.append(
                f"{dim:<10} {d.table_name:<26} {pcc:>8} {d.n:>4} {d.missing_predictions:>9} {d.missing_labels:>10}"
            )
        return "\n".join(lines)


def evaluate_run(
    predictions: Mapping[str, ScoreTable],
    labels: LabelSet,
    config_id: str = "",
    table_names: Mapping[str, str] | None = None,
) -> EvalReport:
    """Per-dimension PCC between prediction tables and labels.

    ``predictions`` maps dimension name to the table to evaluate. The PCC
    for each dimension uses the intersection of utterance ids; a
    ZeroVariance failure is surfaced in the report instead of aborting the
    whole evaluation.
    """
    table_names = dict(table_names or {})
    dims: dict[str, DimensionEval] = {}
    for dim, table in predictions.items():
        label_values = labels.values_for(dim)
        shared = sorted(table.ids() & set(label_values))
        missing_labels = len(table.ids() - set(label_values))
        missing_predictions = len(set(label_values) - table.ids())
        pcc: float | None = None
        error: str | None = None
        if len(shared) < 2:
            error = f"only {len(shared)} shared utterances"
        else:
            x = [table.entries[u] for u in shared]
            y = [label_values[u] for u in shared]
            try:
                pcc = max(-1.0, min(1.0, pearson(x, y)))
            except (ZeroVariance, LengthMismatch) as exc:
                error = str(exc)
        dims[dim] = DimensionEval(
            table_name=table_names.get(dim, dim),
            pcc=pcc,
            n=len(shared),
            missing_predictions=missing_predictions,
            missing_labels=missing_labels,
            error=error,
        )
    return EvalReport(config_id=config_id, dimensions=dims, label_scale=labels.scale)


@dataclass(frozen=True)
class ReasoningAnnotation:
    """Manual annotation of one reasoning text, split into category spans."""

    utt_id: str
    dimension: str
    spans: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if self.dimension not in ("accuracy", "fluency"):
            raise ValueError(f"dimension must be accuracy or fluency: {self.dimension!r}")
        for category, token_count in self.spans:
            if category not in REASONING_CATEGORIES:
                raise ValueError(f"unknown category {category!r}")
            if token_count < 0:
                raise ValueError("token counts must be >= 0")


def load_annotations(path: str | Path) -> list[ReasoningAnnotation]:
    annotations = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        record = json.loads(line)
        annotations.append(
            ReasoningAnnotation(
                utt_id=record["utt_id"],
                dimension=record["dimension"],
                spans=tuple(
                    (span["category"], int(span["token_count"]))
                    for span in record["spans"]
                ),
            )
        )
    return annotations


def reasoning_coverage(
    annotations: Sequence[ReasoningAnnotation],
) -> dict[str, dict[str, float]]:
    """Per-dimension proportion of reasoning tokens in each category.

    Tokens are whatever unit the annotation's token_count used (this
    project counts whitespace-delimited tokens). Dimensions with zero
    total tokens are omitted; proportions sum to 1 per dimension.
    """
    if not annotations:
        raise EmptyAnnotations("no annotations to tally")
    totals: dict[str, dict[str, int]] = {}
    for annotation in annotations:
        per_dim = totals.setdefault(
            annotation.dimension, {c: 0 for c in REASONING_CATEGORIES}
        )
        for category, token_count in annotation.spans:
            per_dim[category] += token_count
    coverage: dict[str, dict[str, float]] = {}
    for dimension, counts in totals.items():
        total = sum(counts.values())
        if total == 0:
            continue
        coverage[dimension] = {c: counts[c] / total for c in REASONING_CATEGORIES}
    return coverage
