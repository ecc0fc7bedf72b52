"""Cue bundles: the per-utterance record every other module consumes.

A bundle carries the transcript, the recognized IPA and CMU sequences (the
CMU side may embed pause annotations), and optionally a precomputed
canonical IPA sequence and a prosody annotation. Bundles serialize as one
JSON object per JSONL line; the schema ships as package data and is the
shared contract with external cue extractors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterator

import jsonschema

from .phonemes import (
    CmuSequence,
    IpaSequence,
    parse_cmu_with_pauses,
    render_cmu_with_pauses,
    tokenize_ipa,
)

_TONE_ALPHABET = set("HL*%+-")


class BundleError(ValueError):
    """A manifest line that does not describe a valid cue bundle."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


@dataclass(frozen=True)
class TobiEvent:
    word: str
    break_index: int
    tone: str | None = None

    def __post_init__(self):
        if self.break_index not in (0, 1, 2, 3, 4):
            raise ValueError(f"break index must be 0-4, got {self.break_index}")
        if self.tone is not None and (
            not self.tone or not set(self.tone) <= _TONE_ALPHABET
        ):
            raise ValueError(f"bad tone label: {self.tone!r}")


@dataclass(frozen=True)
class TobiAnnotation:
    events: tuple[TobiEvent, ...] = ()


@dataclass(frozen=True)
class CueBundle:
    utt_id: str
    transcript: str
    ipa_recognized: IpaSequence = IpaSequence()
    cmu_recognized: CmuSequence = CmuSequence()
    canonical_ipa: IpaSequence | None = None
    tobi: TobiAnnotation | None = None
    unintelligible: bool = False
    source_meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.utt_id:
            raise ValueError("utt_id must be non-empty")
        if not self.transcript and not self.unintelligible:
            raise ValueError(
                f"{self.utt_id}: empty transcript requires the unintelligible flag"
            )

    def has_cue(self, cue: str) -> bool:
        if cue in ("transcript", "ipa", "cmu"):
            return True
        if cue == "tobi":
            return self.tobi is not None
        raise ValueError(f"unknown cue name: {cue!r}")


def bundle_schema() -> dict[str, Any]:
    ref = resources.files("phonoscore.data").joinpath("cue_bundle.schema.json")
    return json.loads(ref.read_text(encoding="utf-8"))


def bundle_to_record(bundle: CueBundle) -> dict[str, Any]:
    """JSON-serializable record; inverse of :func:`bundle_from_record`."""
    record: dict[str, Any] = {
        "utt_id": bundle.utt_id,
        "transcript": bundle.transcript,
        "ipa": bundle.ipa_recognized.render(),
        "cmu": render_cmu_with_pauses(bundle.cmu_recognized),
    }
    if bundle.canonical_ipa is not None:
        record["canonical_ipa"] = bundle.canonical_ipa.render()
    if bundle.tobi is not None:
        record["tobi"] = [
            {"word": e.word, "break_index": e.break_index}
            | ({"tone": e.tone} if e.tone is not None else {})
            for e in bundle.tobi.events
        ]
    if bundle.unintelligible:
        record["unintelligible"] = True
    if bundle.source_meta:
        record["source_meta"] = bundle.source_meta
    return record


def bundle_from_record(record: dict[str, Any], line_number: int | None = None) -> CueBundle:
    try:
        tobi = None
        if record.get("tobi") is not None:
            tobi = TobiAnnotation(
                tuple(
                    TobiEvent(e["word"], e["break_index"], e.get("tone"))
                    for e in record["tobi"]
                )
            )
        canonical = None
        if record.get("canonical_ipa") is not None:
            canonical = tokenize_ipa(record["canonical_ipa"], mode="space_separated")
        return CueBundle(
            utt_id=record["utt_id"],
            transcript=record["transcript"],
            ipa_recognized=tokenize_ipa(record["ipa"], mode="space_separated"),
            cmu_recognized=parse_cmu_with_pauses(record["cmu"]),
            canonical_ipa=canonical,
            tobi=tobi,
            unintelligible=bool(record.get("unintelligible", False)),
            source_meta=dict(record.get("source_meta", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise BundleError(str(exc), line_number) from exc


def read_manifest(path: str | Path) -> list[CueBundle]:
    """Parse a cue-bundle JSONL manifest; utt_ids must be unique."""
    bundles: list[CueBundle] = []
    seen: set[str] = set()
    for line_number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise BundleError(f"invalid JSON: {exc}", line_number) from exc
        bundle = bundle_from_record(record, line_number)
        if bundle.utt_id in seen:
            raise BundleError(f"duplicate utt_id {bundle.utt_id!r}", line_number)
        seen.add(bundle.utt_id)
        bundles.append(bundle)
    return bundles


def write_manifest(bundles: list[CueBundle], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for bundle in bundles:
            fh.write(json.dumps(bundle_to_record(bundle), ensure_ascii=False) + "\n")


def validate_manifest(path: str | Path) -> Iterator[tuple[int, str]]:
    """Yield (line_number, problem) pairs for lines violating the schema."""
    schema = bundle_schema()
    validator = jsonschema.Draft202012Validator(schema)
    seen: set[str] = set()
    for line_number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            yield line_number, f"invalid JSON: {exc}"
            continue
        for error in validator.iter_errors(record):
            yield line_number, error.message
        utt_id = record.get("utt_id")
        if isinstance(utt_id, str):
            if utt_id in seen:
                yield line_number, f"duplicate utt_id {utt_id!r}"
            seen.add(utt_id)
