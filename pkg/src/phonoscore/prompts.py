"""Prompt assembly and structured-response parsing for the scoring LLM.

Prompts are assembled from versioned template files shipped as package
data, so the exact wording is reviewable and pinned by golden tests:
identical (bundle, config) inputs produce byte-identical prompts.
Responses are parsed leniently (the first balanced JSON object found in
the reply, code fences and surrounding prose tolerated) but validated
strictly; every validation failure is one of three enumerated errors so
the client's retry loop can react uniformly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Any

from .bundles import CueBundle, TobiAnnotation
from .phonemes import render_cmu_with_pauses

TEMPLATE_VERSION = "v1"

CUE_ORDER = ("transcript", "ipa", "cmu", "tobi")
DIMENSION_ORDER = ("accuracy", "fluency", "prosody")


class MissingCue(ValueError):
    """The bundle lacks a cue that the configuration selects."""

    def __init__(self, cue: str, utt_id: str):
        super().__init__(f"bundle {utt_id!r} has no {cue!r} cue")
        self.cue = cue


class ResponseFormatError(ValueError):
    """Base for invalid-LLM-response errors; triggers the retry contract."""


class NoJsonFound(ResponseFormatError):
    def __init__(self):
        super().__init__("no JSON object found in response")


class MissingField(ResponseFormatError):
    def __init__(self, name: str):
        super().__init__(f"missing or empty field: {name}")
        self.name = name


class ScoreOutOfRange(ResponseFormatError):
    def __init__(self, name: str, value: Any):
        super().__init__(f"field {name} must be an integer 1-5, got {value!r}")
        self.name = name
        self.value = value


@dataclass(frozen=True)
class PromptConfig:
    """Which cues, guideline style, and score dimensions a prompt requests."""

    cues: tuple[str, ...] = ("transcript", "ipa", "cmu")
    guideline: str = "basic"
    dimensions: tuple[str, ...] = ("accuracy", "fluency")
    detailed_guideline_text: str | None = None
    # Escape hatch: allow requesting a prosody score without a ToBI cue.
    force_prosody: bool = False

    def __post_init__(self):
        cues = tuple(c for c in CUE_ORDER if c in self.cues)
        if set(self.cues) - set(CUE_ORDER):
            raise ValueError(f"unknown cues: {sorted(set(self.cues) - set(CUE_ORDER))}")
        if not cues:
            raise ValueError("at least one cue is required")
        dims = tuple(d for d in DIMENSION_ORDER if d in self.dimensions)
        if set(self.dimensions) - set(DIMENSION_ORDER):
            raise ValueError(
                f"unknown dimensions: {sorted(set(self.dimensions) - set(DIMENSION_ORDER))}"
            )
        if not dims:
            raise ValueError("at least one dimension is required")
        if "prosody" in dims and "tobi" not in cues and not self.force_prosody:
            raise ValueError("prosody requires the tobi cue (or force_prosody)")
        if self.guideline not in ("basic", "detailed"):
            raise ValueError(f"guideline must be basic or detailed, got {self.guideline!r}")
        if (self.guideline == "detailed") != (self.detailed_guideline_text is not None):
            raise ValueError("detailed_guideline_text is required iff guideline='detailed'")
        object.__setattr__(self, "cues", cues)
        object.__setattr__(self, "dimensions", dims)


@dataclass(frozen=True)
class AssessmentResult:
    """Scores and reasoning returned by the LLM for one utterance."""

    utt_id: str
    accuracy: int | None = None
    fluency: int | None = None
    prosody: int | None = None
    reason_accuracy: str | None = None
    reason_fluency: str | None = None
    reason_prosody: str | None = None
    raw_response: str = field(default="", compare=False)

    def score(self, dimension: str) -> int | None:
        return getattr(self, dimension)

    def to_payload(self) -> dict[str, Any]:
        """The ideal response object: exactly the fields that are set."""
        payload: dict[str, Any] = {}
        for dim in DIMENSION_ORDER:
            value = getattr(self, dim)
            if value is not None:
                payload[dim] = value
                payload[f"reason_{dim}"] = getattr(self, f"reason_{dim}")
        return payload


@lru_cache(maxsize=None)
def _template(name: str) -> str:
    ref = resources.files("phonoscore.data").joinpath(
        f"prompts/{TEMPLATE_VERSION}/{name}.txt"
    )
    return ref.read_text(encoding="utf-8").strip()


def tobi_legend() -> str:
    return _template("tobi_legend")


def format_tobi_cue(annotation: TobiAnnotation) -> str:
    """Legend plus one ``word [break=k, tone=T]`` line per event."""
    lines = [tobi_legend()]
    for event in annotation.events:
        if event.tone is not None:
            lines.append(f"{event.word} [break={event.break_index}, tone={event.tone}]")
        else:
            lines.append(f"{event.word} [break={event.break_index}]")
    return "\n".join(lines)


def _fields_spec(dimensions: tuple[str, ...]) -> str:
    parts = [f'"{d}" (integer 1-5)' for d in dimensions]
    parts += [f'"reason_{d}" (string)' for d in dimensions]
    return ", ".join(parts)


def build_prompt(bundle: CueBundle, config: PromptConfig) -> str:
    """Assemble the deterministic assessment prompt for one bundle."""
    for cue in config.cues:
        if not bundle.has_cue(cue):
            raise MissingCue(cue, bundle.utt_id)

    blocks = [_template("preamble")]
    cue_values = {
        "transcript": lambda: bundle.transcript,
        "ipa": lambda: bundle.ipa_recognized.render(),
        "cmu": lambda: render_cmu_with_pauses(bundle.cmu_recognized),
        "tobi": lambda: format_tobi_cue(bundle.tobi),
    }
    for cue in config.cues:
        blocks.append(_template(f"section_{cue}").format(value=cue_values[cue]()))

    if config.guideline == "basic":
        guideline_text = _template("guideline_basic")
    else:
        guideline_text = config.detailed_guideline_text.strip()
    blocks.append(_template("section_guideline").format(value=guideline_text))
    blocks.append(_template("output_format").format(fields=_fields_spec(config.dimensions)))
    return "\n\n".join(blocks) + "\n"


def _iter_json_candidates(raw: str):
    depth = 0
    start = 0
    in_string = False
    escaped = False
    for i, ch in enumerate(raw):
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"' and depth > 0:
            in_string = True
        elif ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}" and depth > 0:
            depth -= 1
            if depth == 0:
                yield raw[start : i + 1]


def _coerce_score(name: str, value: Any) -> int:
    if isinstance(value, bool):
        raise ScoreOutOfRange(name, value)
    if isinstance(value, int):
        score = value
    elif isinstance(value, float) and value.is_integer():
        score = int(value)
    elif isinstance(value, str) and value.strip().isdigit():
        score = int(value.strip())
    else:
        raise ScoreOutOfRange(name, value)
    if not 1 <= score <= 5:
        raise ScoreOutOfRange(name, value)
    return score


def parse_llm_response(raw: str, config: PromptConfig, utt_id: str = "") -> AssessmentResult:
    """Extract and validate the first JSON object in an LLM reply.

    Raises :class:`NoJsonFound`, :class:`MissingField`, or
    :class:`ScoreOutOfRange`; nothing else. Scores are integer-coerced and
    range-checked; a reason is required (and must be non-empty) for every
    requested dimension.
    """
    obj = None
    for candidate in _iter_json_candidates(raw):
        try:
            parsed = json.loads(candidate)
        except json.JSONDecodeError:
            continue
        if isinstance(parsed, dict):
            obj = parsed
            break
    if obj is None:
        raise NoJsonFound()

    values: dict[str, Any] = {}
    for dim in config.dimensions:
        if dim not in obj:
            raise MissingField(dim)
        values[dim] = _coerce_score(dim, obj[dim])
        reason_key = f"reason_{dim}"
        reason = obj.get(reason_key)
        if not isinstance(reason, str) or not reason.strip():
            raise MissingField(reason_key)
        values[reason_key] = reason
    return AssessmentResult(utt_id=utt_id, raw_response=raw, **values)
