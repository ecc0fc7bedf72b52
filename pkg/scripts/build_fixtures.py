#!/usr/bin/env python3
"""Regenerate the synthetic test fixtures under tests/fixtures/.

The manifest is derived from the shipped lexicon and conversion table:
clean utterances carry recognized sequences identical to their canonical
mapping, while corrupted ones apply the explicit hand-written token edits
below. Everything is deterministic; re-running must reproduce the
committed files byte-for-byte.
"""

from __future__ import annotations

import json
from pathlib import Path

from phonoscore.bundles import CueBundle, TobiAnnotation, TobiEvent, write_manifest
from phonoscore.lexicon import default_lexicon, transcript_to_canonical
from phonoscore.phonemes import parse_cmu_with_pauses
from phonoscore.prompts import AssessmentResult
from phonoscore import tokenize_ipa

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

LEXICON = default_lexicon()


def canonical_ipa(transcript: str) -> str:
    seq, _ = transcript_to_canonical(transcript, LEXICON, target="ipa")
    return seq.render()


def canonical_cmu(transcript: str) -> str:
    seq, _ = transcript_to_canonical(transcript, LEXICON, target="cmu")
    return " ".join(seq.phones())  # aligner-style: no stress digits


# utt_id -> (transcript, recognized_ipa or None for clean, recognized_cmu or None,
#            labels (acc, flu), mock llm scores (acc, flu))
CASES = {
    "u01": ("maybe we should get some cake", None, None, (5, 5), (5, 5)),
    "u02": (
        "maybe we should get some cards",
        "m ɛ m b i w iː ʃ ʊ d ɡ ɛ t s ʌ m k ɑː ɹ d z",
        "M EH M B IY W IY SH UH D (0.21s pause) G EH T S AH M K AA R D Z",
        (4, 4),
        (4, 4),
    ),
    "u03": (
        "his head hurts even worse",
        "h ɪ z h æ n h æ n z v ɛ ɹ i w ɛ l",
        "HH IH Z HH AE N (0.40s pause) HH AE N Z V EH R IY (0.35s pause) W EH L",
        (2, 2),
        (2, 2),
    ),
    "u04": ("the cat sat on the mat", None, None, (5, 5), (5, 4)),
    "u05": (
        "i like to read books",
        "aɪ l ɪ k t uː ɹ ɛ d b ʊ k s",
        "AY L IH K T UW R EH D B UH K S",
        (4, 4),
        (4, 4),
    ),
    "u06": (
        "we live in a small town",
        "w iː l ɪ f ɪ n ʌ s m ɔː l t aʊ m",
        "W IY L IH F IH N AH (0.30s pause) S M AO L T AW M",
        (4, 3),
        (3, 4),
    ),
    "u07": ("this is a test", None, None, (5, 5), (5, 5)),
    "u08": ("", "", "", (1, 1), None),
    "u09": (
        "good morning mr smythe",
        "ɡ ʊ m ɔː n ɪ m ɪ s ɜː s m aɪ ð",
        "G UH (0.50s pause) M AO N IH M IH S ER (0.12s pause) S M AY DH",
        (2, 3),
        (2, 3),
    ),
    "u10": (
        "thank you very much",
        "θ æ ŋ k j uː v ɛ ɹ i m ʌ tʃ",
        "TH AE NG K Y UW V EH R IY M AH CH",
        (5, 4),
        (4, 4),
    ),
}

# u10 ships a precomputed canonical IPA (word-to-IPA backend style) that
# differs from the dictionary mapping on the final vowel of "very"; the
# recognized sequence equals the supplied canonical, so match == 1.0 only
# when the override is honored.
U10_CANONICAL = "θ æ ŋ k j uː v ɛ ɹ i m ʌ tʃ"

REASONS = {
    "u01": (
        "Every word maps cleanly onto its expected phoneme sequence.",
        "The phones flow without any inserted pauses or restarts.",
    ),
    "u02": (
        "The first word's phonemes (m ɛ m b i) drift from the expected m eɪ b iː.",
        "One 0.21s pause before 'get' breaks an otherwise steady rhythm.",
    ),
    "u03": (
        "Large stretches of the recognized phonemes do not correspond to the transcript words.",
        "Two long pauses and fragmented phone groups suggest halting delivery.",
    ),
    "u04": (
        "All six words are realized with their expected phones.",
        "Delivery is continuous, though slightly deliberate.",
    ),
    "u05": (
        "'read' surfaces as ɹ ɛ d where ɹ iː d is expected; the rest matches.",
        "No pauses; pacing is even across the sentence.",
    ),
    "u06": (
        "Final consonants weaken twice (v -> f, n -> m).",
        "A mid-sentence 0.30s pause interrupts the phrase.",
    ),
    "u07": (
        "Short utterance with a perfect phoneme match.",
        "Compact and fluent with no hesitation.",
    ),
    "u09": (
        "Several expected phones are missing or reduced across the greeting.",
        "Two pauses inside a four-word utterance indicate effortful speech.",
    ),
    "u10": (
        "The phonemes agree with the supplied canonical sequence throughout.",
        "Even pacing, minor hesitation before the final word.",
    ),
}


def build_bundles() -> list[CueBundle]:
    bundles = []
    for utt_id, (transcript, ipa, cmu, _labels, _mock) in CASES.items():
        if utt_id == "u08":
            bundles.append(
                CueBundle(
                    utt_id=utt_id,
                    transcript="",
                    unintelligible=True,
                    source_meta={"asr_variant": "large-en", "note": "no speech detected"},
                )
            )
            continue
        ipa_text = ipa if ipa is not None else canonical_ipa(transcript)
        cmu_text = cmu if cmu is not None else canonical_cmu(transcript)
        tobi = None
        if utt_id == "u02":
            tobi = TobiAnnotation(
                (TobiEvent("maybe", 1, "H*"), TobiEvent("cards", 4, "L-L%"))
            )
        elif utt_id == "u06":
            tobi = TobiAnnotation((TobiEvent("town", 4, "L-L%"),))
        bundles.append(
            CueBundle(
                utt_id=utt_id,
                transcript=transcript,
                ipa_recognized=tokenize_ipa(ipa_text),
                cmu_recognized=parse_cmu_with_pauses(cmu_text),
                canonical_ipa=tokenize_ipa(U10_CANONICAL) if utt_id == "u10" else None,
                tobi=tobi,
                source_meta={"asr_variant": "large-en", "ipa_recognizer": "fixture",
                             "aligner": "fixture"},
            )
        )
    return bundles


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    bundles = build_bundles()
    write_manifest(bundles, FIXTURES / "bundles_10.jsonl")

    with open(FIXTURES / "labels_10.jsonl", "w", encoding="utf-8") as fh:
        for utt_id, (_t, _i, _c, labels, _m) in CASES.items():
            fh.write(
                json.dumps({"utt_id": utt_id, "accuracy": labels[0], "fluency": labels[1]})
                + "\n"
            )

    with open(FIXTURES / "mock_responses.jsonl", "w", encoding="utf-8") as fh:
        for utt_id, (_t, _i, _c, _labels, mock) in CASES.items():
            if mock is None:
                continue
            result = AssessmentResult(
                utt_id=utt_id,
                accuracy=mock[0],
                fluency=mock[1],
                reason_accuracy=REASONS[utt_id][0],
                reason_fluency=REASONS[utt_id][1],
            )
            fh.write(
                json.dumps(
                    {"utt_id": utt_id,
                     "responses": [json.dumps(result.to_payload(), ensure_ascii=False)]},
                    ensure_ascii=False,
                )
                + "\n"
            )

    external = {
        "u01": (92, 88), "u02": (75, 72), "u03": (30, 28), "u04": (88, 90),
        "u05": (80, 78), "u06": (70, 60), "u07": (95, 93), "u08": (10, 12),
        "u09": (35, 45), "u10": (85, 76),
    }
    with open(FIXTURES / "external_scores.jsonl", "w", encoding="utf-8") as fh:
        for utt_id, (acc, flu) in external.items():
            fh.write(
                json.dumps({"utt_id": utt_id, "accuracy": acc, "fluency": flu}) + "\n"
            )

    annotations = [
        {"utt_id": "u02", "dimension": "accuracy",
         "spans": [{"category": "correct", "token_count": 12},
                   {"category": "constructive", "token_count": 8},
                   {"category": "irrelevant", "token_count": 4}]},
        {"utt_id": "u02", "dimension": "fluency",
         "spans": [{"category": "correct", "token_count": 10},
                   {"category": "hallucination", "token_count": 5}]},
        {"utt_id": "u03", "dimension": "accuracy",
         "spans": [{"category": "constructive", "token_count": 6},
                   {"category": "hallucination", "token_count": 2},
                   {"category": "correct", "token_count": 4}]},
    ]
    with open(FIXTURES / "annotations_3.jsonl", "w", encoding="utf-8") as fh:
        for record in annotations:
            fh.write(json.dumps(record) + "\n")

    print(f"wrote fixtures to {FIXTURES}")


if __name__ == "__main__":
    main()
