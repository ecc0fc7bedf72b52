#!/usr/bin/env python3
"""Regenerate the golden prompt files under tests/golden/prompts/.

One file per (cue subset x guideline) configuration, rendered from a fixed
bundle. The committed files pin the prompt wording: any template change
must be deliberate and shows up as a golden diff.
"""

from __future__ import annotations

from itertools import combinations
from pathlib import Path

from phonoscore.bundles import CueBundle, TobiAnnotation, TobiEvent
from phonoscore.phonemes import parse_cmu_with_pauses
from phonoscore.prompts import CUE_ORDER, PromptConfig, build_prompt
from phonoscore import tokenize_ipa

ROOT = Path(__file__).resolve().parent.parent
GOLDEN_DIR = ROOT / "tests" / "golden" / "prompts"
DETAILED_TEXT = (ROOT / "tests" / "fixtures" / "detailed_guideline.txt").read_text(
    encoding="utf-8"
)

GOLDEN_BUNDLE = CueBundle(
    utt_id="golden-01",
    transcript="maybe we should get some cards",
    ipa_recognized=tokenize_ipa("m ɛ m b i w iː ʃ ʊ d ɡ ɛ t s ʌ m k ɑː ɹ d z"),
    cmu_recognized=parse_cmu_with_pauses(
        "M EH M B IY W IY SH UH D (0.21s pause) G EH T S AH M K AA R D Z"
    ),
    tobi=TobiAnnotation((TobiEvent("maybe", 1, "H*"), TobiEvent("cards", 4, "L-L%"))),
)


def all_cue_subsets() -> list[tuple[str, ...]]:
    subsets = []
    for k in range(1, len(CUE_ORDER) + 1):
        subsets.extend(combinations(CUE_ORDER, k))
    return subsets


def golden_name(cues: tuple[str, ...], guideline: str) -> str:
    return f"{'+'.join(cues)}__{guideline}.txt"


def main() -> None:
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    count = 0
    for cues in all_cue_subsets():
        for guideline in ("basic", "detailed"):
            config = PromptConfig(
                cues=cues,
                guideline=guideline,
                dimensions=("accuracy", "fluency"),
                detailed_guideline_text=DETAILED_TEXT if guideline == "detailed" else None,
            )
            prompt = build_prompt(GOLDEN_BUNDLE, config)
            (GOLDEN_DIR / golden_name(cues, guideline)).write_text(prompt, encoding="utf-8")
            count += 1
    print(f"wrote {count} golden prompts to {GOLDEN_DIR}")


if __name__ == "__main__":
    main()
