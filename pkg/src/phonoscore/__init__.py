"""Pronunciation scoring from textual descriptions of speech.

The pipeline maps a transcript to canonical phoneme sequences, measures
how well the recognized phonemes contain them (local alignment), asks an
LLM to rate accuracy and fluency from the same textual cues, and combines
the normalized signals. Evaluation reports Pearson correlation against
human sentence-level labels.
"""

from .align import AlignmentResult, ScoringScheme, match_similarity, smith_waterman
from .bundles import CueBundle, TobiAnnotation, TobiEvent, read_manifest, write_manifest
from .evaluation import EvalReport, LabelSet, evaluate_run, pearson, reasoning_coverage
from .lexicon import Lexicon, OovReport, arpabet_to_ipa, load_lexicon, transcript_to_canonical
from .llm import BackendConfig, LlmClient, MockScript
from .phonemes import (
    CmuSequence,
    CmuToken,
    IpaSequence,
    IpaToken,
    parse_cmu_with_pauses,
    render_cmu_with_pauses,
    tokenize_ipa,
)
from .prompts import AssessmentResult, PromptConfig, build_prompt, parse_llm_response
from .scores import ScoreTable, fuse_models, min_max_normalize, refine_accuracy

__version__ = "0.1.0"

__all__ = [
    "AlignmentResult",
    "AssessmentResult",
    "BackendConfig",
    "CmuSequence",
    "CmuToken",
    "CueBundle",
    "EvalReport",
    "IpaSequence",
    "IpaToken",
    "LabelSet",
    "Lexicon",
    "LlmClient",
    "MockScript",
    "OovReport",
    "PromptConfig",
    "ScoreTable",
    "ScoringScheme",
    "TobiAnnotation",
    "TobiEvent",
    "arpabet_to_ipa",
    "build_prompt",
    "evaluate_run",
    "fuse_models",
    "load_lexicon",
    "match_similarity",
    "min_max_normalize",
    "parse_cmu_with_pauses",
    "parse_llm_response",
    "pearson",
    "read_manifest",
    "reasoning_coverage",
    "refine_accuracy",
    "render_cmu_with_pauses",
    "smith_waterman",
    "tokenize_ipa",
    "transcript_to_canonical",
    "write_manifest",
]
