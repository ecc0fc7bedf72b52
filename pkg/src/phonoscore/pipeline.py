"""End-to-end orchestration: manifest in, scored run directory out.

Per-utterance work (canonical mapping, match scoring, LLM assessment) runs
on a worker pool; the cross-utterance steps (normalization, refinement,
fusion, correlation) happen single-threaded after a barrier. Every
utterance ends up either in the score tables or in the exclusion list,
and a run under the mock backend is bit-reproducible from its config
snapshot.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from . import config as config_mod
from .align import ScoringScheme, match_similarity
from .bundles import CueBundle, read_manifest
from .lexicon import Lexicon, default_lexicon, load_lexicon, transcript_to_canonical
from .llm import BackendConfig, InvalidAfterRetries, LlmClient, RateLimited, TransportError
from .evaluation import EvalReport, LabelSet, evaluate_run, load_labels
from .phonemes import EmptyCanonical
from .prompts import AssessmentResult, MissingCue, PromptConfig
from .scores import ScoreTable, fuse_models, min_max_normalize, refine_accuracy

logger = logging.getLogger(__name__)

SCORING_MODES = ("llm", "llm_plus_match", "ipa_match", "cmu_match")

# Cue/scoring matrix for ablation sweeps; "full" is the complete system.
ABLATION_MODES: dict[str, dict[str, Any]] = {
    "transcript": {"scoring": "llm", "cues": ["transcript"]},
    "transcript+ipa": {"scoring": "llm", "cues": ["transcript", "ipa"]},
    "transcript+cmu": {"scoring": "llm", "cues": ["transcript", "cmu"]},
    "all": {"scoring": "llm", "cues": ["transcript", "ipa", "cmu"]},
    "full": {"scoring": "llm_plus_match", "cues": ["transcript", "ipa", "cmu"]},
    "ipa_match": {"scoring": "ipa_match"},
    "cmu_match": {"scoring": "cmu_match"},
}


@dataclass(frozen=True)
class UtteranceFailure:
    utt_id: str
    stage: str
    error: str


@dataclass
class RunArtifacts:
    run_id: str
    out_dir: Path
    config: dict[str, Any]
    tables: dict[str, ScoreTable] = field(default_factory=dict)
    predictions: dict[str, str] = field(default_factory=dict)  # dimension -> table name
    assessments: list[tuple[AssessmentResult, int]] = field(default_factory=list)
    exclusions: list[UtteranceFailure] = field(default_factory=list)
    oov: dict[str, list[tuple[str, int]]] = field(default_factory=dict)
    match_missing: list[str] = field(default_factory=list)
    report: EvalReport | None = None
    wall_time_s: float = 0.0


@dataclass
class _UttOutcome:
    bundle: CueBundle
    match: float | None = None
    match_error: str | None = None
    result: AssessmentResult | None = None
    attempts: int = 0
    failure: UtteranceFailure | None = None
    oov: list[tuple[str, int]] = field(default_factory=list)


def _load_lexicon_from_config(config: Mapping[str, Any]) -> Lexicon:
    path = config.get("lexicon")
    return load_lexicon(path) if path else default_lexicon()


def _canonical_symbols(
    bundle: CueBundle, lexicon: Lexicon, kind: str
) -> tuple[list[str], list[tuple[str, int]]]:
    """Canonical phoneme symbols for match scoring, honoring bundle overrides."""
    if kind == "ipa":
        if bundle.canonical_ipa is not None and len(bundle.canonical_ipa) > 0:
            return bundle.canonical_ipa.symbols(), []
        seq, oov = transcript_to_canonical(bundle.transcript, lexicon, target="ipa")
        return seq.symbols(), list(oov.oov_words)
    seq, oov = transcript_to_canonical(bundle.transcript, lexicon, target="cmu")
    return seq.phones(), list(oov.oov_words)


def _assess_one(
    bundle: CueBundle,
    lexicon: Lexicon,
    scheme: ScoringScheme,
    scoring: str,
    prompt_config: PromptConfig | None,
    client: LlmClient | None,
) -> _UttOutcome:
    outcome = _UttOutcome(bundle=bundle)
    if bundle.unintelligible or not bundle.transcript.strip():
        outcome.failure = UtteranceFailure(bundle.utt_id, "cues", "empty or unintelligible transcript")
        return outcome

    if scoring in ("llm_plus_match", "ipa_match", "cmu_match"):
        kind = "cmu" if scoring == "cmu_match" else "ipa"
        recognized = (
            bundle.cmu_recognized.phones()
            if kind == "cmu"
            else bundle.ipa_recognized.symbols()
        )
        try:
            canonical, oov = _canonical_symbols(bundle, lexicon, kind)
            outcome.oov = oov
            outcome.match = match_similarity(canonical, recognized, scheme)
        except EmptyCanonical as exc:
            outcome.match_error = str(exc)
            if scoring in ("ipa_match", "cmu_match"):
                outcome.failure = UtteranceFailure(bundle.utt_id, "match", str(exc))
                return outcome

    if scoring in ("llm", "llm_plus_match"):
        try:
            outcome.result, outcome.attempts = client.assess(bundle, prompt_config)
        except (InvalidAfterRetries, TransportError, RateLimited, MissingCue) as exc:
            outcome.failure = UtteranceFailure(bundle.utt_id, "llm", str(exc))
    return outcome


def run_pipeline(
    manifest_path: str | Path,
    labels_path: str | Path | None,
    config: Mapping[str, Any],
    out_root: str | Path = "runs",
    client: LlmClient | None = None,
    external_scores_path: str | Path | None = None,
) -> RunArtifacts:
    """Execute one scoring run and persist its artifacts.

    Per-utterance failures are recorded and excluded from the tables; fatal
    configuration or IO problems raise. When ``labels_path`` is given the
    run ends with an evaluation report.
    """
    started = time.monotonic()
    config = dict(config)
    scoring = config["scoring"]
    if scoring not in SCORING_MODES:
        raise ValueError(f"unknown scoring mode: {scoring!r}")

    bundles = read_manifest(manifest_path)
    rid = config_mod.run_id(config, manifest_path)
    out_dir = Path(out_root) / rid
    if out_dir.exists():
        logger.info("identical run %s already exists; overwriting", rid)
    out_dir.mkdir(parents=True, exist_ok=True)

    lexicon = _load_lexicon_from_config(config)
    scheme = ScoringScheme(
        match_reward=config["align"]["match"],
        mismatch_penalty=config["align"]["mismatch"],
        gap_penalty=config["align"]["gap"],
    )

    prompt_config = None
    if scoring in ("llm", "llm_plus_match"):
        prompt_config = PromptConfig(
            cues=tuple(config["cues"]),
            guideline=config["guideline"],
            dimensions=tuple(config["dimensions"]),
            detailed_guideline_text=config.get("detailed_guideline_text"),
            force_prosody=bool(config.get("force_prosody", False)),
        )
        if client is None:
            client = LlmClient(BackendConfig(**config["backend"]))

    workers = max(1, int(config.get("workers", 4)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_assess_one, b, lexicon, scheme, scoring, prompt_config, client)
            for b in bundles
        ]
        outcomes = [f.result() for f in futures]

    artifacts = RunArtifacts(run_id=rid, out_dir=out_dir, config=config)
    match_kind = "cmu" if scoring == "cmu_match" else "ipa"
    match_entries: dict[str, float] = {}
    llm_entries: dict[str, dict[str, float]] = {}
    for outcome in outcomes:
        utt_id = outcome.bundle.utt_id
        if outcome.failure is not None:
            artifacts.exclusions.append(outcome.failure)
            continue
        if outcome.oov:
            artifacts.oov[utt_id] = outcome.oov
        if outcome.match is not None:
            match_entries[utt_id] = outcome.match
        elif outcome.match_error is not None:
            artifacts.match_missing.append(utt_id)
        if outcome.result is not None:
            artifacts.assessments.append((outcome.result, outcome.attempts))
            for dim in prompt_config.dimensions:
                value = outcome.result.score(dim)
                if value is not None:
                    llm_entries.setdefault(dim, {})[utt_id] = float(value)

    if scoring in ("llm_plus_match", "ipa_match", "cmu_match") and match_entries:
        artifacts.tables[f"{match_kind}_match"] = ScoreTable(
            "accuracy", match_entries, scale_note="raw smith-waterman similarity"
        )

    if scoring in ("llm", "llm_plus_match"):
        for dim, entries in llm_entries.items():
            artifacts.tables[f"llm_{dim}"] = ScoreTable(dim, entries, scale_note="raw llm 1-5")
        if "llm_accuracy" in artifacts.tables:
            if scoring == "llm_plus_match":
                refined = refine_accuracy(
                    artifacts.tables["llm_accuracy"],
                    artifacts.tables.get(
                        f"{match_kind}_match", ScoreTable("accuracy", {})
                    ),
                )
                artifacts.tables["accuracy_refined"] = refined
                artifacts.predictions["accuracy"] = "accuracy_refined"
            else:
                artifacts.predictions["accuracy"] = "llm_accuracy"
        if "llm_fluency" in artifacts.tables:
            artifacts.predictions["fluency"] = "llm_fluency"
        if "llm_prosody" in artifacts.tables:
            artifacts.predictions["prosody"] = "llm_prosody"
    elif match_entries:
        normalized = min_max_normalize(artifacts.tables[f"{match_kind}_match"])
        artifacts.tables[f"{match_kind}_match_normalized"] = normalized
        artifacts.predictions["accuracy"] = f"{match_kind}_match_normalized"

    if external_scores_path is not None:
        fuse_external(artifacts, external_scores_path)

    if labels_path is not None:
        labels = load_labels(labels_path, scale=config.get("label_scale", "unspecified"))
        artifacts.report = _evaluate(artifacts, labels)

    artifacts.wall_time_s = time.monotonic() - started
    persist_run(artifacts)
    return artifacts


def _evaluate(artifacts: RunArtifacts, labels: LabelSet) -> EvalReport:
    predictions = {
        dim: artifacts.tables[name] for dim, name in artifacts.predictions.items()
    }
    return evaluate_run(
        predictions, labels, config_id=artifacts.run_id, table_names=artifacts.predictions
    )


def fuse_external(artifacts: RunArtifacts, external_scores_path: str | Path) -> None:
    """Average this run's predictions with an external model's score file."""
    external: dict[str, dict[str, float]] = {}
    for line in Path(external_scores_path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        record = json.loads(line)
        for dim in ("accuracy", "fluency", "prosody"):
            if record.get(dim) is not None:
                external.setdefault(dim, {})[record["utt_id"]] = float(record[dim])
    for dim, entries in external.items():
        own_name = artifacts.predictions.get(dim)
        if own_name is None:
            continue
        own = artifacts.tables[own_name]
        shared = own.ids() & set(entries)
        if len(shared) < 1:
            continue
        own_shared = ScoreTable(dim, {u: own.entries[u] for u in shared}, own.scale_note)
        ext_shared = ScoreTable(
            dim, {u: entries[u] for u in shared}, scale_note="external model"
        )
        fused = fuse_models(own_shared, ext_shared)
        artifacts.tables[f"{dim}_fused"] = fused
        artifacts.predictions[dim] = f"{dim}_fused"


def _dump_json(path: Path, payload: Any) -> None:
    path.write_text(
        json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def persist_run(artifacts: RunArtifacts) -> None:
    out = artifacts.out_dir
    _dump_json(out / "config.json", {"run_id": artifacts.run_id, "config": artifacts.config})
    _dump_json(
        out / "tables.json",
        {
            name: dict(sorted(table.entries.items()))
            for name, table in artifacts.tables.items()
        },
    )
    with open(out / "assessments.jsonl", "w", encoding="utf-8") as fh:
        for result, attempts in sorted(artifacts.assessments, key=lambda p: p[0].utt_id):
            record = {"utt_id": result.utt_id, **result.to_payload(), "attempts": attempts,
                      "raw_response": result.raw_response}
            fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
    with open(out / "exclusions.jsonl", "w", encoding="utf-8") as fh:
        for failure in sorted(artifacts.exclusions, key=lambda f: f.utt_id):
            fh.write(
                json.dumps(
                    {"utt_id": failure.utt_id, "stage": failure.stage, "error": failure.error},
                    sort_keys=True,
                    ensure_ascii=False,
                )
                + "\n"
            )
    meta = {
        "run_id": artifacts.run_id,
        "predictions": artifacts.predictions,
        "table_dimensions": {name: t.dimension for name, t in artifacts.tables.items()},
        "n_scored": len({u for t in artifacts.tables.values() for u in t.entries}),
        "n_excluded": len(artifacts.exclusions),
        "attempts": {r.utt_id: a for r, a in artifacts.assessments},
        "oov": {u: [[w, p] for w, p in words] for u, words in artifacts.oov.items()},
        "match_missing": sorted(artifacts.match_missing),
        "scale_notes": {name: t.scale_note for name, t in artifacts.tables.items()},
        "wall_time_s": artifacts.wall_time_s,
    }
    _dump_json(out / "meta.json", meta)
    if artifacts.report is not None:
        _dump_json(out / "report.json", artifacts.report.to_record())
        (out / "report.txt").write_text(artifacts.report.to_text() + "\n", encoding="utf-8")


def load_run(out_dir: str | Path) -> RunArtifacts:
    """Rehydrate a persisted run (tables and metadata, not raw outcomes)."""
    out = Path(out_dir)
    config_snapshot = json.loads((out / "config.json").read_text(encoding="utf-8"))
    meta = json.loads((out / "meta.json").read_text(encoding="utf-8"))
    raw_tables = json.loads((out / "tables.json").read_text(encoding="utf-8"))
    artifacts = RunArtifacts(
        run_id=config_snapshot["run_id"],
        out_dir=out,
        config=config_snapshot["config"],
    )
    for name, entries in raw_tables.items():
        artifacts.tables[name] = ScoreTable(
            meta["table_dimensions"][name],
            entries,
            scale_note=meta["scale_notes"].get(name, ""),
        )
    artifacts.predictions = dict(meta["predictions"])
    artifacts.match_missing = list(meta.get("match_missing", []))
    return artifacts


def run_ablation(
    manifest_path: str | Path,
    labels_path: str | Path | None,
    base_config: Mapping[str, Any],
    modes: list[str] | None = None,
    out_root: str | Path = "runs",
) -> list[tuple[str, RunArtifacts]]:
    """One run per ablation mode; match-only modes never touch the backend."""
    modes = list(modes or ABLATION_MODES)
    unknown = [m for m in modes if m not in ABLATION_MODES]
    if unknown:
        raise ValueError(f"unknown ablation modes: {unknown}")
    results: list[tuple[str, RunArtifacts]] = []
    for mode in modes:
        config = json.loads(json.dumps(dict(base_config)))
        config.update(ABLATION_MODES[mode])
        artifacts = run_pipeline(manifest_path, labels_path, config, out_root=out_root)
        results.append((mode, artifacts))
    return results


def ablation_summary(results: list[tuple[str, RunArtifacts]]) -> str:
    header = f"{'mode':<16} {'accuracy':>9} {'fluency':>9} {'n_excl':>7} {'run_id':>13}"
    lines = [header, "-" * len(header)]
    for mode, artifacts in results:
        cells: dict[str, str] = {"accuracy": "-", "fluency": "-"}
        if artifacts.report is not None:
            for dim, ev in artifacts.report.dimensions.items():
                if dim in cells:
                    cells[dim] = f"{ev.pcc:.3f}" if ev.pcc is not None else "err"
        lines.append(
            f"{mode:<16} {cells['accuracy']:>9} {cells['fluency']:>9} "
            f"{len(artifacts.exclusions):>7} {artifacts.run_id:>13}"
        )
    return "\n".join(lines)
