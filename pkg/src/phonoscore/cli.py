"""Command-line entry point.

Subcommands: score, evaluate, fuse, ablate, validate, coverage.
Exit codes: 0 success, 1 fatal error, 2 partial (per-utterance failures).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import pipeline
from .bundles import validate_manifest
from .config import resolve_config
from .evaluation import evaluate_run, load_annotations, load_labels, reasoning_coverage

logger = logging.getLogger(__name__)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file layered over defaults")
    parser.add_argument("--lexicon", help="CMUdict-format dictionary path")
    parser.add_argument("--backend", choices=["mock", "openai_style", "gemini_style"])
    parser.add_argument("--mock-script", help="JSONL of canned responses (mock backend)")
    parser.add_argument("--cues", help="comma list from transcript,ipa,cmu,tobi")
    parser.add_argument("--guideline", choices=["basic", "detailed"])
    parser.add_argument("--detailed-guideline", help="text file with the detailed rubric")
    parser.add_argument(
        "--scoring", choices=list(pipeline.SCORING_MODES), help="scoring mode"
    )
    parser.add_argument("--label-scale", help="free-text note about the label scale")
    parser.add_argument("--workers", type=int)


def _flag_overrides(args: argparse.Namespace) -> dict:
    overrides: dict = {}
    if args.lexicon:
        overrides["lexicon"] = args.lexicon
    if args.backend:
        overrides["backend.kind"] = args.backend
    if args.mock_script:
        overrides["backend.mock_script"] = args.mock_script
    if args.cues:
        overrides["cues"] = [c.strip() for c in args.cues.split(",") if c.strip()]
    if args.guideline:
        overrides["guideline"] = args.guideline
    if args.detailed_guideline:
        overrides["detailed_guideline_text"] = Path(args.detailed_guideline).read_text(
            encoding="utf-8"
        )
    if args.scoring:
        overrides["scoring"] = args.scoring
    if args.label_scale:
        overrides["label_scale"] = args.label_scale
    if args.workers:
        overrides["workers"] = args.workers
    return overrides


def _cmd_score(args: argparse.Namespace) -> int:
    config = resolve_config(args.config, _flag_overrides(args))
    artifacts = pipeline.run_pipeline(
        args.manifest,
        args.labels,
        config,
        out_root=args.out,
        external_scores_path=args.external_scores,
    )
    print(f"run {artifacts.run_id}: {len(artifacts.assessments)} assessed, "
          f"{len(artifacts.exclusions)} excluded -> {artifacts.out_dir}")
    if artifacts.report is not None:
        print(artifacts.report.to_text())
    return 2 if artifacts.exclusions else 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    artifacts = pipeline.load_run(args.run)
    labels = load_labels(args.labels, scale=args.label_scale or "unspecified")
    predictions = {
        dim: artifacts.tables[name] for dim, name in artifacts.predictions.items()
    }
    report = evaluate_run(
        predictions, labels, config_id=artifacts.run_id, table_names=artifacts.predictions
    )
    out = Path(args.run)
    (out / "report.json").write_text(
        json.dumps(report.to_record(), sort_keys=True, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    (out / "report.txt").write_text(report.to_text() + "\n", encoding="utf-8")
    print(report.to_text())
    return 0


def _cmd_fuse(args: argparse.Namespace) -> int:
    artifacts = pipeline.load_run(args.run)
    pipeline.fuse_external(artifacts, args.external_scores)
    pipeline.persist_run(artifacts)
    fused = [name for name in artifacts.tables if name.endswith("_fused")]
    print(f"fused tables: {', '.join(sorted(fused)) or 'none'} -> {artifacts.out_dir}")
    return 0


def _cmd_ablate(args: argparse.Namespace) -> int:
    config = resolve_config(args.config, _flag_overrides(args))
    modes = [m.strip() for m in args.modes.split(",")] if args.modes else None
    results = pipeline.run_ablation(
        args.manifest, args.labels, config, modes=modes, out_root=args.out
    )
    summary = pipeline.ablation_summary(results)
    print(summary)
    out = Path(args.out)
    (out / "ablation_summary.txt").write_text(summary + "\n", encoding="utf-8")
    (out / "ablation_summary.json").write_text(
        json.dumps(
            {
                mode: (artifacts.report.to_record() if artifacts.report else None)
                for mode, artifacts in results
            },
            sort_keys=True,
            indent=2,
            ensure_ascii=False,
        )
        + "\n",
        encoding="utf-8",
    )
    return 2 if any(a.exclusions for _, a in results) else 0


def _cmd_validate(args: argparse.Namespace) -> int:
    problems = list(validate_manifest(args.manifest))
    for line_number, message in problems:
        print(f"{args.manifest}:{line_number}: {message}")
    if problems:
        print(f"{len(problems)} problem(s) found")
        return 1
    print("manifest is valid")
    return 0


def _cmd_coverage(args: argparse.Namespace) -> int:
    annotations = load_annotations(args.annotations)
    coverage = reasoning_coverage(annotations)
    payload = {
        "tokenization": "whitespace-delimited tokens",
        "coverage": coverage,
    }
    text = json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phonoscore",
        description="Score spoken-English pronunciation from textual acoustic cues.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="assess a cue-bundle manifest")
    p_score.add_argument("--manifest", required=True)
    p_score.add_argument("--labels")
    p_score.add_argument("--external-scores")
    p_score.add_argument("--out", default="runs")
    _add_config_flags(p_score)
    p_score.set_defaults(func=_cmd_score)

    p_eval = sub.add_parser("evaluate", help="correlate a run with labels")
    p_eval.add_argument("--run", required=True)
    p_eval.add_argument("--labels", required=True)
    p_eval.add_argument("--label-scale")
    p_eval.set_defaults(func=_cmd_evaluate)

    p_fuse = sub.add_parser("fuse", help="fuse a run with external model scores")
    p_fuse.add_argument("--run", required=True)
    p_fuse.add_argument("--external-scores", required=True)
    p_fuse.set_defaults(func=_cmd_fuse)

    p_ablate = sub.add_parser("ablate", help="sweep cue/scoring configurations")
    p_ablate.add_argument("--manifest", required=True)
    p_ablate.add_argument("--labels")
    p_ablate.add_argument("--modes", help=f"comma list from {','.join(pipeline.ABLATION_MODES)}")
    p_ablate.add_argument("--out", default="runs")
    _add_config_flags(p_ablate)
    p_ablate.set_defaults(func=_cmd_ablate)

    p_validate = sub.add_parser("validate", help="schema-check a manifest")
    p_validate.add_argument("--manifest", required=True)
    p_validate.set_defaults(func=_cmd_validate)

    p_coverage = sub.add_parser("coverage", help="tally reasoning annotations")
    p_coverage.add_argument("--annotations", required=True)
    p_coverage.add_argument("--out")
    p_coverage.set_defaults(func=_cmd_coverage)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except Exception as exc:  # fatal config/IO errors -> exit 1
        logger.error("%s", exc, exc_info=args.verbose)
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
