// Turn audio files into cue bundles: transcript from the ASR engine,
// recognized IPA from the phoneme recognizer, and a CMU phone string with
// pause annotations computed from aligner timestamps.

import path from "node:path";

import { AudioClip, hasSpeechEnergy, readWav } from "./audio.js";
import { CueBundle, cueBundleSchema } from "./bundle.js";
import { ExtractorConfig, buildEngines } from "./config.js";
import { EngineFailure, EngineSet, PhoneSpan } from "./engines.js";

export const EXTRACTOR_VERSION = "0.1.0";

export interface BatchFailure {
  path: string;
  stage: string;
  error: string;
}

export interface BatchResult {
  bundles: CueBundle[];
  failures: BatchFailure[];
}

/** Render aligner spans as "PH1 (Xs pause) PH2 ..." with two-decimal pauses. */
export function renderCmuWithPauses(spans: PhoneSpan[], pauseThresholdS: number): string {
  const parts: string[] = [];
  let previousEnd: number | null = null;
  for (const span of spans) {
    if (span.endS < span.startS) {
      throw new EngineFailure("aligner", `negative-length span for ${span.phone}`);
    }
    if (previousEnd !== null) {
      const gap = span.startS - previousEnd;
      if (gap >= pauseThresholdS) {
        parts.push(`(${gap.toFixed(2)}s pause)`);
      }
    }
    parts.push(span.phone);
    previousEnd = span.endS;
  }
  return parts.join(" ");
}

function checkSpans(spans: PhoneSpan[], clip: AudioClip): void {
  let previousEnd = -Infinity;
  for (const span of spans) {
    if (span.startS < 0 || span.endS > clip.durationS + 0.05) {
      throw new EngineFailure(
        "aligner",
        `span ${span.phone} [${span.startS}, ${span.endS}] outside clip of ${clip.durationS}s`,
      );
    }
    if (span.startS < previousEnd) {
      throw new EngineFailure("aligner", `overlapping span at ${span.phone}`);
    }
    previousEnd = span.endS;
  }
}

function uttId(audioPath: string): string {
  return path.basename(audioPath).replace(/\.wav$/i, "");
}

export function extractCues(
  audioPath: string,
  config: ExtractorConfig,
  engines?: EngineSet,
): CueBundle {
  const clip = readWav(audioPath);
  const meta = {
    asr_variant: config.asr_variant,
    pause_threshold_s: config.pause_threshold_s,
    extractor_version: EXTRACTOR_VERSION,
    device: config.device,
  };

  if (!hasSpeechEnergy(clip, config.silence_rms_threshold)) {
    return cueBundleSchema.parse({
      utt_id: uttId(audioPath),
      transcript: "",
      ipa: "",
      cmu: "",
      unintelligible: true,
      source_meta: { ...meta, engines: {}, note: "no speech energy detected" },
    });
  }

  const engineSet = engines ?? buildEngines(config);
  const transcript = engineSet.transcribe(clip);
  const ipaTokens = engineSet.recognizeIpa(clip);
  const spans = engineSet.alignPhones(clip);
  checkSpans(spans, clip);

  const bundle: CueBundle = {
    utt_id: uttId(audioPath),
    transcript,
    ipa: ipaTokens.join(" "),
    cmu: renderCmuWithPauses(spans, config.pause_threshold_s),
    source_meta: { ...meta, engines: engineSet.ids },
  };
  if (transcript === "") {
    bundle.unintelligible = true;
  }
  if (config.emit_canonical_ipa) {
    const canonical = engineSet.wordToIpa(clip);
    if (canonical) {
      bundle.canonical_ipa = canonical.join(" ");
    }
  }
  if (config.emit_tobi) {
    const events = engineSet.tobi(clip);
    if (events) {
      bundle.tobi = events;
    }
  }
  return cueBundleSchema.parse(bundle);
}

/**
 * Map extractCues over a list of audio paths. Per-file failures are
 * collected and skipped; output order follows input order.
 */
export function batchExtract(
  audioPaths: string[],
  config: ExtractorConfig,
  engines?: EngineSet,
): BatchResult {
  const engineSet = audioPaths.length ? (engines ?? buildEngines(config)) : engines;
  const bundles: CueBundle[] = [];
  const failures: BatchFailure[] = [];
  for (const audioPath of audioPaths) {
    try {
      bundles.push(extractCues(audioPath, config, engineSet));
    } catch (err) {
      const stage = err instanceof EngineFailure ? err.stage : "audio";
      failures.push({ path: audioPath, stage, error: (err as Error).message });
      console.error(`skipping ${audioPath}: ${(err as Error).message}`);
    }
  }
  return { bundles, failures };
}
