// Cue-bundle record shape shared with the scoring pipeline. The JSON
// schema file shipped with the Python package is the source of truth;
// this zod mirror gives construction-time safety on the extractor side.

import { z } from "zod";

export const tobiEventSchema = z.object({
  word: z.string().min(1),
  break_index: z.number().int().min(0).max(4),
  tone: z.string().regex(/^[HL*%+-]+$/).optional(),
});

export const cueBundleSchema = z.object({
  utt_id: z.string().min(1),
  transcript: z.string(),
  ipa: z.string(),
  cmu: z.string(),
  canonical_ipa: z.string().optional(),
  tobi: z.array(tobiEventSchema).optional(),
  unintelligible: z.boolean().optional(),
  source_meta: z.record(z.string(), z.unknown()).optional(),
});

export type CueBundle = z.infer<typeof cueBundleSchema>;
export type TobiEvent = z.infer<typeof tobiEventSchema>;

export function toJsonl(bundles: CueBundle[]): string {
  return bundles.map((bundle) => JSON.stringify(bundle)).join("\n") + (bundles.length ? "\n" : "");
}
