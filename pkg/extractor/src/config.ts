import { z } from "zod";

import { CommandEngines, EngineSet, ScriptedEngines } from "./engines.js";

export const ASR_VARIANTS = ["large-en", "tiny", "turbo"] as const;

const commandSpecSchema = z.object({
  argv: z.array(z.string()).min(1),
  id: z.string().min(1),
});

export const extractorConfigSchema = z.object({
  engines: z.enum(["scripted", "command"]).default("scripted"),
  asr_variant: z.enum(ASR_VARIANTS).default("large-en"),
  emit_canonical_ipa: z.boolean().default(false),
  emit_tobi: z.boolean().default(false),
  device: z.string().default("cpu"),
  // Inter-phone silence at or above this many seconds becomes a pause
  // annotation on the following phone, rounded to two decimals.
  pause_threshold_s: z.number().positive().default(0.05),
  silence_rms_threshold: z.number().positive().default(0.01),
  sidecar_dir: z.string().optional(),
  command: z
    .object({
      asr: commandSpecSchema,
      ipa_recognizer: commandSpecSchema,
      aligner: commandSpecSchema,
      word_to_ipa: commandSpecSchema.optional(),
      tobi: commandSpecSchema.optional(),
    })
    .optional(),
});

export type ExtractorConfig = z.infer<typeof extractorConfigSchema>;

/** Instantiate the configured engine set, failing fast when unresolvable. */
export function buildEngines(config: ExtractorConfig): EngineSet {
  if (config.engines === "scripted") {
    if (!config.sidecar_dir) {
      throw new Error("scripted engines need sidecar_dir");
    }
    return new ScriptedEngines(config.sidecar_dir, config.asr_variant);
  }
  if (!config.command) {
    throw new Error("command engines need a command section");
  }
  return new CommandEngines({
    asr: config.command.asr,
    ipaRecognizer: config.command.ipa_recognizer,
    aligner: config.command.aligner,
    wordToIpa: config.command.word_to_ipa,
    tobi: config.command.tobi,
  });
}
