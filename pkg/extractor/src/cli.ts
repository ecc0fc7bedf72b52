// CLI: extract cue bundles from a directory of WAV clips.
// Exit codes: 0 all files extracted, 1 fatal error, 2 some files skipped.

import fs from "node:fs";
import path from "node:path";
import { pathToFileURL } from "node:url";

import yargs from "yargs";

import { toJsonl } from "./bundle.js";
import { ASR_VARIANTS, extractorConfigSchema } from "./config.js";
import { batchExtract } from "./extract.js";

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .command("extract", "produce cue-bundle JSONL from audio files")
    .demandCommand(1)
    .option("audio-dir", { type: "string", demandOption: true })
    .option("out", { type: "string", demandOption: true })
    .option("asr", { choices: ASR_VARIANTS, default: "large-en" as const })
    .option("engines", { choices: ["scripted", "command"] as const, default: "scripted" as const })
    .option("sidecar-dir", { type: "string", describe: "sidecar JSON directory (scripted engines)" })
    .option("config", { type: "string", describe: "JSON file with extractor config overrides" })
    .option("emit-canonical-ipa", { type: "boolean", default: false })
    .option("emit-tobi", { type: "boolean", default: false })
    .option("pause-threshold", { type: "number", default: 0.05 })
    .option("failures", { type: "string", describe: "where to write failure records (JSONL)" })
    .strict()
    .parse();

  const fileOverrides = args.config
    ? JSON.parse(fs.readFileSync(args.config, "utf-8"))
    : {};
  const config = extractorConfigSchema.parse({
    engines: args.engines,
    asr_variant: args.asr,
    emit_canonical_ipa: args.emitCanonicalIpa,
    emit_tobi: args.emitTobi,
    pause_threshold_s: args.pauseThreshold,
    sidecar_dir: args.sidecarDir,
    ...fileOverrides,
  });

  const clips = fs
    .readdirSync(args.audioDir!)
    .filter((name) => name.toLowerCase().endsWith(".wav"))
    .sort()
    .map((name) => path.join(args.audioDir!, name));

  const { bundles, failures } = batchExtract(clips, config);
  fs.writeFileSync(args.out!, toJsonl(bundles));
  const failuresPath = args.failures ?? `${args.out}.failures.jsonl`;
  fs.writeFileSync(
    failuresPath,
    failures.map((f) => JSON.stringify(f)).join("\n") + (failures.length ? "\n" : ""),
  );
  console.log(
    `extracted ${bundles.length}/${clips.length} clips -> ${args.out}` +
      (failures.length ? ` (${failures.length} failed, see ${failuresPath})` : ""),
  );
  return failures.length ? 2 : 0;
}

const entryPoint = process.argv[1] ? pathToFileURL(process.argv[1]).href : "";
if (import.meta.url === entryPoint) {
  main(process.argv.slice(2))
    .then((code) => process.exit(code))
    .catch((err) => {
      console.error(`error: ${(err as Error).message}`);
      process.exit(1);
    });
}
