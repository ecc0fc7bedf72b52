// End-to-end: extracted bundles must pass the scoring pipeline's schema
// validation and run through its full mock-backed scoring flow. The
// pipeline is consumed strictly through its CLI and file formats.

import { spawnSync } from "node:child_process";
import fs from "node:fs";
import os from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, describe, expect, it } from "vitest";

import { toJsonl } from "../src/bundle.js";
import { main } from "../src/cli.js";
import { extractorConfigSchema } from "../src/config.js";
import { batchExtract } from "../src/extract.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const FIXTURES = path.join(here, "..", "fixtures");
const CLIPS = path.join(FIXTURES, "clips");
const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "e2e-"));
afterAll(() => fs.rmSync(tmp, { recursive: true, force: true }));

function pipeline(...args: string[]) {
  return spawnSync("python3", ["-m", "phonoscore", ...args], { encoding: "utf-8" });
}

function extractAll(outPath: string) {
  const clips = fs
    .readdirSync(CLIPS)
    .filter((f) => f.endsWith(".wav"))
    .sort()
    .map((f) => path.join(CLIPS, f));
  const config = extractorConfigSchema.parse({
    engines: "scripted",
    sidecar_dir: path.join(FIXTURES, "sidecar"),
    emit_canonical_ipa: true,
  });
  const result = batchExtract(clips, config);
  fs.writeFileSync(outPath, toJsonl(result.bundles));
  return result;
}

describe("bundles flow through the scoring pipeline", () => {
  it("passes schema validation", () => {
    const manifest = path.join(tmp, "bundles.jsonl");
    const { bundles, failures } = extractAll(manifest);
    expect(failures).toEqual([]);
    expect(bundles).toHaveLength(3);
    const proc = pipeline("validate", "--manifest", manifest);
    expect(proc.stderr).toBe("");
    expect(proc.status).toBe(0);
    expect(proc.stdout).toContain("valid");
  });

  it("scores with the mock backend (silent clip excluded as partial)", () => {
    const manifest = path.join(tmp, "bundles-score.jsonl");
    extractAll(manifest);
    const outDir = path.join(tmp, "runs");
    const proc = pipeline(
      "score",
      "--manifest", manifest,
      "--backend", "mock",
      "--mock-script", path.join(FIXTURES, "mock_responses.jsonl"),
      "--out", outDir,
    );
    expect(proc.status).toBe(2); // clip03_silent is excluded, a partial run
    const runDir = fs
      .readdirSync(outDir)
      .map((name) => path.join(outDir, name))
      .find((p) => fs.statSync(p).isDirectory());
    expect(runDir).toBeDefined();
    const tables = JSON.parse(fs.readFileSync(path.join(runDir!, "tables.json"), "utf-8"));
    expect(Object.keys(tables["llm_accuracy"]).sort()).toEqual(["clip01", "clip02"]);
    expect(tables["ipa_match"]["clip01"]).toBe(1.0);
    const exclusions = fs.readFileSync(path.join(runDir!, "exclusions.jsonl"), "utf-8");
    expect(exclusions).toContain("clip03_silent");
  });
});

describe("extractor cli", () => {
  it("writes bundles and reports success", async () => {
    const out = path.join(tmp, "cli-bundles.jsonl");
    const code = await main([
      "extract",
      "--audio-dir", CLIPS,
      "--out", out,
      "--sidecar-dir", path.join(FIXTURES, "sidecar"),
      "--emit-canonical-ipa",
    ]);
    expect(code).toBe(0);
    const lines = fs.readFileSync(out, "utf-8").trim().split("\n");
    expect(lines).toHaveLength(3);
    const validated = pipeline("validate", "--manifest", out);
    expect(validated.status).toBe(0);
  });

  it("exits 2 when some files fail", async () => {
    const dir = path.join(tmp, "mixed");
    fs.mkdirSync(dir, { recursive: true });
    fs.copyFileSync(path.join(CLIPS, "clip01.wav"), path.join(dir, "clip01.wav"));
    fs.writeFileSync(path.join(dir, "junk.wav"), "junk");
    const out = path.join(tmp, "mixed.jsonl");
    const code = await main([
      "extract",
      "--audio-dir", dir,
      "--out", out,
      "--sidecar-dir", path.join(FIXTURES, "sidecar"),
    ]);
    expect(code).toBe(2);
    const failures = fs.readFileSync(`${out}.failures.jsonl`, "utf-8").trim().split("\n");
    expect(failures).toHaveLength(1);
  });

  it("handles an empty audio directory", async () => {
    const dir = path.join(tmp, "empty");
    fs.mkdirSync(dir, { recursive: true });
    const out = path.join(tmp, "empty.jsonl");
    const code = await main([
      "extract", "--audio-dir", dir, "--out", out,
      "--sidecar-dir", path.join(FIXTURES, "sidecar"),
    ]);
    expect(code).toBe(0);
    expect(fs.readFileSync(out, "utf-8")).toBe("");
  });
});
