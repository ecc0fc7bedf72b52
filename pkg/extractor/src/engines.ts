// Engine adapters. Real deployments plug in pretrained models through the
// "command" adapter (any executable that reads an audio path and prints
// JSON); offline tests use the "scripted" adapter, which replays committed
// sidecar files keyed by clip basename. Both present the same interface,
// so the extraction logic downstream is identical.

import { spawnSync } from "node:child_process";
import fs from "node:fs";
import path from "node:path";

import type { AudioClip } from "./audio.js";

export class EngineFailure extends Error {
  constructor(public stage: string, message: string) {
    super(`${stage}: ${message}`);
    this.name = "EngineFailure";
  }
}

export interface PhoneSpan {
  phone: string;
  startS: number;
  endS: number;
}

export interface TobiMark {
  word: string;
  break_index: number;
  tone?: string;
}

export interface EngineSet {
  /** Identifier strings recorded in source_meta, e.g. model names. */
  ids: Record<string, string>;
  transcribe(clip: AudioClip): string;
  recognizeIpa(clip: AudioClip): string[];
  alignPhones(clip: AudioClip): PhoneSpan[];
  wordToIpa(clip: AudioClip): string[] | null;
  tobi(clip: AudioClip): TobiMark[] | null;
}

interface Sidecar {
  transcript: string;
  ipa: string[];
  phones: { phone: string; start: number; end: number }[];
  canonical_ipa?: string[];
  tobi?: TobiMark[];
}

export class ScriptedEngines implements EngineSet {
  ids: Record<string, string>;

  constructor(private sidecarDir: string, asrVariant: string) {
    if (!fs.existsSync(sidecarDir)) {
      throw new EngineFailure("startup", `sidecar directory not found: ${sidecarDir}`);
    }
    this.ids = {
      asr: `scripted-asr (${asrVariant})`,
      ipa_recognizer: "scripted-ipa",
      aligner: "scripted-aligner",
      word_to_ipa: "scripted-word-to-ipa",
    };
  }

  private load(clip: AudioClip): Sidecar {
    const base = path.basename(clip.path).replace(/\.wav$/i, "");
    const sidecarPath = path.join(this.sidecarDir, `${base}.json`);
    if (!fs.existsSync(sidecarPath)) {
      throw new EngineFailure("asr", `no sidecar for ${base}`);
    }
    return JSON.parse(fs.readFileSync(sidecarPath, "utf-8")) as Sidecar;
  }

  transcribe(clip: AudioClip): string {
    return this.load(clip).transcript;
  }

  recognizeIpa(clip: AudioClip): string[] {
    return this.load(clip).ipa;
  }

  alignPhones(clip: AudioClip): PhoneSpan[] {
    return this.load(clip).phones.map((p) => ({ phone: p.phone, startS: p.start, endS: p.end }));
  }

  wordToIpa(clip: AudioClip): string[] | null {
    return this.load(clip).canonical_ipa ?? null;
  }

  tobi(clip: AudioClip): TobiMark[] | null {
    return this.load(clip).tobi ?? null;
  }
}

export interface CommandSpec {
  /** argv template; "{audio}" is replaced with the clip path. */
  argv: string[];
  id: string;
}

export interface CommandEngineConfig {
  asr: CommandSpec;
  ipaRecognizer: CommandSpec;
  aligner: CommandSpec;
  wordToIpa?: CommandSpec;
  tobi?: CommandSpec;
}

export class CommandEngines implements EngineSet {
  ids: Record<string, string>;

  constructor(private config: CommandEngineConfig) {
    for (const [stage, spec] of Object.entries(config)) {
      if (!spec) continue;
      const binary = (spec as CommandSpec).argv[0];
      if (!binary) {
        throw new EngineFailure("startup", `${stage}: empty argv`);
      }
      const probe = spawnSync("which", [binary], { encoding: "utf-8" });
      if (probe.status !== 0) {
        throw new EngineFailure("startup", `${stage}: executable not found: ${binary}`);
      }
    }
    this.ids = {
      asr: config.asr.id,
      ipa_recognizer: config.ipaRecognizer.id,
      aligner: config.aligner.id,
      ...(config.wordToIpa ? { word_to_ipa: config.wordToIpa.id } : {}),
      ...(config.tobi ? { tobi: config.tobi.id } : {}),
    };
  }

  private run<T>(stage: string, spec: CommandSpec, clip: AudioClip): T {
    const argv = spec.argv.map((arg) => arg.replaceAll("{audio}", clip.path));
    const proc = spawnSync(argv[0]!, argv.slice(1), { encoding: "utf-8" });
    if (proc.status !== 0) {
      throw new EngineFailure(stage, proc.stderr || `exit ${proc.status}`);
    }
    try {
      return JSON.parse(proc.stdout) as T;
    } catch (err) {
      throw new EngineFailure(stage, `bad JSON output: ${(err as Error).message}`);
    }
  }

  transcribe(clip: AudioClip): string {
    return this.run<{ text: string }>("asr", this.config.asr, clip).text;
  }

  recognizeIpa(clip: AudioClip): string[] {
    return this.run<{ ipa: string[] }>("ipa", this.config.ipaRecognizer, clip).ipa;
  }

  alignPhones(clip: AudioClip): PhoneSpan[] {
    const spans = this.run<{ phones: { phone: string; start: number; end: number }[] }>(
      "aligner", this.config.aligner, clip,
    );
    return spans.phones.map((p) => ({ phone: p.phone, startS: p.start, endS: p.end }));
  }

  wordToIpa(clip: AudioClip): string[] | null {
    if (!this.config.wordToIpa) return null;
    return this.run<{ ipa: string[] }>("word_to_ipa", this.config.wordToIpa, clip).ipa;
  }

  tobi(clip: AudioClip): TobiMark[] | null {
    if (!this.config.tobi) return null;
    return this.run<{ events: TobiMark[] }>("tobi", this.config.tobi, clip).events;
  }
}
