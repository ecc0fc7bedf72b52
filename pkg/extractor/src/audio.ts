// Minimal WAV handling: 16-bit PCM mono/stereo read, mono conversion,
// and frame-energy analysis for the speech gate.

import fs from "node:fs";

export class UnreadableAudio extends Error {
  constructor(path: string, reason: string) {
    super(`cannot read audio ${path}: ${reason}`);
    this.name = "UnreadableAudio";
  }
}

export interface AudioClip {
  path: string;
  sampleRate: number;
  /** Mono samples scaled to [-1, 1]. */
  samples: Float32Array;
  durationS: number;
}

export function readWav(path: string): AudioClip {
  let raw: Buffer;
  try {
    raw = fs.readFileSync(path);
  } catch (err) {
    throw new UnreadableAudio(path, (err as Error).message);
  }
  if (raw.length < 44 || raw.toString("ascii", 0, 4) !== "RIFF" || raw.toString("ascii", 8, 12) !== "WAVE") {
    throw new UnreadableAudio(path, "not a RIFF/WAVE file");
  }

  let offset = 12;
  let sampleRate = 0;
  let channels = 0;
  let bitsPerSample = 0;
  let data: Buffer | null = null;
  while (offset + 8 <= raw.length) {
    const chunkId = raw.toString("ascii", offset, offset + 4);
    const chunkSize = raw.readUInt32LE(offset + 4);
    const body = offset + 8;
    if (chunkId === "fmt ") {
      const format = raw.readUInt16LE(body);
      if (format !== 1) {
        throw new UnreadableAudio(path, `unsupported WAV format code ${format} (PCM only)`);
      }
      channels = raw.readUInt16LE(body + 2);
      sampleRate = raw.readUInt32LE(body + 4);
      bitsPerSample = raw.readUInt16LE(body + 14);
    } else if (chunkId === "data") {
      data = raw.subarray(body, body + chunkSize);
    }
    offset = body + chunkSize + (chunkSize % 2);
  }
  if (!sampleRate || !channels || !data) {
    throw new UnreadableAudio(path, "missing fmt or data chunk");
  }
  if (bitsPerSample !== 16) {
    throw new UnreadableAudio(path, `unsupported bit depth ${bitsPerSample} (16-bit only)`);
  }

  const frameCount = Math.floor(data.length / (2 * channels));
  const samples = new Float32Array(frameCount);
  for (let i = 0; i < frameCount; i++) {
    let sum = 0;
    for (let c = 0; c < channels; c++) {
      sum += data.readInt16LE((i * channels + c) * 2);
    }
    samples[i] = sum / channels / 32768;
  }
  return { path, sampleRate, samples, durationS: frameCount / sampleRate };
}

export function writeWav(path: string, samples: Float32Array, sampleRate: number): void {
  const data = Buffer.alloc(samples.length * 2);
  for (let i = 0; i < samples.length; i++) {
    const clamped = Math.max(-1, Math.min(1, samples[i] ?? 0));
    data.writeInt16LE(Math.round(clamped * 32767), i * 2);
  }
  const header = Buffer.alloc(44);
  header.write("RIFF", 0, "ascii");
  header.writeUInt32LE(36 + data.length, 4);
  header.write("WAVE", 8, "ascii");
  header.write("fmt ", 12, "ascii");
  header.writeUInt32LE(16, 16);
  header.writeUInt16LE(1, 20); // PCM
  header.writeUInt16LE(1, 22); // mono
  header.writeUInt32LE(sampleRate, 24);
  header.writeUInt32LE(sampleRate * 2, 28);
  header.writeUInt16LE(2, 32);
  header.writeUInt16LE(16, 34);
  header.write("data", 36, "ascii");
  header.writeUInt32LE(data.length, 40);
  fs.writeFileSync(path, Buffer.concat([header, data]));
}

export function frameRms(clip: AudioClip, frameS = 0.025): number[] {
  const frameLen = Math.max(1, Math.round(frameS * clip.sampleRate));
  const values: number[] = [];
  for (let start = 0; start < clip.samples.length; start += frameLen) {
    const end = Math.min(start + frameLen, clip.samples.length);
    let energy = 0;
    for (let i = start; i < end; i++) {
      const s = clip.samples[i] ?? 0;
      energy += s * s;
    }
    values.push(Math.sqrt(energy / (end - start)));
  }
  return values;
}

/** True when any analysis frame rises above the silence threshold. */
export function hasSpeechEnergy(clip: AudioClip, threshold = 0.01): boolean {
  return frameRms(clip).some((rms) => rms > threshold);
}
