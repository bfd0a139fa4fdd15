// Deterministic stub scorer: no model weights, bit-identical across runs.
//
// Responses come from a script file when one is given; otherwise (and for
// unscripted texts without a default) they are derived from the SHA-256 of
// the text, which keeps CI runs reproducible without any downloads.

import { createHash } from "node:crypto";
import { readFileSync } from "node:fs";

import {
  EMOTION_LABELS,
  EmotionLabel,
  ScoreRequest,
  ScoreResponse,
  normalizeScores,
  validScores,
} from "./protocol.js";

interface ScriptedResponse {
  valence?: number;
  scores?: Record<string, number>;
}

export interface StubScript {
  default?: ScriptedResponse;
  by_hash?: Record<string, ScriptedResponse>;
}

export function loadStubScript(path: string): StubScript {
  const script = JSON.parse(readFileSync(path, "utf-8")) as StubScript;
  for (const [key, entry] of Object.entries(script.by_hash ?? {})) {
    validateEntry(entry, `by_hash[${key}]`);
  }
  if (script.default) validateEntry(script.default, "default");
  return script;
}

function validateEntry(entry: ScriptedResponse, where: string): void {
  if (entry.valence === undefined && entry.scores === undefined) {
    throw new Error(`stub script ${where}: needs a valence or scores`);
  }
  if (entry.valence !== undefined && (entry.valence < 0 || entry.valence > 1)) {
    throw new Error(`stub script ${where}: valence outside [0, 1]`);
  }
  if (entry.scores !== undefined && !validScores(entry.scores)) {
    throw new Error(`stub script ${where}: scores must carry all six labels`);
  }
}

export function textHash(text: string): string {
  return createHash("sha256").update(text, "utf-8").digest("hex");
}

function hashValence(text: string): number {
  const digest = createHash("sha256").update(text, "utf-8").digest();
  return digest.readUInt32BE(0) / 0xffffffff;
}

function hashScores(text: string): Record<EmotionLabel, number> {
  const digest = createHash("sha256").update(text, "utf-8").digest();
  const raw = {} as Record<EmotionLabel, number>;
  EMOTION_LABELS.forEach((label, i) => {
    raw[label] = 1 + digest[i];
  });
  return normalizeScores(raw);
}

export class StubScorer {
  constructor(private readonly script: StubScript = {}) {}

  score(request: ScoreRequest): ScoreResponse {
    const scripted =
      this.script.by_hash?.[textHash(request.text)] ?? this.script.default;
    if (request.task === "sentiment") {
      if (scripted?.valence !== undefined) {
        return { id: request.id, valence: scripted.valence };
      }
      return { id: request.id, valence: hashValence(request.text) };
    }
    if (scripted?.scores !== undefined && validScores(scripted.scores)) {
      return { id: request.id, scores: normalizeScores(scripted.scores) };
    }
    return { id: request.id, scores: hashScores(request.text) };
  }
}
