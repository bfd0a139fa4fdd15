// Wire protocol: one JSON object per line, UTF-8, no pretty-printing.
//
//   client hello:     {"v":1,"hello":true}
//   server handshake: {"v":1,"capabilities":[...],"model":"..."}
//   request:          {"id":N,"task":"sentiment"|"emotion","text":"..."}
//   response:         {"id":N,"valence":x} | {"id":N,"scores":{...}} | {"id":N,"error":"..."}

export const PROTOCOL_VERSION = 1;

export const EMOTION_LABELS = [
  "sadness",
  "joy",
  "love",
  "anger",
  "fear",
  "surprise",
] as const;

export type EmotionLabel = (typeof EMOTION_LABELS)[number];
export type Task = "sentiment" | "emotion";

export interface ScoreRequest {
  id: number;
  task: Task;
  text: string;
}

export type ScoreResponse =
  | { id: number; valence: number; truncated?: boolean }
  | { id: number; scores: Record<EmotionLabel, number>; truncated?: boolean }
  | { id: number; error: string };

export interface Handshake {
  v: number;
  capabilities: Task[];
  model: string;
}

export function serialize(message: object): string {
  return JSON.stringify(message) + "\n";
}

export function parseRequestLine(
  line: string,
): { ok: true; request: ScoreRequest } | { ok: true; hello: true } | { ok: false; error: string } {
  let payload: unknown;
  try {
    payload = JSON.parse(line);
  } catch {
    return { ok: false, error: "unparseable request line" };
  }
  if (typeof payload !== "object" || payload === null) {
    return { ok: false, error: "request is not a JSON object" };
  }
  const obj = payload as Record<string, unknown>;
  if (obj.hello === true) {
    return { ok: true, hello: true };
  }
  if (typeof obj.id !== "number" || !Number.isInteger(obj.id)) {
    return { ok: false, error: "request is missing an integer id" };
  }
  if (obj.task !== "sentiment" && obj.task !== "emotion") {
    return { ok: false, error: `unknown task ${JSON.stringify(obj.task)}` };
  }
  if (typeof obj.text !== "string" || obj.text.length === 0) {
    return { ok: false, error: "request text must be a non-empty string" };
  }
  return {
    ok: true,
    request: { id: obj.id, task: obj.task, text: obj.text },
  };
}

export function validScores(scores: Record<string, number>): scores is Record<EmotionLabel, number> {
  return EMOTION_LABELS.every(
    (label) => typeof scores[label] === "number" && scores[label] >= 0,
  );
}

export function normalizeScores(
  scores: Record<EmotionLabel, number>,
): Record<EmotionLabel, number> {
  let mass = 0;
  for (const label of EMOTION_LABELS) mass += scores[label];
  if (mass <= 0) {
    throw new Error("emotion scores have no positive mass");
  }
  const out = {} as Record<EmotionLabel, number>;
  for (const label of EMOTION_LABELS) out[label] = scores[label] / mass;
  return out;
}
