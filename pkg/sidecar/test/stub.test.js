import assert from "node:assert/strict";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { test } from "node:test";

import { EMOTION_LABELS } from "../dist/protocol.js";
import { StubScorer, loadStubScript, textHash } from "../dist/stub.js";

test("stub valences are deterministic and in range", () => {
  const scorer = new StubScorer();
  const a = scorer.score({ id: 0, task: "sentiment", text: "la nuit tombe" });
  const b = scorer.score({ id: 0, task: "sentiment", text: "la nuit tombe" });
  assert.deepEqual(a, b);
  assert.ok(a.valence >= 0 && a.valence <= 1);
});

test("stub emotion scores carry all labels and sum to one", () => {
  const scorer = new StubScorer();
  const reply = scorer.score({ id: 3, task: "emotion", text: "quelle peur" });
  const sum = EMOTION_LABELS.reduce((acc, label) => acc + reply.scores[label], 0);
  assert.ok(Math.abs(sum - 1) < 1e-9);
});

test("scripted default answers every sentiment request", () => {
  const scorer = new StubScorer({ default: { valence: 0.9 } });
  for (const text of ["a", "b", "autre chose"]) {
    const reply = scorer.score({ id: 1, task: "sentiment", text });
    assert.equal(reply.valence, 0.9);
  }
});

test("per-text script entries win over the default", () => {
  const scorer = new StubScorer({
    default: { valence: 0.5 },
    by_hash: { [textHash("sombre nuit")]: { valence: 0.1 } },
  });
  assert.equal(
    scorer.score({ id: 1, task: "sentiment", text: "sombre nuit" }).valence,
    0.1,
  );
  assert.equal(
    scorer.score({ id: 2, task: "sentiment", text: "claire aube" }).valence,
    0.5,
  );
});

test("script files are validated on load", () => {
  const dir = mkdtempSync(join(tmpdir(), "sidecar-test-"));
  const good = join(dir, "good.json");
  writeFileSync(good, JSON.stringify({ default: { valence: 0.4 } }));
  assert.deepEqual(loadStubScript(good), { default: { valence: 0.4 } });

  const bad = join(dir, "bad.json");
  writeFileSync(bad, JSON.stringify({ default: { valence: 7 } }));
  assert.throws(() => loadStubScript(bad), /valence outside/);

  const badScores = join(dir, "scores.json");
  writeFileSync(badScores, JSON.stringify({ default: { scores: { joy: 1 } } }));
  assert.throws(() => loadStubScript(badScores), /all six labels/);
});
