// Round-trip against the real annotation service: everything entered through
// the UI state machinery must be accepted first try and re-export byte-equal
// (modulo timestamps) via GET /api/export.
import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, test } from "vitest";

import { ApiClient, PROTOCOL_ANNOTATE, PROTOCOL_EVAL } from "../src/api.js";
import {
  annotationPayload,
  clickCodeLine,
  newAnnotateState,
  newEvalState,
  ratingPayload,
  selectDocRange,
  setAspect,
  setStep,
  toggleSpanMode,
} from "../src/state.js";
import { miniFetch, waitForServer } from "./helpers.js";

const PORT = 8800 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;
const ANNOTATOR = "ui-tester";

const PAIR_BRANCHY = {
  pair_id: "pair-branchy",
  repo_id: "fixture",
  path: "pkg/pick.py",
  qualified_name: "pick",
  signature: "def pick(a, b):",
  body_code: "    if a:\n        return a\n    return b",
  docstring: "Returns a when truthy, otherwise b.",
  start_line: 1,
  end_line: 5,
  code_line_count: 4,
  doc_line_count: 1,
  complexity: 2,
  has_branch_blocks: true,
  repo_stars: 99,
};

const PAIR_PLAIN = {
  ...PAIR_BRANCHY,
  pair_id: "pair-plain",
  qualified_name: "ident",
  signature: "def ident(x):",
  body_code: "    return x",
  docstring: "Gives x back unchanged.",
  code_line_count: 2,
  complexity: 1,
  has_branch_blocks: false,
};

let server: ChildProcess | null = null;
let logs = "";

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), "docmine-ui-"));
  const pairsPath = join(dir, "pairs.jsonl");
  writeFileSync(pairsPath, [PAIR_BRANCHY, PAIR_PLAIN].map((p) => JSON.stringify(p)).join("\n") + "\n");
  const evalPairsPath = join(dir, "eval_pairs.jsonl");
  writeFileSync(evalPairsPath, JSON.stringify(PAIR_BRANCHY) + "\n");
  const candidatesPath = join(dir, "candidates.jsonl");
  writeFileSync(
    candidatesPath,
    [
      { pair_id: "pair-branchy", system: "gen-alpha", candidate: "Selects a if it is truthy." },
      { pair_id: "pair-branchy", system: "gen-beta", candidate: "Falls back to b when a is falsy." },
    ]
      .map((c) => JSON.stringify(c))
      .join("\n") + "\n",
  );

  server = spawn(
    "python3",
    [
      "-m", "docmine.cli", "--seed", "11", "serve",
      "--pairs", pairsPath,
      "--eval-pairs", evalPairsPath,
      "--eval-candidates", candidatesPath,
      "--annotators", ANNOTATOR,
      "--log", join(dir, "records.log.jsonl"),
      "--port", String(PORT),
    ],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  server.stdout?.on("data", (chunk) => (logs += chunk));
  server.stderr?.on("data", (chunk) => (logs += chunk));
  await waitForServer(BASE);
}, 30_000);

afterAll(() => {
  server?.kill("SIGTERM");
});

function stripTimestamps(jsonLine: string): string {
  const record = JSON.parse(jsonLine) as Record<string, unknown>;
  delete record.timestamp;
  return JSON.stringify(record);
}

describe("live service round-trip", () => {
  const client = new ApiClient(BASE, miniFetch as unknown as typeof fetch);

  test("three-step scores and spans re-export byte-equal", async () => {
    const item = await client.nextAnnotation(ANNOTATOR);
    expect(item?.pair_id).toBe("pair-branchy");

    let state = newAnnotateState(item!.pair_id, ANNOTATOR, item!.has_branch_blocks);
    state = setStep(state, 1, 3);
    state = setStep(state, 2, 1);
    state = setStep(state, 3, 2);
    state = toggleSpanMode(state);
    state = clickCodeLine(state, 2);
    state = clickCodeLine(state, 3);
    state = selectDocRange(state, 0, 21);
    const payload = annotationPayload(state);
    await expect(client.submitAnnotation(payload)).resolves.toMatchObject({ ok: true });

    // second pair: no branch blocks, step 2 stays blank
    const next = await client.nextAnnotation(ANNOTATOR);
    expect(next?.pair_id).toBe("pair-plain");
    let plain = newAnnotateState(next!.pair_id, ANNOTATOR, next!.has_branch_blocks);
    plain = setStep(plain, 1, 2);
    await expect(client.submitAnnotation(annotationPayload(plain))).resolves.toMatchObject({ ok: true });
    expect(await client.nextAnnotation(ANNOTATOR)).toBeNull();

    const exported = await client.exportRecords(PROTOCOL_ANNOTATE);
    const lines = exported.split("\n").filter((l) => l && !l.startsWith("#"));
    expect(lines).toHaveLength(2);
    const expected = [
      {
        pair_id: "pair-branchy",
        annotator_id: ANNOTATOR,
        step1: 3,
        step2: 1,
        step3: 2,
        span_links: [{ code_span: [2, 3], doc_span: [0, 21] }],
        schema_version: 1,
      },
      {
        pair_id: "pair-plain",
        annotator_id: ANNOTATOR,
        step1: 2,
        step2: null,
        step3: null,
        span_links: [],
        schema_version: 1,
      },
    ];
    expect(lines.map(stripTimestamps)).toEqual(expected.map((r) => JSON.stringify(r)));
  }, 20_000);

  test("blind ratings unblind only in export, byte-equal modulo timestamps", async () => {
    const item = await client.nextEval(ANNOTATOR);
    expect(item).not.toBeNull();
    // pre-submission payload from the server shows labels only
    expect(JSON.stringify(item)).not.toContain("gen-alpha");
    expect(JSON.stringify(item)).not.toContain("gen-beta");
    expect(item!.candidates).toHaveLength(3); // two systems + hidden original

    let state = newEvalState(item!.example_id, ANNOTATOR, item!.candidates.map((c) => c.label));
    const scorePlan: Record<string, [number, number, number, number]> = {};
    item!.candidates.forEach((candidate, i) => {
      const scores: [number, number, number, number] = [4 - i, 3, (i + 1) % 5, 2];
      scorePlan[candidate.label] = scores;
      state = setAspect(state, candidate.label, "a1", scores[0]);
      state = setAspect(state, candidate.label, "a2", scores[1]);
      state = setAspect(state, candidate.label, "a3", scores[2]);
      state = setAspect(state, candidate.label, "a4", scores[3]);
    });
    const payload = ratingPayload(state);
    const ack = (await client.submitRating(payload)) as { ok: boolean; systems: Record<string, string> };
    expect(ack.ok).toBe(true);
    const revealed = new Set(Object.values(ack.systems));
    expect(revealed).toContain("gen-alpha");
    expect(revealed).toContain("gen-beta");
    expect(await client.nextEval(ANNOTATOR)).toBeNull();

    const exported = await client.exportRecords(PROTOCOL_EVAL);
    const lines = exported.split("\n").filter((l) => l && !l.startsWith("#"));
    expect(lines).toHaveLength(3);
    const expected = [...payload.ratings]
      .map((rating) => ({
        example_id: "pair-branchy",
        system_id: ack.systems[rating.label],
        annotator_id: ANNOTATOR,
        a1: rating.a1,
        a2: rating.a2,
        a3: rating.a3,
        a4: rating.a4,
        overall: (rating.a1 + rating.a2 + rating.a3 + rating.a4) / 4,
        schema_version: 1,
      }));
    expect(lines.map(stripTimestamps).sort()).toEqual(expected.map((r) => JSON.stringify(r)).sort());
  }, 20_000);
});
