import { describe, expect, test } from "vitest";

import {
  annotationPayload,
  canSubmitAnnotation,
  canSubmitEval,
  clampScore,
  clickCodeLine,
  newAnnotateState,
  newEvalState,
  ratingPayload,
  removeSpanLink,
  selectDocRange,
  setAspect,
  setStep,
  toggleSpanMode,
} from "../src/state.js";
import { AnnotationPayloadSchema, RatingPayloadSchema } from "../src/api.js";

describe("clampScore", () => {
  test("clamps into range and rounds", () => {
    expect(clampScore(-3, 4)).toBe(0);
    expect(clampScore(9, 4)).toBe(4);
    expect(clampScore(2.6, 4)).toBe(3);
    expect(clampScore(Number.NaN, 4)).toBe(0);
  });
});

describe("three-step submission gating", () => {
  test("step one alone is enough without branch blocks", () => {
    let state = newAnnotateState("p1", "alice", false);
    expect(canSubmitAnnotation(state)).toBe(false);
    state = setStep(state, 1, 2);
    expect(canSubmitAnnotation(state)).toBe(true);
  });

  test("branch blocks require step two as well", () => {
    let state = newAnnotateState("p1", "alice", true);
    state = setStep(state, 1, 3);
    expect(canSubmitAnnotation(state)).toBe(false);
    state = setStep(state, 2, 1);
    expect(canSubmitAnnotation(state)).toBe(true);
  });

  test("step two input is ignored when not applicable", () => {
    let state = newAnnotateState("p1", "alice", false);
    state = setStep(state, 2, 3);
    expect(state.step2).toBeNull();
  });
});

describe("span selection flow", () => {
  test("span mode gates line clicks and doc selections", () => {
    let state = newAnnotateState("p1", "alice", true);
    state = clickCodeLine(state, 3); // span mode off: ignored
    expect(state.pendingCodeStart).toBeNull();
    state = toggleSpanMode(state);
    state = clickCodeLine(state, 5);
    expect(state.pendingCodeStart).toBe(5);
    state = clickCodeLine(state, 2); // order normalizes
    expect(state.pendingCodeSpan).toEqual([2, 5]);
    state = selectDocRange(state, 4, 19);
    expect(state.spanLinks).toEqual([{ code_span: [2, 5], doc_span: [4, 19] }]);
    expect(state.pendingCodeSpan).toBeNull();
  });

  test("span mode is unavailable without branch blocks", () => {
    let state = newAnnotateState("p1", "alice", false);
    state = toggleSpanMode(state);
    expect(state.spanMode).toBe(false);
  });

  test("empty doc selection completes nothing", () => {
    let state = newAnnotateState("p1", "alice", true);
    state = toggleSpanMode(state);
    state = clickCodeLine(state, 1);
    state = clickCodeLine(state, 1);
    state = selectDocRange(state, 7, 7);
    expect(state.spanLinks).toEqual([]);
  });

  test("links can be removed", () => {
    let state = newAnnotateState("p1", "alice", true);
    state = toggleSpanMode(state);
    state = clickCodeLine(state, 1);
    state = clickCodeLine(state, 2);
    state = selectDocRange(state, 0, 5);
    state = removeSpanLink(state, 0);
    expect(state.spanLinks).toEqual([]);
  });
});

describe("payload construction", () => {
  test("annotation payload validates against the wire schema", () => {
    let state = newAnnotateState("p1", "alice", true);
    state = setStep(state, 1, 2);
    state = setStep(state, 2, 1);
    state = toggleSpanMode(state);
    state = clickCodeLine(state, 2);
    state = clickCodeLine(state, 4);
    state = selectDocRange(state, 0, 12);
    const payload = annotationPayload(state);
    expect(() => AnnotationPayloadSchema.parse(payload)).not.toThrow();
    expect(payload.step3).toBeNull();
  });

  test("eval submission requires every aspect of every candidate", () => {
    let state = newEvalState("e1", "alice", ["A", "B"]);
    expect(canSubmitEval(state)).toBe(false);
    for (const label of ["A", "B"]) {
      state = setAspect(state, label, "a1", 4);
      state = setAspect(state, label, "a2", 3);
      state = setAspect(state, label, "a3", 2);
    }
    expect(canSubmitEval(state)).toBe(false); // a4 still missing
    state = setAspect(state, "A", "a4", 1);
    state = setAspect(state, "B", "a4", 0);
    expect(canSubmitEval(state)).toBe(true);
    const payload = ratingPayload(state);
    expect(() => RatingPayloadSchema.parse(payload)).not.toThrow();
    expect(payload.ratings.map((r) => r.label)).toEqual(["A", "B"]);
  });

  test("aspect values clamp to the likert range", () => {
    let state = newEvalState("e1", "alice", ["A"]);
    state = setAspect(state, "A", "a1", 11);
    expect(state.ratings.get("A")?.a1).toBe(4);
  });
});
