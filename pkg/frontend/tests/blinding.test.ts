// @vitest-environment happy-dom
import { describe, expect, test } from "vitest";

import { RatingPayloadSchema, type AnnotateItem, type EvalItem } from "../src/api.js";
import { renderAnnotate } from "../src/annotate.js";
import { renderEval } from "../src/eval.js";

// Identities only the server knows; none of these may ever reach the DOM
// before submission.
const HIDDEN_SYSTEMS = ["gpt-large-r-r", "encdec-refined", "reference", "system_id"];

const EVAL_ITEM: EvalItem = {
  example_id: "ex1",
  index: 0,
  total: 3,
  code: "def pick(a, b):\n    if a:\n        return a\n    return b",
  candidates: [
    { label: "A", text: "Returns a when truthy, otherwise b." },
    { label: "B", text: "Picks the first argument if set." },
    { label: "C", text: "Chooses between a and b based on truthiness of a." },
  ],
};

function renderedHtml(element: HTMLElement): string {
  document.body.textContent = "";
  document.body.appendChild(element);
  return document.documentElement.innerHTML;
}

describe("blind evaluation view", () => {
  test("walks a full assignment without leaking any system identity", () => {
    let submitted: unknown = null;
    const view = renderEval(document, EVAL_ITEM, "alice", (payload) => {
      submitted = payload;
    });
    const html = renderedHtml(view.element);
    for (const hidden of HIDDEN_SYSTEMS) {
      expect(html).not.toContain(hidden);
    }
    expect(html).toContain("Candidate A");
    expect(html).toContain("Candidate C");

    // rate every aspect of every candidate through the buttons
    const submit = view.element.querySelector<HTMLButtonElement>("button.submit")!;
    expect(submit.disabled).toBe(true);
    for (const panel of view.element.querySelectorAll("article.candidate")) {
      for (const row of panel.querySelectorAll(".aspect")) {
        const buttons = row.querySelectorAll("button");
        (buttons[3] as HTMLButtonElement).click(); // score 3
      }
    }
    expect(submit.disabled).toBe(false);

    // the document still shows no identities after rating, before submit
    for (const hidden of HIDDEN_SYSTEMS) {
      expect(document.documentElement.innerHTML).not.toContain(hidden);
    }

    submit.click();
    expect(submitted).not.toBeNull();
    const parsed = RatingPayloadSchema.parse(submitted);
    expect(parsed.ratings).toHaveLength(3);
    for (const rating of parsed.ratings) {
      expect([rating.a1, rating.a2, rating.a3, rating.a4]).toEqual([3, 3, 3, 3]);
    }
  });

  test("partial ratings keep submission disabled", () => {
    const view = renderEval(document, EVAL_ITEM, "alice", () => undefined);
    const firstPanel = view.element.querySelector("article.candidate")!;
    for (const row of firstPanel.querySelectorAll(".aspect")) {
      (row.querySelectorAll("button")[2] as HTMLButtonElement).click();
    }
    const submit = view.element.querySelector<HTMLButtonElement>("button.submit")!;
    expect(submit.disabled).toBe(true);
  });

  test("keyboard scores the focused aspect", () => {
    const view = renderEval(document, EVAL_ITEM, "alice", () => undefined);
    view.handleKey("4");
    expect(view.state().ratings.get("A")?.a1).toBe(4);
  });
});

const BRANCHY_ITEM: AnnotateItem = {
  pair_id: "p1",
  index: 0,
  total: 2,
  qualified_name: "pkg.pick",
  code: "def pick(a, b):\n    if a:\n        return a\n    return b",
  docstring: "Returns a when truthy, otherwise b.",
  has_branch_blocks: true,
};

describe("three-step annotation view", () => {
  test("step-2 control present only for branch-bearing pairs", () => {
    const branchy = renderAnnotate(document, BRANCHY_ITEM, "alice", () => undefined);
    expect(branchy.element.querySelector(".step-2")).not.toBeNull();
    const straight = renderAnnotate(
      document,
      { ...BRANCHY_ITEM, has_branch_blocks: false },
      "alice",
      () => undefined,
    );
    expect(straight.element.querySelector(".step-2")).toBeNull();
    expect(straight.element.querySelector(".span-toggle")).toBeNull();
  });

  test("line clicks only mark spans in span mode", () => {
    const view = renderAnnotate(document, BRANCHY_ITEM, "alice", () => undefined);
    const lines = view.element.querySelectorAll<HTMLElement>(".code-line");
    lines[1].click();
    expect(view.state().pendingCodeStart).toBeNull();
    (view.element.querySelector(".span-toggle") as HTMLButtonElement).click();
    lines[1].click();
    lines[2].click();
    expect(view.state().pendingCodeSpan).toEqual([2, 3]);
  });

  test("submit stays disabled until applicable scores are set", () => {
    const view = renderAnnotate(document, BRANCHY_ITEM, "alice", () => undefined);
    const submit = view.element.querySelector<HTMLButtonElement>("button.submit")!;
    expect(submit.disabled).toBe(true);
    const stepOne = view.element.querySelector(".step-1")!;
    (stepOne.querySelectorAll("button")[2] as HTMLButtonElement).click();
    expect(submit.disabled).toBe(true); // step 2 still required
    const stepTwo = view.element.querySelector(".step-2")!;
    (stepTwo.querySelectorAll("button")[1] as HTMLButtonElement).click();
    expect(submit.disabled).toBe(false);
  });

  test("code is rendered with line numbers and keyword coloring", () => {
    const view = renderAnnotate(document, BRANCHY_ITEM, "alice", () => undefined);
    const html = renderedHtml(view.element);
    expect(view.element.querySelectorAll(".code-line").length).toBe(4);
    expect(html).toContain("tok-keyword");
    expect(html).toContain("line-number");
  });
});
