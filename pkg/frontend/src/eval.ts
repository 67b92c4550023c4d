/**
 * Blind evaluation view: one source function with every candidate docstring
 * behind a neutral label, four 0-4 aspect ratings per candidate, and one
 * atomic submission covering the whole assignment. Nothing in this view
 * ever sees a system identity; the server only reveals the mapping in the
 * submission acknowledgment.
 */

import type { EvalItem, RatingPayload } from "./api.js";
import { EvalState, canSubmitEval, newEvalState, ratingPayload, setAspect } from "./state.js";
import { renderCodeViewer, renderDocstring, scoreButtons } from "./render.js";

const ASPECTS = [
  ["a1", "A1 adequacy"],
  ["a2", "A2 coverage"],
  ["a3", "A3 coherence"],
  ["a4", "A4 fluency"],
] as const;

export interface EvalView {
  element: HTMLElement;
  state(): EvalState;
  payload(): RatingPayload;
  handleKey(key: string): void;
}

export function renderEval(
  doc: Document,
  item: EvalItem,
  annotatorId: string,
  onSubmit: (payload: RatingPayload) => void,
): EvalView {
  let state = newEvalState(item.example_id, annotatorId, item.candidates.map((c) => c.label));
  let focused: { label: string; aspect: (typeof ASPECTS)[number][0] } = {
    label: item.candidates[0]?.label ?? "",
    aspect: "a1",
  };

  const root = doc.createElement("section");
  root.className = "eval-view";

  const header = doc.createElement("header");
  header.textContent = `example ${item.index + 1}/${item.total} - rate every candidate`;
  root.appendChild(header);

  root.appendChild(renderCodeViewer(doc, item.code, () => undefined).element);

  const panels = doc.createElement("div");
  panels.className = "candidate-panels";
  const pickers = new Map<string, Map<string, ReturnType<typeof scoreButtons>>>();
  for (const candidate of item.candidates) {
    const panel = doc.createElement("article");
    panel.className = "candidate";
    panel.dataset.label = candidate.label;
    const title = doc.createElement("h3");
    title.textContent = `Candidate ${candidate.label}`;
    panel.appendChild(title);
    panel.appendChild(renderDocstring(doc, candidate.text));
    const aspectPickers = new Map<string, ReturnType<typeof scoreButtons>>();
    for (const [aspect, label] of ASPECTS) {
      const row = doc.createElement("div");
      row.className = `aspect aspect-${aspect}`;
      const caption = doc.createElement("label");
      caption.textContent = label;
      row.appendChild(caption);
      const picker = scoreButtons(doc, 4, (value) => {
        state = setAspect(state, candidate.label, aspect, value);
        focused = { label: candidate.label, aspect };
        refresh();
      });
      aspectPickers.set(aspect, picker);
      row.appendChild(picker.element);
      panel.appendChild(row);
    }
    pickers.set(candidate.label, aspectPickers);
    panels.appendChild(panel);
  }
  root.appendChild(panels);

  const submit = doc.createElement("button");
  submit.type = "button";
  submit.className = "submit";
  submit.textContent = "submit all ratings";
  submit.disabled = true;
  submit.addEventListener("click", () => {
    if (canSubmitEval(state)) onSubmit(ratingPayload(state));
  });
  root.appendChild(submit);

  function refresh() {
    for (const [label, aspectPickers] of pickers) {
      const scores = state.ratings.get(label);
      for (const [aspect, picker] of aspectPickers) {
        picker.setActive(scores ? (scores[aspect as keyof typeof scores] as number | null) : null);
      }
    }
    submit.disabled = !canSubmitEval(state);
  }

  refresh();
  return {
    element: root,
    state: () => state,
    payload: () => ratingPayload(state),
    handleKey(key) {
      if (/^[0-4]$/.test(key) && focused.label) {
        state = setAspect(state, focused.label, focused.aspect, Number(key));
        refresh();
      }
    },
  };
}
