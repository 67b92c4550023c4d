/**
 * Three-step annotation view: score general adequacy (always), branch-block
 * coverage (only when the pair has outer-level branch blocks, with code/doc
 * span linking), and coherence (optional). Keyboard: 1/2/3 focuses a step,
 * 0-3 scores the focused step, s toggles span mode.
 */
import { annotationPayload, canSubmitAnnotation, clickCodeLine, newAnnotateState, selectDocRange, setStep, toggleSpanMode, } from "./state.js";
import { renderCodeViewer, renderDocstring, scoreButtons, selectionOffsets } from "./render.js";
const STEP_TITLES = {
    1: "Step 1 - General adequacy (0-3)",
    2: "Step 2 - Branch coverage (0-3), mark spans",
    3: "Step 3 - Coherence (0-3, optional)",
};
export function renderAnnotate(doc, item, annotatorId, onSubmit) {
    let state = newAnnotateState(item.pair_id, annotatorId, item.has_branch_blocks);
    let focusedStep = 1;
    const root = doc.createElement("section");
    root.className = "annotate-view";
    const header = doc.createElement("header");
    header.textContent = `${item.qualified_name} (${item.index + 1}/${item.total})`;
    root.appendChild(header);
    const viewer = renderCodeViewer(doc, item.code, (line) => {
        state = clickCodeLine(state, line);
        paintSpans();
    });
    root.appendChild(viewer.element);
    const docPanel = renderDocstring(doc, item.docstring);
    docPanel.addEventListener("mouseup", () => {
        const offsets = selectionOffsets(doc, docPanel);
        if (offsets) {
            state = selectDocRange(state, offsets[0], offsets[1]);
            paintSpans();
        }
    });
    root.appendChild(docPanel);
    const controls = doc.createElement("div");
    controls.className = "step-controls";
    const pickers = {};
    const steps = item.has_branch_blocks ? [1, 2, 3] : [1, 3];
    for (const step of steps) {
        const block = doc.createElement("div");
        block.className = `step step-${step}`;
        const title = doc.createElement("label");
        title.textContent = STEP_TITLES[step];
        block.appendChild(title);
        const picker = scoreButtons(doc, 3, (value) => {
            state = setStep(state, step, value);
            refresh();
        });
        pickers[step] = picker;
        block.appendChild(picker.element);
        controls.appendChild(block);
    }
    root.appendChild(controls);
    let spanToggle = null;
    if (item.has_branch_blocks) {
        spanToggle = doc.createElement("button");
        spanToggle.type = "button";
        spanToggle.className = "span-toggle";
        spanToggle.textContent = "span mode";
        spanToggle.addEventListener("click", () => {
            state = toggleSpanMode(state);
            refresh();
        });
        controls.appendChild(spanToggle);
    }
    const spanList = doc.createElement("ul");
    spanList.className = "span-list";
    root.appendChild(spanList);
    const submit = doc.createElement("button");
    submit.type = "button";
    submit.className = "submit";
    submit.textContent = "submit";
    submit.disabled = true;
    submit.addEventListener("click", () => {
        if (canSubmitAnnotation(state))
            onSubmit(annotationPayload(state));
    });
    root.appendChild(submit);
    function paintSpans() {
        viewer.clearMarks("span-marked");
        viewer.clearMarks("span-anchor");
        for (const link of state.spanLinks) {
            viewer.markSpan(link.code_span[0], link.code_span[1], "span-marked");
        }
        if (state.pendingCodeStart !== null) {
            viewer.markSpan(state.pendingCodeStart, state.pendingCodeStart, "span-anchor");
        }
        if (state.pendingCodeSpan !== null) {
            viewer.markSpan(state.pendingCodeSpan[0], state.pendingCodeSpan[1], "span-anchor");
        }
        spanList.textContent = "";
        state.spanLinks.forEach((link) => {
            const entry = doc.createElement("li");
            entry.textContent =
                `code ${link.code_span[0]}-${link.code_span[1]} <-> doc ${link.doc_span[0]}..${link.doc_span[1]}`;
            spanList.appendChild(entry);
        });
        refresh();
    }
    function refresh() {
        pickers[1]?.setActive(state.step1);
        pickers[2]?.setActive(state.step2);
        pickers[3]?.setActive(state.step3);
        viewer.setSelectable(state.spanMode);
        if (spanToggle)
            spanToggle.classList.toggle("active", state.spanMode);
        submit.disabled = !canSubmitAnnotation(state);
    }
    refresh();
    return {
        element: root,
        state: () => state,
        payload: () => annotationPayload(state),
        handleKey(key) {
            if (key === "s") {
                state = toggleSpanMode(state);
                refresh();
                return;
            }
            if (key === "!" || key === "@" || key === "#") {
                focusedStep = { "!": 1, "@": 2, "#": 3 }[key] ?? 1;
                return;
            }
            if (/^[0-3]$/.test(key)) {
                state = setStep(state, focusedStep, Number(key));
                refresh();
            }
        },
    };
}
