/**
 * Pure view-state logic, kept free of DOM concerns so it unit-tests cleanly.
 *
 * Submission gating: the 3-step form needs step 1 always and step 2 exactly
 * when the pair has outer-level branch blocks; the eval form needs all four
 * aspects on every blinded candidate. Aspect inputs clamp to 0..4 integers,
 * step scores to 0..3.
 */
export function newAnnotateState(pairId, annotatorId, hasBranchBlocks) {
    return {
        pairId,
        annotatorId,
        hasBranchBlocks,
        step1: null,
        step2: null,
        step3: null,
        spanMode: false,
        pendingCodeStart: null,
        pendingCodeSpan: null,
        spanLinks: [],
    };
}
export function clampScore(value, max) {
    const rounded = Math.round(value);
    if (Number.isNaN(rounded))
        return 0;
    return Math.min(max, Math.max(0, rounded));
}
export function setStep(state, step, value) {
    const clamped = clampScore(value, 3);
    if (step === 1)
        return { ...state, step1: clamped };
    if (step === 2) {
        if (!state.hasBranchBlocks)
            return state; // control is hidden; ignore stray input
        return { ...state, step2: clamped };
    }
    return { ...state, step3: clamped };
}
export function canSubmitAnnotation(state) {
    if (state.step1 === null)
        return false;
    if (state.hasBranchBlocks && state.step2 === null)
        return false;
    return true;
}
export function toggleSpanMode(state) {
    if (!state.hasBranchBlocks)
        return state; // span marking belongs to step-2 work
    return { ...state, spanMode: !state.spanMode, pendingCodeStart: null, pendingCodeSpan: null };
}
/** Line clicks while in span mode: first click anchors, second completes
 * the code span, which then waits for a docstring selection. */
export function clickCodeLine(state, line) {
    if (!state.spanMode)
        return state;
    if (state.pendingCodeStart === null) {
        return { ...state, pendingCodeStart: line, pendingCodeSpan: null };
    }
    const start = Math.min(state.pendingCodeStart, line);
    const end = Math.max(state.pendingCodeStart, line);
    return { ...state, pendingCodeStart: null, pendingCodeSpan: [start, end] };
}
/** A docstring selection completes the pending link. */
export function selectDocRange(state, charStart, charEnd) {
    if (!state.spanMode || state.pendingCodeSpan === null || charStart >= charEnd)
        return state;
    const link = { code_span: state.pendingCodeSpan, doc_span: [charStart, charEnd] };
    return { ...state, spanLinks: [...state.spanLinks, link], pendingCodeSpan: null };
}
export function removeSpanLink(state, index) {
    return { ...state, spanLinks: state.spanLinks.filter((_, i) => i !== index) };
}
export function annotationPayload(state) {
    return {
        annotator_id: state.annotatorId,
        pair_id: state.pairId,
        step1: state.step1 ?? 0,
        step2: state.hasBranchBlocks ? state.step2 : null,
        step3: state.step3,
        span_links: state.spanLinks,
    };
}
export function newEvalState(exampleId, annotatorId, labels) {
    const ratings = new Map();
    for (const label of labels) {
        ratings.set(label, { a1: null, a2: null, a3: null, a4: null });
    }
    return { exampleId, annotatorId, ratings };
}
export function setAspect(state, label, aspect, value) {
    const current = state.ratings.get(label);
    if (!current)
        return state;
    const ratings = new Map(state.ratings);
    ratings.set(label, { ...current, [aspect]: clampScore(value, 4) });
    return { ...state, ratings };
}
export function canSubmitEval(state) {
    for (const scores of state.ratings.values()) {
        if (scores.a1 === null || scores.a2 === null || scores.a3 === null || scores.a4 === null) {
            return false;
        }
    }
    return state.ratings.size > 0;
}
export function ratingPayload(state) {
    const ratings = [];
    for (const [label, scores] of state.ratings) {
        ratings.push({
            label,
            a1: scores.a1 ?? 0,
            a2: scores.a2 ?? 0,
            a3: scores.a3 ?? 0,
            a4: scores.a4 ?? 0,
        });
    }
    ratings.sort((a, b) => a.label.localeCompare(b.label));
    return { annotator_id: state.annotatorId, example_id: state.exampleId, ratings };
}
