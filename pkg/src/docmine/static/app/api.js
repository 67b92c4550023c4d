/**
 * Typed client for the annotation service HTTP API.
 *
 * The zod schemas mirror the wire formats in docs/api.md exactly; the
 * contract tests build payloads through the same helpers the app uses, so a
 * payload that validates here is accepted by the server on the first try.
 */
import { z } from "zod";
export const PROTOCOL_ANNOTATE = "annotate3step";
export const PROTOCOL_EVAL = "eval4aspect";
const score03 = z.number().int().min(0).max(3);
const score04 = z.number().int().min(0).max(4);
export const SpanLinkSchema = z.object({
    code_span: z.tuple([z.number().int().min(1), z.number().int().min(1)]),
    doc_span: z.tuple([z.number().int().min(0), z.number().int().min(0)]),
});
export const AnnotationPayloadSchema = z.object({
    annotator_id: z.string().min(1),
    pair_id: z.string().min(1),
    step1: score03,
    step2: score03.nullable(),
    step3: score03.nullable(),
    span_links: z.array(SpanLinkSchema),
});
export const RatingEntrySchema = z.object({
    label: z.string().min(1),
    a1: score04,
    a2: score04,
    a3: score04,
    a4: score04,
});
export const RatingPayloadSchema = z.object({
    annotator_id: z.string().min(1),
    example_id: z.string().min(1),
    ratings: z.array(RatingEntrySchema).min(1),
});
export const AnnotateItemSchema = z.object({
    pair_id: z.string(),
    index: z.number().int(),
    total: z.number().int(),
    qualified_name: z.string(),
    code: z.string(),
    docstring: z.string(),
    has_branch_blocks: z.boolean(),
});
export const EvalCandidateSchema = z.object({
    label: z.string(),
    text: z.string(),
});
export const EvalItemSchema = z.object({
    example_id: z.string(),
    index: z.number().int(),
    total: z.number().int(),
    code: z.string(),
    candidates: z.array(EvalCandidateSchema).min(1),
});
export const NextResponseSchema = z.object({
    protocol: z.string(),
    done: z.boolean(),
    item: z.unknown().nullable(),
});
export class ApiError extends Error {
    constructor(message, status, fields = {}) {
        super(message);
        this.status = status;
        this.fields = fields;
    }
}
async function parseFailure(response) {
    let fields = {};
    let detail = `${response.status}`;
    try {
        const body = await response.json();
        if (body && typeof body === "object") {
            detail = body.error ?? detail;
            fields = body.fields ?? {};
        }
    }
    catch {
        // non-JSON error body; keep the status text
    }
    return new ApiError(detail, response.status, fields);
}
export class ApiClient {
    constructor(baseUrl = "", fetchImpl = fetch) {
        this.baseUrl = baseUrl;
        this.fetchImpl = fetchImpl;
    }
    async get(path) {
        const response = await this.fetchImpl(this.baseUrl + path);
        if (!response.ok)
            throw await parseFailure(response);
        return response.json();
    }
    async post(path, payload) {
        const response = await this.fetchImpl(this.baseUrl + path, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(payload),
        });
        if (!response.ok)
            throw await parseFailure(response);
        return response.json();
    }
    async nextAnnotation(annotator) {
        const body = NextResponseSchema.parse(await this.get(`/api/next?annotator=${encodeURIComponent(annotator)}&protocol=${PROTOCOL_ANNOTATE}`));
        return body.done ? null : AnnotateItemSchema.parse(body.item);
    }
    async nextEval(annotator) {
        const body = NextResponseSchema.parse(await this.get(`/api/next?annotator=${encodeURIComponent(annotator)}&protocol=${PROTOCOL_EVAL}`));
        return body.done ? null : EvalItemSchema.parse(body.item);
    }
    async submitAnnotation(payload) {
        return this.post("/api/annotation", AnnotationPayloadSchema.parse(payload));
    }
    async submitRating(payload) {
        return this.post("/api/rating", RatingPayloadSchema.parse(payload));
    }
    async progress(annotator) {
        return this.get(`/api/progress?annotator=${encodeURIComponent(annotator)}`);
    }
    async exportRecords(protocol) {
        const response = await this.fetchImpl(this.baseUrl + `/api/export?protocol=${protocol}`);
        if (!response.ok)
            throw await parseFailure(response);
        return response.text();
    }
}
