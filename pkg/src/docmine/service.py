"""HTTP API for annotation campaigns.

Thin FastAPI wiring over :mod:`docmine.annotation`. Responses for the blind
evaluation protocol never carry system identities before submission; the
label-to-system mapping stays server-side and is revealed only in the
submission acknowledgment and in exports.

Routes (documented in docs/api.md and frozen by contract tests):
    GET  /api/next?annotator=ID&protocol=P
    POST /api/annotation
    POST /api/rating
    GET  /api/progress[?annotator=ID]
    GET  /api/export?protocol=P[&aggregate=1]
    GET  /            static UI assets
"""

from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from . import jsonl
from .annotation import PROTOCOL_ANNOTATE, PROTOCOL_EVAL, Campaign
from .errors import NotAssigned, UnknownAnnotator, ValidationError

STATIC_DIR = Path(__file__).parent / "static"


def _pair_view(record, index, total):
    return {
        "pair_id": record["pair_id"],
        "index": index,
        "total": total,
        "qualified_name": record["qualified_name"],
        "code": record["signature"] + ("\n" + record["body_code"] if record["body_code"] else ""),
        "docstring": record["docstring"],
        "has_branch_blocks": record["has_branch_blocks"],
    }


def _assignment_view(assignment, index, total, campaign):
    pair = campaign.pair_record(assignment.example_id) or {}
    code = ""
    if pair:
        code = pair["signature"] + ("\n" + pair["body_code"] if pair["body_code"] else "")
    return {
        "example_id": assignment.example_id,
        "index": index,
        "total": total,
        "code": code,
        # labels only; system identities are withheld until submission
        "candidates": [{"label": c.label, "text": c.text} for c in assignment.candidates],
    }


def create_app(campaign: Campaign, static_dir=None):
    app = FastAPI(title="docmine annotation service", docs_url=None, redoc_url=None)
    app.state.campaign = campaign

    @app.exception_handler(ValidationError)
    async def _validation_error(request: Request, exc: ValidationError):
        return JSONResponse(status_code=422, content={"error": "ValidationError", "fields": exc.field_errors})

    @app.exception_handler(UnknownAnnotator)
    async def _unknown_annotator(request: Request, exc: UnknownAnnotator):
        return JSONResponse(status_code=404, content={"error": "UnknownAnnotator", "detail": str(exc)})

    @app.exception_handler(NotAssigned)
    async def _not_assigned(request: Request, exc: NotAssigned):
        return JSONResponse(status_code=403, content={"error": "NotAssigned", "detail": str(exc)})

    @app.get("/api/next")
    def next_item(annotator: str, protocol: str = Query(default=PROTOCOL_ANNOTATE)):
        if protocol not in (PROTOCOL_ANNOTATE, PROTOCOL_EVAL):
            return JSONResponse(status_code=400, content={"error": "UnknownProtocol", "detail": protocol})
        item = campaign.next_item(annotator, protocol)
        if item is None:
            return {"protocol": protocol, "done": True, "item": None}
        if protocol == PROTOCOL_ANNOTATE:
            view = _pair_view(item["pair"], item["index"], item["total"])
        else:
            view = _assignment_view(item["assignment"], item["index"], item["total"], campaign)
        return {"protocol": protocol, "done": False, "item": view}

    @app.post("/api/annotation")
    async def submit_annotation(request: Request):
        payload = await request.json()
        return campaign.submit_annotation(payload)

    @app.post("/api/rating")
    async def submit_rating(request: Request):
        payload = await request.json()
        return campaign.submit_rating(payload)

    @app.get("/api/progress")
    def progress(annotator: str | None = None):
        return campaign.progress(annotator)

    @app.get("/api/export")
    def export(protocol: str, aggregate: int = 0):
        if protocol not in (PROTOCOL_ANNOTATE, PROTOCOL_EVAL):
            return JSONResponse(status_code=400, content={"error": "UnknownProtocol", "detail": protocol})
        records = campaign.export_records(protocol, aggregate=bool(aggregate))
        lines = [f"# docmine export protocol={protocol} records={len(records)}"]
        lines.extend(jsonl.dumps(r) for r in records)
        return PlainTextResponse("\n".join(lines) + "\n", media_type="application/jsonl")

    directory = Path(static_dir) if static_dir else STATIC_DIR
    if directory.is_dir():
        app.mount("/", StaticFiles(directory=directory, html=True), name="static")
    return app
