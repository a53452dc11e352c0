"""Local HTTP JSON API for the review workflow.

Serves candidate pairs and inconsistencies to a browser UI, accepts
verdicts, and reports live findings and progress. All errors use the shape
{"error": {"code": ..., "message": ..., "fields": [...]}}.
"""
from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .diffing import InconsistencyRecord
from .errors import RuleDiffError, SubjectNotFoundError, ValidationError
from .triage import (
    PATTERN_LABELS,
    TriageStore,
    TriageVerdict,
    summarize_findings,
)


class VerdictBody(BaseModel):
    reviewer: str
    verdict: str
    pattern: str | None = None
    note: str = ""


def _error_payload(code: str, message: str, fields: list[str]) -> dict:
    return {"error": {"code": code, "message": message, "fields": fields}}


def _paginate(items: list, page: int, size: int) -> dict:
    start = (page - 1) * size
    return {
        "items": items[start : start + size],
        "page": page,
        "size": size,
        "total": len(items),
    }


def attach_rule_details(survivors: list[dict], *catalogs) -> list[dict]:
    """Copy of the survivor dicts with rule title, description, and code
    examples inlined, so the pair-review view can show both rules side by
    side without a second endpoint."""
    rules = {}
    for catalog in catalogs:
        for rule in catalog:
            rules[rule.key] = {
                "title": rule.title,
                "description": rule.description,
                "code_examples": [
                    {"kind": ex.kind, "source_text": ex.source_text}
                    for ex in rule.code_examples
                ],
            }
    enriched = []
    for survivor in survivors:
        out = dict(survivor)
        for side in ("rule_a", "rule_b"):
            ref = survivor[side]
            detail = rules.get((ref["tool"], ref["rule_id"]))
            if detail is not None:
                out[f"{side}_detail"] = detail
        enriched.append(out)
    return enriched


def create_app(
    survivors: list[dict],
    inconsistencies: list[InconsistencyRecord],
    store: TriageStore,
    source_dir: str | Path | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="rulediff review", version=__version__)
    source_root = Path(source_dir) if source_dir else None
    by_pair: dict[str, list[InconsistencyRecord]] = {}
    for record in inconsistencies:
        by_pair.setdefault(record.pair_id, []).append(record)

    @app.exception_handler(RuleDiffError)
    async def _harness_error(request: Request, exc: RuleDiffError):
        status = 404 if isinstance(exc, SubjectNotFoundError) else 400
        return JSONResponse(
            status_code=status,
            content=_error_payload(exc.code, str(exc), exc.fields),
        )

    @app.exception_handler(RequestValidationError)
    async def _body_error(request: Request, exc: RequestValidationError):
        fields = sorted(
            {str(err["loc"][-1]) for err in exc.errors() if err.get("loc")}
        )
        return JSONResponse(
            status_code=400,
            content=_error_payload("validation", "malformed request body", fields),
        )

    def _context_lines(record: InconsistencyRecord) -> list[str] | None:
        if source_root is None:
            return None
        path = source_root / record.project_id / record.file_path
        try:
            lines = path.read_text(encoding="utf-8").splitlines()
        except OSError:
            return None
        anchor = record.line if record.criterion == "line" else record.method.start
        lo = max(0, anchor - 4)
        hi = min(len(lines), anchor + 3)
        return [f"{i + 1}: {lines[i]}" for i in range(lo, hi)]

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/patterns")
    def patterns():
        return {
            "patterns": [
                {"id": pid, "label": label} for pid, label in PATTERN_LABELS.items()
            ]
        }

    @app.get("/candidates")
    def candidates(
        page: int = Query(1, ge=1),
        size: int = Query(50, ge=1, le=500),
        status: str | None = None,
    ):
        items = []
        for survivor in survivors:
            current = store.pair_status(survivor["id"])
            if status and current != status:
                continue
            items.append({**survivor, "status": current})
        return _paginate(items, page, size)

    @app.post("/candidates/{cid}/verdict")
    def post_verdict(cid: str, body: VerdictBody):
        if store.subjects.get(cid) != "pair":
            raise SubjectNotFoundError(f"unknown candidate {cid!r}")
        store.record_verdict(
            TriageVerdict(
                subject=cid,
                reviewer=body.reviewer,
                verdict=body.verdict,
                pattern=body.pattern,
                note=body.note,
            )
        )
        return {"subject": cid, "status": store.pair_status(cid)}

    @app.get("/inconsistencies")
    def list_inconsistencies(
        pair: str | None = None,
        page: int = Query(1, ge=1),
        size: int = Query(50, ge=1, le=500),
    ):
        if pair is not None:
            selected = by_pair.get(pair, [])
        else:
            selected = inconsistencies
        items = []
        for record in selected:
            label = store.inconsistency_label(record.id)
            items.append(
                {
                    **record.to_obj(),
                    "label": (
                        {"verdict": label[0], "pattern": label[1]} if label else None
                    ),
                    "context": _context_lines(record),
                }
            )
        return _paginate(items, page, size)

    @app.post("/inconsistencies/{iid}/label")
    def post_label(iid: str, body: VerdictBody):
        if store.subjects.get(iid) != "inconsistency":
            raise SubjectNotFoundError(f"unknown inconsistency {iid!r}")
        store.record_verdict(
            TriageVerdict(
                subject=iid,
                reviewer=body.reviewer,
                verdict=body.verdict,
                pattern=body.pattern,
                note=body.note,
            )
        )
        label = store.inconsistency_label(iid)
        return {
            "subject": iid,
            "label": {"verdict": label[0], "pattern": label[1]} if label else None,
        }

    @app.get("/report")
    def report():
        summary = summarize_findings(store, inconsistencies)
        summary["confirmed_pairs"] = sorted(store.confirmed_pairs())
        return summary

    @app.get("/progress")
    def progress():
        return store.progress()

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def build_store(
    survivors: list[dict],
    inconsistencies: list[InconsistencyRecord],
    log_path: str | Path | None = None,
    replay: bool = True,
) -> TriageStore:
    """Store with all subjects registered; an existing log is replayed so
    the server resumes where the reviewers left off."""
    store = TriageStore(log_path=log_path)
    for survivor in survivors:
        store.register_pair(survivor["id"])
    for record in inconsistencies:
        store.register_inconsistency(record.id)
    if replay and log_path and Path(log_path).exists():
        store.replay(log_path)
    return store
