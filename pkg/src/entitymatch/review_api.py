"""HTTP API over a run's review queue, registry, and metrics.

Serves the review console: list and inspect queued cases, record decisions,
reopen resolved ones, and expose the run's evaluation table. All success
bodies carry a ``schema`` version field; all error bodies are exactly
``{"code": ..., "message": ...}``.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from .models import ModelError, RejectReason, RejectReasonKind, ResolutionLabel
from .pipeline import RunDirectory, apply_review_decision, reprocess_case
from .stores import (
    QueueEntry,
    QueueLookupError,
    QueueStateError,
    QueueValidationError,
)

__all__ = ["SCHEMA_VERSION", "create_app", "serve"]

SCHEMA_VERSION = 1

_STATUS_FILTERS = ("pending", "resolved", "all")


class ApiError(Exception):
    """Error with a machine-readable code; rendered as ``{code, message}``."""

    def __init__(self, status_code: int, code: str, message: str):
        super().__init__(message)
        self.status_code = status_code
        self.code = code
        self.message = message


class DecisionBody(BaseModel):
    decision: str
    reviewer: str = ""
    reason: Optional[dict[str, Any]] = None


class ReprocessBody(BaseModel):
    reviewer: str = ""


def _case_summary(entry: QueueEntry) -> dict[str, Any]:
    case = entry.case
    return {
        "case_id": case.case_id,
        "declared_name": case.record.company_name,
        "country": case.record.country,
        "official_name": case.reference.official_name,
        "previous_names": list(case.reference.previous_names),
        "scores": dict(case.scores),
        "verdicts": {name: label.value for name, label in case.verdicts.items()},
        "status": entry.status.value,
        "enqueued_at": entry.enqueued_at,
        "resolution": case.resolution.value if case.resolution else None,
        "assigned_code": case.assigned_code,
    }


def _case_detail(entry: QueueEntry) -> dict[str, Any]:
    detail = _case_summary(entry)
    detail["record"] = entry.case.record.to_dict()
    detail["reject_reasons"] = [reason.to_dict() for reason in entry.case.reject_reasons]
    detail["legal_form_verdict"] = (
        entry.case.legal_form_verdict.to_dict() if entry.case.legal_form_verdict else None
    )
    detail["raw_responses"] = dict(entry.case.raw_responses)
    detail["audit"] = [event.to_dict() for event in entry.audit]
    return detail


def _parse_reason(raw: Optional[dict[str, Any]]) -> Optional[RejectReason]:
    if raw is None:
        return None
    try:
        kind = RejectReasonKind(str(raw.get("kind", "")))
        return RejectReason(kind, str(raw.get("detail", "")))
    except (ValueError, ModelError) as exc:
        valid = ", ".join(k.value for k in RejectReasonKind)
        raise ApiError(422, "invalid_reason", f"{exc} (valid kinds: {valid})") from exc


def create_app(run_dir_path: Path | str) -> FastAPI:
    """Build the API application serving one run directory."""
    app = FastAPI(title="entitymatch review API", version="1.0")
    # The browser console may be served from a different origin (a static
    # file server) than this loopback API, so answer cross-origin requests.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["Content-Type"],
    )
    run_dir = RunDirectory(run_dir_path)
    mutex = threading.Lock()

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status_code, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(StarletteHTTPException)
    async def handle_http_error(request: Request, exc: StarletteHTTPException) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status_code,
            content={"code": f"http_{exc.status_code}", "message": str(exc.detail)},
        )

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=422, content={"code": "invalid_request", "message": str(exc.errors())}
        )

    @app.get("/cases")
    def list_cases(status: str = "pending", offset: int = 0, limit: int = 100) -> dict[str, Any]:
        if status not in _STATUS_FILTERS:
            raise ApiError(
                400, "bad_status",
                f"status must be one of {', '.join(_STATUS_FILTERS)}, got {status!r}",
            )
        if offset < 0 or limit < 0:
            raise ApiError(400, "bad_page", "offset and limit must be >= 0")
        if status == "pending":
            entries = run_dir.queue.pending()
        elif status == "resolved":
            entries = run_dir.queue.resolved()
        else:
            entries = run_dir.queue.all_entries()
        page = entries[offset : offset + limit]
        return {
            "schema": SCHEMA_VERSION,
            "total": len(entries),
            "cases": [_case_summary(entry) for entry in page],
        }

    @app.get("/cases/{case_id}")
    def get_case(case_id: str) -> dict[str, Any]:
        try:
            entry = run_dir.queue.get(case_id)
        except QueueLookupError as exc:
            raise ApiError(404, "unknown_case", str(exc)) from exc
        return {"schema": SCHEMA_VERSION, "case": _case_detail(entry)}

    @app.post("/cases/{case_id}/decision")
    def post_decision(case_id: str, body: DecisionBody) -> dict[str, Any]:
        if body.decision not in (
            ResolutionLabel.ACCEPTED.value,
            ResolutionLabel.REJECTED.value,
        ):
            raise ApiError(
                422, "invalid_decision",
                f"decision must be Accepted or Rejected, got {body.decision!r}",
            )
        reason = _parse_reason(body.reason)
        with mutex:
            try:
                case = apply_review_decision(
                    run_dir, case_id, ResolutionLabel(body.decision), body.reviewer, reason
                )
            except QueueLookupError as exc:
                raise ApiError(404, "unknown_case", str(exc)) from exc
            except QueueStateError as exc:
                raise ApiError(409, "not_pending", str(exc)) from exc
            except QueueValidationError as exc:
                raise ApiError(422, "invalid_decision", str(exc)) from exc
        return {"schema": SCHEMA_VERSION, "case": _case_detail(run_dir.queue.get(case.case_id))}

    @app.post("/cases/{case_id}/reprocess")
    def post_reprocess(case_id: str, body: Optional[ReprocessBody] = None) -> dict[str, Any]:
        reviewer = body.reviewer if body else ""
        with mutex:
            try:
                case = reprocess_case(run_dir, case_id, reviewer)
            except QueueLookupError as exc:
                raise ApiError(404, "unknown_case", str(exc)) from exc
            except QueueStateError as exc:
                raise ApiError(409, "not_resolved", str(exc)) from exc
        return {"schema": SCHEMA_VERSION, "case": _case_detail(run_dir.queue.get(case.case_id))}

    @app.get("/metrics")
    def get_metrics() -> dict[str, Any]:
        rows = run_dir.metrics_rows()
        if rows is None:
            raise ApiError(404, "no_metrics", "this run has no evaluated metrics")
        return {"schema": SCHEMA_VERSION, "rows": [row.to_dict() for row in rows]}

    @app.get("/schema/reject-reasons")
    def get_reject_reasons() -> dict[str, Any]:
        return {
            "schema": SCHEMA_VERSION,
            "reasons": [kind.value for kind in RejectReasonKind],
        }

    return app


def serve(run_dir_path: Path | str, bind: str = "127.0.0.1", port: int = 8720) -> None:
    """Run the API under uvicorn; binds to loopback unless told otherwise."""
    import uvicorn

    uvicorn.run(create_app(run_dir_path), host=bind, port=port, log_level="warning")
