"""FastAPI application: domains, generation jobs, playtest sessions, adaptation.

All payloads use the same JSON encodings as the on-disk files, errors come
back as ``{"code", "message"}``, and every state-changing session operation
serializes through the session's lock so exactly one action lands per turn.
"""

from __future__ import annotations

import os
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ..gen import adapt as run_adapt
from ..gen import generate as run_generate
from ..loader import (
    DomainFormatError,
    parse_domain_dict,
    parse_mechanics,
    merge_fragments,
    validate_domain,
)
from .jobs import JobManager
from .schemas import (
    ActRequest,
    AdaptRequest,
    DomainUploadResponse,
    JobRequest,
    JobResponse,
    SessionRequest,
)
from .sessions import SessionError, SessionManager
from .store import FileStore, new_id

DEFAULT_DATA_DIR = "mechgen-data"


def _error(status: int, code: str, message: str) -> HTTPException:
    return HTTPException(status_code=status, detail={"code": code, "message": message})


def create_app(data_dir: str | Path | None = None, workers: int = 2) -> FastAPI:
    root = Path(data_dir or os.environ.get("MECH_DATA_DIR") or DEFAULT_DATA_DIR)
    store = FileStore(root)
    jobs = JobManager(store, workers=workers)
    sessions = SessionManager(store)

    app = FastAPI(title="mechgen", version="0.1.0")
    app.state.store = store
    app.state.jobs = jobs
    app.state.sessions = sessions

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"code": "malformed_body", "message": str(exc.errors()[:3])},
        )

    @app.exception_handler(HTTPException)
    async def structured_error(request: Request, exc: HTTPException):
        detail = exc.detail
        if not isinstance(detail, dict):
            detail = {"code": "error", "message": str(detail)}
        return JSONResponse(status_code=exc.status_code, content=detail)

    # -- domains ------------------------------------------------------------

    def _load_domain_doc(domain_id: str) -> dict:
        doc = store.load("domains", domain_id)
        if doc is None:
            raise _error(404, "not_found", f"no domain {domain_id}")
        return doc["document"]

    @app.post("/domains", response_model=DomainUploadResponse)
    async def upload_domain(document: dict | list = Body(...)):
        try:
            if isinstance(document, list):
                document = merge_fragments(document)
            spec = parse_domain_dict(document)
        except DomainFormatError as e:
            raise _error(400, "invalid_domain", str(e))
        report = validate_domain(spec)
        if not report.ok:
            return JSONResponse(
                status_code=400,
                content={
                    "code": "invalid_domain",
                    "message": "validation failed",
                    "violations": [v.to_json() for v in report.violations],
                },
            )
        domain_id = new_id()
        store.save("domains", domain_id, {"id": domain_id, "document": document})
        return DomainUploadResponse(id=domain_id, ok=True)

    @app.get("/domains/{domain_id}")
    async def get_domain(domain_id: str):
        doc = store.load("domains", domain_id)
        if doc is None:
            raise _error(404, "not_found", f"no domain {domain_id}")
        return doc

    # -- generation jobs -----------------------------------------------------

    def _budgets(body) -> dict:
        budgets = {}
        if body.max_candidates is not None:
            budgets["max_candidates"] = body.max_candidates
        if body.time_budget is not None:
            budgets["time_budget"] = body.time_budget
        return budgets

    @app.post("/jobs", response_model=JobResponse)
    async def submit_job(body: JobRequest):
        document = _load_domain_doc(body.domain_id)
        spec = parse_domain_dict(document)
        if body.horizon is not None:
            from dataclasses import replace

            spec = replace(
                spec, playability=replace(spec.playability, horizon=body.horizon)
            )
        budgets = _budgets(body)

        def work():
            return run_generate(spec, **budgets).to_json()

        record = jobs.submit("generate", {"domain_id": body.domain_id}, work)
        return JobResponse(**record)

    @app.post("/adapt", response_model=JobResponse)
    async def submit_adapt(body: AdaptRequest):
        document = _load_domain_doc(body.domain_id)
        spec = parse_domain_dict(document)
        try:
            seed, _ = parse_mechanics(body.seed_mechanics, spec)
        except DomainFormatError as e:
            raise _error(400, "invalid_mechanics", str(e))
        overlay = body.overlay
        budgets = _budgets(body)

        def work():
            return run_adapt(spec, seed, overlay, **budgets).to_json()

        record = jobs.submit("adapt", {"domain_id": body.domain_id}, work)
        return JobResponse(**record)

    @app.get("/jobs/{job_id}", response_model=JobResponse)
    async def get_job(job_id: str):
        record = jobs.get(job_id)
        if record is None:
            raise _error(404, "not_found", f"no job {job_id}")
        return JobResponse(**record)

    # -- sessions -------------------------------------------------------------

    @app.post("/sessions")
    async def create_session(body: SessionRequest):
        if body.domain is not None:
            document = body.domain
        elif body.domain_id is not None:
            document = _load_domain_doc(body.domain_id)
        else:
            raise _error(400, "malformed_body", "domain or domain_id required")
        try:
            ps = sessions.create(document, body.mechanics, body.instance, body.controls)
        except DomainFormatError as e:
            raise _error(400, "invalid_domain", str(e))
        return ps.view()

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        ps = sessions.get(session_id)
        if ps is None:
            raise _error(404, "not_found", f"no session {session_id}")
        return ps.view()

    @app.post("/sessions/{session_id}/act")
    async def act(session_id: str, body: ActRequest):
        try:
            ps = sessions.act(session_id, body.agent, body.action)
        except SessionError as e:
            status = {
                "not_found": 404,
                "out_of_turn": 409,
                "illegal_action": 422,
                "unknown_action": 422,
            }.get(e.code, 400)
            raise _error(status, e.code, str(e))
        return ps.view()

    @app.post("/sessions/{session_id}/reset")
    async def reset(session_id: str):
        try:
            ps = sessions.reset(session_id)
        except SessionError as e:
            raise _error(404, e.code, str(e))
        return ps.view()

    return app
