"""HTTP+JSON surface over SessionService."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from ..llm import LLMError
from ..model import ModelError, NotFound
from ..synthesis import OrchestratorError, PreconditionFailed
from .core import SessionService
from .errors import ServiceError


def _status_for(exc: Exception) -> int:
    if isinstance(exc, ServiceError):
        return exc.status
    if isinstance(exc, NotFound):
        return 404
    if isinstance(exc, PreconditionFailed):
        return 409
    if isinstance(exc, OrchestratorError):
        return 409
    if isinstance(exc, ModelError):
        return 400
    if isinstance(exc, LLMError):
        return 502
    return 500


def _error_response(exc: Exception) -> JSONResponse:
    code = getattr(exc, "code", "internal_error")
    return JSONResponse(
        status_code=_status_for(exc),
        content={"error": {"code": code, "message": str(exc)}},
    )


def build_app(service: SessionService) -> FastAPI:
    app = FastAPI(title="draftsmith session service", docs_url=None, redoc_url=None)
    # the web client is a static page served from a different origin
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ServiceError)
    @app.exception_handler(ModelError)
    @app.exception_handler(OrchestratorError)
    @app.exception_handler(LLMError)
    async def _handle(request: Request, exc: Exception):
        return _error_response(exc)

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        body = await request.json()
        if not isinstance(body, dict):
            body = {}
        return service.create_session(body.get("prompt", ""), body.get("cohort", "full"))

    @app.get("/sessions/{sid}")
    async def get_state(sid: str):
        return service.get_state(sid)

    @app.post("/sessions/{sid}/actions")
    async def apply_action(sid: str, request: Request):
        body = await request.json()
        if not isinstance(body, dict):
            body = {}
        return service.apply_action(sid, body.get("action", ""), body.get("payload") or {})

    @app.post("/sessions/{sid}/finish")
    async def finish(sid: str):
        return Response(content=service.finish_session(sid), media_type="application/json")

    @app.get("/sessions/{sid}/export")
    async def export(sid: str):
        return Response(content=service.export_text(sid), media_type="application/json")

    @app.get("/sessions/{sid}/log")
    async def log(sid: str):
        return Response(content=service.log_lines(sid), media_type="application/x-ndjson")

    return app
