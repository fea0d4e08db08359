"""HTTP/JSON API over the session engine.

The client reports raw gestures (dx, vx in card widths); the server owns
gesture resolution and all thresholds, and serves them at ``GET /config``
so clients can mirror transforms without forking the constants.
"""

from __future__ import annotations

import argparse
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .config import DEFAULT_CONFIG, EngineConfig, load_config, resolve_listen_addr
from .engine import (
    SessionEndedError,
    SessionEngine,
    UnknownCardError,
    UnknownSessionError,
)
from .items import load_item_pool
from .lifecycle import IllegalTransition
from .recommender import StaleCardError


class CreateSessionBody(BaseModel):
    student_id: str = Field(min_length=1, max_length=64)


class GestureBody(BaseModel):
    card_id: str
    kind: Literal["drag", "release", "tap"]
    dx: float = 0.0
    vx: float = 0.0
    token: str | None = None


class AnswerBody(BaseModel):
    card_id: str
    correct: bool
    elapsed_s: float = Field(gt=0)
    token: str | None = None


def create_app(engine: SessionEngine) -> FastAPI:
    app = FastAPI(title="swipelearn", version="0.1.0")
    # the browser UI is usually served from its own origin
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(UnknownSessionError)
    @app.exception_handler(UnknownCardError)
    async def _not_found(request: Request, exc: Exception):
        return JSONResponse(status_code=404, content={"error": "not_found", "detail": str(exc)})

    @app.exception_handler(StaleCardError)
    async def _stale(request: Request, exc: StaleCardError):
        return JSONResponse(status_code=409, content={"error": "stale_card", "detail": str(exc)})

    @app.exception_handler(IllegalTransition)
    async def _illegal(request: Request, exc: IllegalTransition):
        return JSONResponse(
            status_code=409,
            content={
                "error": "rejected_transition",
                "state": exc.state.value,
                "event": exc.event.value,
            },
        )

    @app.exception_handler(SessionEndedError)
    async def _ended(request: Request, exc: SessionEndedError):
        return JSONResponse(status_code=409, content={"error": "session_ended", "detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _bad_value(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"error": "invalid_argument", "detail": str(exc)})

    @app.get("/config")
    def get_config() -> dict:
        return engine.cfg.ui_payload()

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict:
        return engine.create_session(body.student_id)

    @app.get("/sessions/{session_id}/stack")
    def get_stack(session_id: str) -> dict:
        return engine.stack_view(session_id)

    @app.post("/sessions/{session_id}/gesture")
    def post_gesture(session_id: str, body: GestureBody) -> dict:
        return engine.gesture(
            session_id, body.card_id, body.kind, dx=body.dx, vx=body.vx, token=body.token
        )

    @app.post("/sessions/{session_id}/answer")
    def post_answer(session_id: str, body: AnswerBody) -> dict:
        return engine.answer(
            session_id,
            body.card_id,
            correct=body.correct,
            elapsed_s=body.elapsed_s,
            token=body.token,
        )

    @app.get("/sessions/{session_id}/progress")
    def get_progress(session_id: str) -> dict:
        return engine.progress(session_id)

    @app.get("/sessions/{session_id}/events")
    def get_events(session_id: str) -> dict:
        return {"session_id": session_id, "events": engine.events_for(session_id)}

    return app


def build_engine(cfg: EngineConfig) -> SessionEngine:
    pool = load_item_pool(cfg.item_pool_path)
    return SessionEngine(pool, cfg, log_path=cfg.event_log_path)


def serve(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="swipelearn serve", description=__doc__)
    parser.add_argument("--config", help="JSON config file (defaults apply when omitted)")
    parser.add_argument("--addr", help="listen address host:port (overrides env and config)")
    args = parser.parse_args(argv)
    cfg = load_config(args.config) if args.config else DEFAULT_CONFIG
    host, port = resolve_listen_addr(cfg, args.addr)
    app = create_app(build_engine(cfg))

    import uvicorn

    uvicorn.run(app, host=host, port=port, log_level="info")
    return 0
