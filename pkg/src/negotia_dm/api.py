"""HTTP chat API: a thin FastAPI layer over the session store."""

from __future__ import annotations

from typing import Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field

from .ddd import SchemaError, XmlSyntaxError
from .engine import InvalidDomain
from .kb import FixtureFormatError
from .service import (
    DEFAULT_DDD,
    DEFAULT_FIXTURE,
    SessionBusy,
    SessionStore,
    UnknownSession,
)


class SessionCreateRequest(BaseModel):
    domain: str | None = Field(default=None, description="DDD file path or packaged name")
    fixture: str | None = Field(default=None, description="fixture file path or packaged name")


class StateSummary(BaseModel):
    constraints: dict[str, str]
    declined: list[str]
    last_count: int | None
    qud: str | None
    goal_stack: list[dict]
    alternatives_count: int | None
    ended: bool


class SessionCreateResponse(BaseModel):
    session_id: str
    system_text: str
    state: StateSummary


class UtteranceRequest(BaseModel):
    text: str


class UtteranceResponse(BaseModel):
    system_text: str
    state: StateSummary


class TranscriptTurn(BaseModel):
    speaker: Literal["U", "S"]
    text: str


class SessionGetResponse(BaseModel):
    session_id: str
    transcript: list[TranscriptTurn]
    state: StateSummary


def create_app(
    store: SessionStore | None = None,
    default_ddd: str = DEFAULT_DDD,
    default_fixture: str = DEFAULT_FIXTURE,
) -> FastAPI:
    app = FastAPI(title="negotia-dm", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions = store if store is not None else SessionStore()

    @app.exception_handler(RequestValidationError)
    async def invalid_body(request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.exception_handler(UnknownSession)
    async def unknown_session(request: Request, exc: UnknownSession) -> JSONResponse:
        return JSONResponse(status_code=404, content={"detail": "unknown session"})

    @app.exception_handler(SessionBusy)
    async def busy_session(request: Request, exc: SessionBusy) -> JSONResponse:
        return JSONResponse(status_code=409, content={"detail": "session is busy with another utterance"})

    @app.post("/sessions", response_model=SessionCreateResponse, status_code=201)
    def create_session(body: SessionCreateRequest | None = None) -> SessionCreateResponse:
        body = body or SessionCreateRequest()
        try:
            session = sessions.create_session(
                body.domain or default_ddd,
                body.fixture or default_fixture,
            )
        except (InvalidDomain, SchemaError, XmlSyntaxError, FixtureFormatError, FileNotFoundError) as exc:
            return JSONResponse(status_code=400, content={"detail": str(exc)})  # type: ignore[return-value]
        return SessionCreateResponse(
            session_id=session.id,
            system_text=session.greeting,
            state=StateSummary(**sessions.summary(session.id)),
        )

    @app.post("/sessions/{session_id}/utterances", response_model=UtteranceResponse)
    def post_utterance(session_id: str, body: UtteranceRequest) -> UtteranceResponse:
        system_text, summary = sessions.post_utterance(session_id, body.text)
        return UtteranceResponse(system_text=system_text, state=StateSummary(**summary))

    @app.get("/sessions/{session_id}", response_model=SessionGetResponse)
    def get_session(session_id: str) -> SessionGetResponse:
        session = sessions.get(session_id)
        return SessionGetResponse(
            session_id=session.id,
            transcript=[TranscriptTurn(speaker=s, text=t) for s, t in session.transcript],
            state=StateSummary(**sessions.summary(session.id)),
        )

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str) -> Response:
        sessions.delete(session_id)
        return Response(status_code=204)

    return app
