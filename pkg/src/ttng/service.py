"""HTTP API for the study: FastAPI wiring around a Study instance.

Task-phase payloads never contain ground-truth labels; analytics endpoints
are meant for the researcher, not participants.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import HTMLResponse, PlainTextResponse, Response as HttpResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .errors import (
    DuplicateResponse,
    TtngError,
    UnknownResponse,
    UnknownSession,
    UnknownTask,
    WrongPhase,
)
from .motifs import MOTIF_NAMES, MotifName
from .render import render_motif_glyph
from .study import Study


class CreateSessionBody(BaseModel):
    participant_id: str = Field(min_length=1)
    seed: int | None = None


class TrainingBody(BaseModel):
    task_id: str
    selected: str


class ResponseBody(BaseModel):
    task_id: str
    selected: str
    confidence: int
    reasoning: str = Field(min_length=1)


class TagsBody(BaseModel):
    tags: list[str]


def _http_error(exc: TtngError) -> HTTPException:
    if isinstance(exc, (UnknownSession, UnknownTask, UnknownResponse)):
        return HTTPException(status_code=404, detail=str(exc))
    if isinstance(exc, (WrongPhase, DuplicateResponse)):
        return HTTPException(status_code=409, detail=str(exc))
    return HTTPException(status_code=400, detail=str(exc))


def create_app(study: Study, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="motif study service")
    glyph_cache: dict[str, str] = {}

    @app.exception_handler(TtngError)
    async def _handle_domain_error(_, exc: TtngError):  # pragma: no cover - thin shim
        raise _http_error(exc)

    @app.post("/sessions")
    def create_session(body: CreateSessionBody) -> dict:
        try:
            session = study.create_session(body.participant_id, body.seed)
        except TtngError as exc:
            raise _http_error(exc)
        return {
            "session_id": session.session_id,
            "participant_id": session.participant_id,
            "set_id": session.set_id,
            "phase": session.phase,
            "training_total": len(session.training_tasks),
            "task_total": len(session.tasks),
        }

    @app.get("/sessions/{session_id}/current")
    def current(session_id: str) -> dict:
        try:
            return study.current_payload(session_id)
        except TtngError as exc:
            raise _http_error(exc)

    @app.post("/sessions/{session_id}/training")
    def training(session_id: str, body: TrainingBody) -> dict:
        try:
            return study.submit_training(session_id, body.task_id, body.selected)
        except TtngError as exc:
            raise _http_error(exc)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.post("/sessions/{session_id}/responses")
    def respond(session_id: str, body: ResponseBody) -> dict:
        try:
            return study.submit_task(
                session_id, body.task_id, body.selected, body.confidence, body.reasoning
            )
        except TtngError as exc:
            raise _http_error(exc)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.get("/analytics/confusion")
    def confusion() -> dict:
        return study.confusion().to_json()

    @app.get("/analytics/accuracy")
    def accuracy() -> dict:
        return study.accuracy()

    @app.get("/analytics/tags")
    def tag_split() -> dict:
        return study.tag_distribution()

    @app.post("/responses/{response_id}/tags")
    def tag(response_id: str, body: TagsBody) -> dict:
        try:
            return study.tag_reasoning(response_id, body.tags)
        except TtngError as exc:
            raise _http_error(exc)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.get("/export")
    def export(format: str = "json"):
        try:
            payload = study.export_responses(format)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        if format == "csv":
            return PlainTextResponse(payload, media_type="text/csv")
        return HttpResponse(payload, media_type="application/json")

    @app.get("/glyphs/{name}.svg")
    def glyph(name: str):
        if name not in {m.value for m in MOTIF_NAMES}:
            raise HTTPException(status_code=404, detail=f"unknown motif {name!r}")
        if name not in glyph_cache:
            glyph_cache[name] = render_motif_glyph(MotifName(name))
        return HttpResponse(glyph_cache[name], media_type="image/svg+xml")

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

        @app.get("/", include_in_schema=False)
        def root() -> HTMLResponse:
            return HTMLResponse('<meta http-equiv="refresh" content="0; url=/ui/">')

    return app


def serve(study: Study, port: int = 8400, ui_dir: str | Path | None = None) -> None:
    """Blocking uvicorn server (used by the CLI)."""
    import uvicorn

    uvicorn.run(create_app(study, ui_dir=ui_dir), host="127.0.0.1", port=port, log_level="warning")
