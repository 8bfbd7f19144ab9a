"""HTTP face of the library: JSON API plus a server-sent event stream.

The app is a thin adapter over :class:`~modelgate.assessor.Engine`: every
mutation route calls the corresponding engine method, and the engine's
event callbacks feed an in-memory log that `/api/events` replays and tails.
Event ids are per-process and monotonically increasing; reconnecting
clients pass ``?since=<last seen id>`` to resume.

A writable server holds the library's writer lock for its whole lifetime,
which is what makes it the single mutation path while it runs (the CLI's
own mutations then fail fast with `locked`). Read-only servers take no
lock, serve GETs only, and answer mutations with 403.

GET handlers never write, not even an assessment cache refresh, so any
number of servers over the same root give identical answers.
"""

from __future__ import annotations

import asyncio
import json
import os
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .assessor import (
    Engine,
    assess_snapshot,
    attestation_row,
    override_row,
    review_row,
    snapshot_row,
)
from .errors import ModelGateError
from .store import LibraryStore

# every machine code an operation can raise, mapped to one status
STATUS_OF_CODE = {
    "unknown_entry": 404,
    "unknown_review": 404,
    "unknown_override": 404,
    "duplicate_entry": 409,
    "illegal_transition": 409,
    "locked": 409,
    "read_only": 403,
}
DEFAULT_STATUS = 422  # parse_error, not_weak_attribute, not_medium_metric, ...


class ReadOnlyServer(ModelGateError):
    code = "read_only"


class EntryCreate(BaseModel):
    entry_id: str
    source_text: str
    author: str = ""


class SnapshotCreate(BaseModel):
    source_text: str
    author: str = ""


class ReviewCreate(BaseModel):
    hat: str
    text: str


class ReviewPatch(BaseModel):
    status: str


class AttestationCreate(BaseModel):
    attribute: str
    verdict: str
    reviewer: str = ""


class OverrideCreate(BaseModel):
    metric_id: str
    element_path: str
    justification: str = ""
    author: str = ""


def _cached_report(engine: Engine, entry_id: str) -> dict:
    """Last assessment as stored; computed fresh (but not cached) when an
    entry has somehow never been assessed. Never writes."""
    cached = engine.store.load_last_assessment(entry_id)
    if cached is not None:
        return cached
    return assess_snapshot(engine.store, entry_id, engine.config, save=False).to_json_dict()


def create_app(
    root: Path | str, read_only: bool = False, dashboard_dir: Path | str | None = None
) -> FastAPI:
    store = LibraryStore(root)
    engine = Engine(store)

    events: list[dict] = []

    def record(event: dict) -> None:
        events.append({"id": len(events) + 1, **event})

    engine.subscribe(record)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if not read_only:
            store.lock.acquire()  # single mutation path while serving
        try:
            yield
        finally:
            if not read_only:
                store.lock.release()

    app = FastAPI(title="modelgate", lifespan=lifespan)

    @app.exception_handler(ModelGateError)
    async def domain_error(request: Request, exc: ModelGateError):
        status = STATUS_OF_CODE.get(exc.code, DEFAULT_STATUS)
        return JSONResponse(status_code=status, content={"code": exc.code, "message": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def invalid_request(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422, content={"code": "invalid_request", "message": str(exc)}
        )

    def guard_writes() -> None:
        if read_only:
            raise ReadOnlyServer("this server is read-only; mutate through the primary")

    def entry_summary(entry_id: str) -> dict:
        entry = store.get_entry(entry_id)
        report = _cached_report(engine, entry_id)
        return {
            "entry_id": entry.entry_id,
            "created_at": entry.created_at,
            "head": snapshot_row(entry.head),
            "stage": report["stage"],
            "color": report["color"],
            "finding_count": len(report["findings"]),
            "review_count": len(store.reviews(entry_id)),
        }

    # --- entries and snapshots -------------------------------------------

    @app.get("/api/entries")
    async def list_entries():
        return {"entries": [entry_summary(eid) for eid in store.entry_ids()]}

    @app.post("/api/entries", status_code=201)
    async def create_entry(body: EntryCreate):
        guard_writes()
        entry, report = engine.create_entry(body.entry_id, body.source_text, body.author)
        return {
            "entry_id": entry.entry_id,
            "snapshot": snapshot_row(entry.head),
            "assessment": report.to_json_dict(),
        }

    @app.get("/api/entries/{entry_id}")
    async def get_entry(entry_id: str):
        entry = store.get_entry(entry_id)
        return {
            "entry_id": entry.entry_id,
            "created_at": entry.created_at,
            "snapshots": [snapshot_row(s) for s in entry.snapshots],
            "reviews": [review_row(r) for r in store.reviews(entry_id)],
            "attestations": [attestation_row(a) for a in store.attestations(entry_id)],
            "overrides": [override_row(o) for o in store.overrides(entry_id)],
            "assessment": _cached_report(engine, entry_id),
        }

    @app.get("/api/entries/{entry_id}/snapshots")
    async def list_snapshots(entry_id: str, limit: int | None = None):
        entry = store.get_entry(entry_id)
        snapshots = entry.snapshots if limit is None else entry.snapshots[-limit:]
        return {"snapshots": [snapshot_row(s, include_text=True) for s in snapshots]}

    @app.post("/api/entries/{entry_id}/snapshots", status_code=201)
    async def commit_snapshot(entry_id: str, body: SnapshotCreate):
        guard_writes()
        result, report = engine.commit(entry_id, body.source_text, body.author)
        return {
            "created": result.created,
            "snapshot": snapshot_row(result.snapshot),
            "assessment": None if report is None else report.to_json_dict(),
        }

    @app.get("/api/entries/{entry_id}/assessment")
    async def get_assessment(entry_id: str):
        if not store.has_entry(entry_id):
            # uniform 404 body instead of FastAPI's default detail shape
            store.get_entry(entry_id)
        return _cached_report(engine, entry_id)

    # --- reviews ------------------------------------------------------------

    @app.get("/api/entries/{entry_id}/reviews")
    async def list_reviews(entry_id: str):
        store.get_entry(entry_id)
        return {"reviews": [review_row(r) for r in store.reviews(entry_id)]}

    @app.post("/api/entries/{entry_id}/reviews", status_code=201)
    async def add_review(entry_id: str, body: ReviewCreate):
        guard_writes()
        review, report = engine.add_review(entry_id, body.hat, body.text)
        return {"review": review_row(review), "assessment": report.to_json_dict()}

    @app.patch("/api/reviews/{review_id}")
    async def patch_review(review_id: str, body: ReviewPatch):
        guard_writes()
        review, report = engine.set_review_status(review_id, body.status)
        return {"review": review_row(review), "assessment": report.to_json_dict()}

    # --- attestations and overrides -----------------------------------------

    @app.post("/api/entries/{entry_id}/attestations", status_code=201)
    async def add_attestation(entry_id: str, body: AttestationCreate):
        guard_writes()
        attestation, report = engine.attest(entry_id, body.attribute, body.verdict, body.reviewer)
        return {"attestation": attestation_row(attestation), "assessment": report.to_json_dict()}

    @app.post("/api/entries/{entry_id}/overrides", status_code=201)
    async def add_override(entry_id: str, body: OverrideCreate):
        guard_writes()
        override, report = engine.add_override(
            entry_id, body.metric_id, body.element_path, body.justification, body.author
        )
        return {"override": override_row(override), "assessment": report.to_json_dict()}

    @app.delete("/api/entries/{entry_id}/overrides")
    async def revoke_override(entry_id: str, metric_id: str, element_path: str):
        guard_writes()
        override, report = engine.revoke_override(entry_id, metric_id, element_path)
        return {"override": override_row(override), "assessment": report.to_json_dict()}

    # --- event stream ---------------------------------------------------------

    def sse_frame(event: dict) -> str:
        return (
            f"id: {event['id']}\n"
            f"event: {event['type']}\n"
            f"data: {json.dumps(event, separators=(',', ':'))}\n\n"
        )

    @app.get("/api/events")
    async def event_stream(request: Request, since: int = 0, limit: int | None = None):
        """Replay events with id > since, then keep tailing.

        With ``limit`` the stream sends at most that many events from what
        is currently in the log and closes immediately; this gives tests
        and one-shot clients a bounded, non-blocking read.
        """

        async def generate():
            cursor = since
            if limit is not None:
                for event in events[cursor : cursor + limit]:
                    yield sse_frame(event)
                return
            while True:
                if await request.is_disconnected():
                    return
                while cursor < len(events):
                    event = events[cursor]
                    cursor += 1
                    yield sse_frame(event)
                await asyncio.sleep(0.05)

        return StreamingResponse(generate(), media_type="text/event-stream")

    # --- dashboard (static files, when a build is available) ---------------------

    dashboard = dashboard_dir or os.environ.get("MODELGATE_DASHBOARD")
    if dashboard and Path(dashboard).is_dir():
        app.mount("/", StaticFiles(directory=dashboard, html=True), name="dashboard")

    return app
