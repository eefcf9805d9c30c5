"""HTTP API for the curation console and automation.

Read endpoints serve from immutable snapshots; the two mutating POSTs
(decisions, runs) are serialized and idempotent via client-supplied
request ids, so a retried request replays the stored response instead of
acting twice.  Every response carries lexicon_version and run_id
provenance fields.
"""
from __future__ import annotations

import threading
import time
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..lexicon import CurationDecision, CurationError, STATUSES
from .runs import REPORT_KINDS, RunConfig, RunConfigError, execute_run
from .store import Store, StoreError


class DecisionBody(BaseModel):
    verdict: str
    category: str | None = None
    request_id: str
    actor: str = "console"


class RunBody(BaseModel):
    corpus_ref: str
    config: dict | None = None
    request_id: str


def term_doc(term) -> dict:
    return {
        "text": term.text,
        "category": term.category,
        "status": term.status,
        "support_at_proposal": term.support_at_proposal,
        "version_added": term.version_added,
    }


def create_app(store: Store, console_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="hashmine", version="0.1.0")
    run_lock = threading.Lock()  # runs execute one at a time

    @app.get("/api/lexicon")
    def get_lexicon(status: str | None = None):
        lexicon = store.lexicon()
        if status is not None and status not in STATUSES:
            raise HTTPException(400, f"unknown status: {status}")
        terms = [
            term_doc(t)
            for t in sorted(lexicon.terms.values(), key=lambda t: t.text)
            if status is None or t.status == status
        ]
        return {"lexicon_version": lexicon.version, "run_id": None, "terms": terms}

    @app.get("/api/candidates")
    def get_candidates():
        lexicon = store.lexicon()
        return {
            "lexicon_version": lexicon.version,
            "run_id": None,
            "candidates": store.candidate_cards(),
        }

    @app.post("/api/candidates/{term}/decision")
    def post_decision(term: str, body: DecisionBody):
        cached = store.request_response(body.request_id)
        if cached is not None:
            return JSONResponse({**cached, "replayed": True})
        if body.verdict not in ("accept", "reject", "ban"):
            raise HTTPException(400, f"unknown verdict: {body.verdict}")
        try:
            decision = CurationDecision(
                term_text=term,
                verdict=body.verdict,
                category=body.category,
                decided_at=int(time.time()),
                actor=body.actor,
            )
            updated = store.decide([decision])
        except CurationError as exc:
            raise HTTPException(409, str(exc))
        response = {
            "lexicon_version": updated.version,
            "run_id": None,
            "term": term_doc(updated.terms[term]),
            "replayed": False,
        }
        store.save_request(body.request_id, {k: v for k, v in response.items() if k != "replayed"})
        return response

    @app.post("/api/runs")
    def post_run(body: RunBody):
        cached = store.request_response(body.request_id)
        if cached is not None:
            return JSONResponse({**cached, "replayed": True})
        try:
            config = RunConfig.from_doc(body.config)
        except RunConfigError as exc:
            raise HTTPException(400, str(exc))
        try:
            with run_lock:
                run, _ = execute_run(store, body.corpus_ref, config)
        except StoreError as exc:
            raise HTTPException(404, str(exc))
        response = {
            "run_id": run.run_id,
            "lexicon_version": run.lexicon_version_used,
            "status": run.status,
            "metrics": run.metrics,
            "replayed": False,
        }
        store.save_request(body.request_id, {k: v for k, v in response.items() if k != "replayed"})
        return response

    @app.get("/api/runs")
    def list_runs():
        runs = []
        for run_id in store.list_runs():
            doc = store.read_run_json(run_id, "run.json")
            if doc is not None:
                runs.append(
                    {
                        "run_id": run_id,
                        "status": doc.get("status"),
                        "lexicon_version": doc.get("lexicon_version_used"),
                        "started_at": doc.get("started_at"),
                    }
                )
        runs.sort(key=lambda r: r["started_at"] or 0)
        return {"lexicon_version": store.lexicon().version, "run_id": None, "runs": runs}

    @app.get("/api/runs/{run_id}")
    def get_run(run_id: str):
        doc = store.read_run_json(run_id, "run.json")
        if doc is None:
            raise HTTPException(404, f"unknown run: {run_id}")
        return doc

    @app.get("/api/reports/{run_id}/{kind}")
    def get_report(run_id: str, kind: str):
        if kind not in REPORT_KINDS:
            raise HTTPException(400, f"unknown report kind: {kind}")
        doc = store.read_report(run_id, kind)
        if doc is None:
            raise HTTPException(404, f"no {kind} report for run {run_id}")
        return doc

    @app.get("/api/geo/{run_id}/clusters.geojson")
    def get_geojson(run_id: str):
        doc = store.read_run_json(run_id, "reports/clusters.geojson")
        if doc is None:
            raise HTTPException(404, f"no geo clusters for run {run_id}")
        return doc

    console = Path(console_dir) if console_dir else None
    if console and console.is_dir():
        app.mount("/console", StaticFiles(directory=console, html=True), name="console")

    return app


def serve(store_dir: str | Path, host: str = "127.0.0.1", port: int = 8337,
          console_dir: str | Path | None = None) -> None:
    import uvicorn

    store = Store(store_dir)
    if console_dir is None:
        bundled = Path(__file__).resolve().parents[3] / "frontend" / "dist"
        console_dir = bundled if bundled.is_dir() else None
    app = create_app(store, console_dir=console_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
