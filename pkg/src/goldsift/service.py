"""HTTP wrapper around the adjudication queue.

Endpoints (all JSON unless noted):

* ``GET  /api/queue/next?expert=<id>`` -- next open item or ``{"done": true}``
* ``POST /api/items/{item_id}/labels`` -- body ``{"expert": ..., "label": "A|B|C|D"}``;
  409 when the submission conflicts with an earlier decision
* ``GET  /api/stats`` -- live agreement report and queue progress
* ``GET  /api/export`` -- resolved gold labels as CSV
* ``/`` -- static UI bundle, when one is configured

On graceful shutdown any expert labels not yet in the annotations file are
appended to it atomically; the event log makes hard kills safe too.
"""

from __future__ import annotations

import csv
import io
import json
import os
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Literal

import uvicorn
from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .adjudication import AdjudicationQueue, SubmitConflict, UnknownExpert, UnknownItem
from .annotation import Label, load_annotations
from .corpus import load_corpus


class SubmitRequest(BaseModel):
    expert: str
    label: Literal["A", "B", "C", "D"]


def persist_expert_annotations(queue: AdjudicationQueue, annotations_path: Path) -> int:
    """Append queue labels missing from the annotations file; returns rows added.

    The rewrite is atomic (temp file + rename) and skipped entirely when
    there is nothing new, leaving the file byte-identical.
    """
    original = annotations_path.read_text(encoding="utf-8")
    present = {
        (a.item_id, a.annotator_id, a.round.value)
        for a in load_annotations(annotations_path)
    }
    fresh = [
        ann
        for ann in queue.expert_annotations()
        if (ann.item_id, ann.annotator_id, ann.round.value) not in present
    ]
    if not fresh:
        return 0
    buf = original if original.endswith("\n") or not original else original + "\n"
    for ann in fresh:
        buf += (
            json.dumps(
                {
                    "item_id": ann.item_id,
                    "annotator_id": ann.annotator_id,
                    "label": ann.label.value,
                    "round": ann.round.value,
                    "trust": ann.trust,
                }
            )
            + "\n"
        )
    tmp = annotations_path.with_suffix(annotations_path.suffix + ".tmp")
    tmp.write_text(buf, encoding="utf-8")
    os.replace(tmp, annotations_path)
    return len(fresh)


def _item_payload(item) -> dict:
    return {
        "item_id": item.item_id,
        "anon_text": item.anon_text,
        "status": item.status.value,
        "crowd_counts": {label.value: n for label, n in item.crowd_counts.items()},
    }


def create_app(
    queue: AdjudicationQueue,
    annotations_path: Path | None = None,
    ui_dir: Path | None = None,
) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        if annotations_path is not None:
            persist_expert_annotations(queue, annotations_path)

    app = FastAPI(title="goldsift adjudication", lifespan=lifespan)

    @app.get("/api/queue/next")
    def queue_next(expert: str = Query(...)):
        try:
            item = queue.next_item(expert)
        except UnknownExpert as exc:
            raise HTTPException(status_code=403, detail=str(exc))
        if item is None:
            return {"done": True}
        return _item_payload(item)

    @app.post("/api/items/{item_id}/labels")
    def submit_label(item_id: str, body: SubmitRequest):
        try:
            outcome = queue.submit(body.expert, item_id, Label(body.label))
        except UnknownExpert as exc:
            raise HTTPException(status_code=403, detail=str(exc))
        except UnknownItem as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except SubmitConflict as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        gold = outcome.gold
        return {
            "outcome": outcome.status.value,
            "gold": None
            if gold is None
            else {
                "item_id": gold.item_id,
                "label": gold.label.value,
                "provenance": gold.provenance.value,
            },
        }

    @app.get("/api/stats")
    def stats():
        report = queue.stats()
        return {
            "kappa": report.kappa,
            "percent_agreement": report.percent_agreement,
            "status_counts": report.status_counts,
            "resolved_by_label": report.resolved_by_label,
            "resolved_by_provenance": report.resolved_by_provenance,
            "total": report.total,
        }

    @app.get("/api/export")
    def export():
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["item_id", "label", "provenance"])
        for gold in queue.resolved_gold():
            writer.writerow([gold.item_id, gold.label.value, gold.provenance.value])
        return Response(content=buf.getvalue(), media_type="text/csv")

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:

        @app.get("/")
        def root():
            return {"service": "goldsift adjudication", "ui": "not configured"}

    return app


def serve(
    corpus_path: Path,
    annotations_path: Path,
    state_dir: Path,
    host: str = "127.0.0.1",
    port: int = 8000,
    experts: tuple[str, str] = ("expert1", "expert2"),
    ui_dir: Path | None = None,
    order_seed: int | None = None,
) -> None:
    """Build the queue from files and run the service until interrupted."""
    messages = load_corpus(corpus_path)
    annotations = load_annotations(annotations_path)
    queue = AdjudicationQueue(
        messages, annotations, experts=experts, state_dir=state_dir, order_seed=order_seed
    )
    app = create_app(queue, annotations_path=annotations_path, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
