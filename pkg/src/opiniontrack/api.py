"""REST/JSON service: ingestion, indicators, annotation loop, retraining.

Every response body is {"data": ...} or {"error": {"code", "message"}}.
Models are swapped atomically by replacing the attribute on the shared
state object; in-flight reads see either the old or the new model.
"""

from __future__ import annotations

import logging
import os
import tempfile
import threading
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse

from . import __version__
from . import disambig as disambig_mod
from . import sentiment as sentiment_mod
from .indicators import (BUZZ_METRICS, MEDIA, SENTIMENT_METRICS, build_series,
                         daily_counts, series_to_obj, smooth_series)
from .kalman import PRESETS
from .models import Document, KnowledgeBase, load_kb
from .pipeline import DEFAULT_ALLOWED_LANGS, disambiguate_stage, extract_stage, sentiment_stage
from .store import Annotation, DocumentStore, StoreConflictError
from .train import (InsufficientClassesError, train_disambig_from_annotations,
                    train_sentiment_from_annotations)
from .trie import build_trie

log = logging.getLogger(__name__)

SMOOTHING_CHOICES = ("reactive", "default", "smooth", "none")


@dataclass
class ApiConfig:
    store_path: str
    kb_path: str
    sentiment_model_path: str | None = None
    disambig_model_path: str | None = None
    clusters_path: str | None = None
    embeddings_path: str | None = None
    lexicon_path: str | None = None
    allowed_langs: tuple[str, ...] = DEFAULT_ALLOWED_LANGS
    api_token: str | None = None
    seed: int = 42


class ApiState:
    def __init__(self, config: ApiConfig):
        self.config = config
        self.store = DocumentStore(config.store_path)
        self.kb = load_kb(config.kb_path)
        self.trie = build_trie(self.kb)
        self.resources = self._load_resources(config)
        self.sentiment_model = self._load_sentiment(config)
        self.disambig_model = self._load_disambig(config)
        self.retrain_lock = threading.Lock()
        self._serve_seq = 0
        self._served: dict[tuple, int] = {}

    @staticmethod
    def _load_resources(config: ApiConfig) -> sentiment_mod.SentimentResources:
        clusters = (sentiment_mod.load_clusters(config.clusters_path)
                    if config.clusters_path else sentiment_mod.ClusterMap({}))
        if config.embeddings_path:
            embeddings = sentiment_mod.load_embeddings(config.embeddings_path)
        else:
            embeddings = sentiment_mod.EmbeddingTable(2, {})
        lexicon = (sentiment_mod.load_lexicon(config.lexicon_path)
                   if config.lexicon_path else sentiment_mod.SentimentLexicon({}))
        return sentiment_mod.SentimentResources(clusters, embeddings, lexicon)

    @staticmethod
    def _load_sentiment(config: ApiConfig):
        path = config.sentiment_model_path
        if path and Path(path).exists():
            return sentiment_mod.load_model(path)
        return None

    @staticmethod
    def _load_disambig(config: ApiConfig):
        path = config.disambig_model_path
        if path and Path(path).exists():
            return disambig_mod.load_model(path)
        return None

    def model_timestamps(self) -> dict:
        out = {}
        for name, path in (("sentiment", self.config.sentiment_model_path),
                           ("disambig", self.config.disambig_model_path)):
            if path and Path(path).exists():
                mtime = datetime.fromtimestamp(Path(path).stat().st_mtime, tz=timezone.utc)
                out[name] = mtime.strftime("%Y-%m-%dT%H:%M:%SZ")
            else:
                out[name] = None
        return out

    def process_new_documents(self, date_from: date, date_to: date):
        """Run extraction, disambiguation, and sentiment over a window.
        Mention records are keyed, so reprocessing is idempotent."""
        extract_stage(self.store, self.kb, date_from, date_to,
                      allowed_langs=self.config.allowed_langs)
        disambiguate_stage(self.store, self.kb, self.disambig_model,
                           date_from, date_to)
        if self.sentiment_model is not None:
            sentiment_stage(self.store, self.sentiment_model, self.resources,
                            date_from, date_to)

    # --- annotation queue ---------------------------------------------

    def annotation_candidates(self, task: str) -> list[tuple]:
        """(doc, entity_id or None) pairs still unlabeled for the task."""
        items = []
        if task == "sentiment":
            seen_docs = set()
            for m in self.store.iter_mentions():
                doc = self.store.get_document(m.doc_id)
                if doc is None or doc.source != "twitter" or m.related is False:
                    continue
                if doc.id in seen_docs or self.store.has_annotation(doc.id, "sentiment"):
                    continue
                seen_docs.add(doc.id)
                items.append((doc, None))
        else:
            seen = set()
            for m in self.store.iter_mentions():
                doc = self.store.get_document(m.doc_id)
                if doc is None or doc.source != "twitter":
                    continue
                key = (doc.id, m.entity_id)
                if key in seen or self.store.has_annotation(doc.id, "disambig", m.entity_id):
                    continue
                seen.add(key)
                items.append((doc, m.entity_id))
        items.sort(key=lambda it: (
            self._served.get((task, it[0].id, it[1]), 0),
            it[0].timestamp, it[0].id, it[1] or ""))
        return items

    def mark_served(self, task: str, doc_id: str, entity_id: str | None):
        self._serve_seq += 1
        self._served[(task, doc_id, entity_id)] = self._serve_seq


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"error": {"code": code, "message": message}})


def _parse_date(value: str | None, fallback: date | None) -> date | None:
    if value is None:
        return fallback
    return date.fromisoformat(value)


def create_app(config: ApiConfig) -> FastAPI:
    state = ApiState(config)
    app = FastAPI(title="opiniontrack", version=__version__)
    app.state.tracker = state

    @app.exception_handler(404)
    async def not_found(request: Request, exc):
        return _error(404, "not_found", f"no such path: {request.url.path}")

    @app.middleware("http")
    async def check_token(request: Request, call_next):
        if config.api_token and request.url.path != "/health":
            supplied = request.headers.get("authorization", "")
            if supplied != f"Bearer {config.api_token}":
                return _error(401, "unauthorized", "missing or bad API token")
        return await call_next(request)

    def store_date_range() -> tuple[date, date] | None:
        docs = state.store.query_documents()
        if not docs:
            return None
        days = [d.timestamp.date() for d in docs]
        return min(days), max(days)

    @app.get("/health")
    def health():
        return {"data": {
            "status": "ok",
            "version": __version__,
            "documents": len(state.store),
            "models": state.model_timestamps(),
        }}

    @app.get("/api/v1/entities")
    def entities():
        return {"data": [
            {"id": e.id, "canonical": e.canonical_name,
             "surface_forms": list(e.surface_forms),
             "profession": e.profession, "party": e.party}
            for e in state.kb
        ]}

    @app.post("/api/v1/documents", status_code=201)
    async def post_documents(request: Request):
        try:
            body = await request.json()
        except ValueError as exc:
            return _error(400, "bad_document", f"body is not valid JSON: {exc}")
        if not isinstance(body, (dict, list)):
            return _error(400, "bad_document", "body must be an object or a list")
        objs = body if isinstance(body, list) else [body]
        stored = duplicates = 0
        days = []
        try:
            for obj in objs:
                doc = Document.from_json_obj(obj)
                if state.store.put_document(doc):
                    stored += 1
                else:
                    duplicates += 1
                days.append(doc.timestamp.date())
        except StoreConflictError as exc:
            return _error(409, "conflict", str(exc))
        except (KeyError, ValueError, TypeError) as exc:
            return _error(400, "bad_document", str(exc))
        if days:
            state.process_new_documents(min(days), max(days))
        return {"data": {"stored": stored, "duplicates": duplicates}}

    def indicator_response(medium: str, metric: str, smoothing: str,
                           date_from: str | None, date_to: str | None,
                           entity: list[str] | None):
        if smoothing not in SMOOTHING_CHOICES:
            return _error(400, "bad_smoothing",
                          f"smoothing must be one of {SMOOTHING_CHOICES}")
        window = store_date_range()
        if window is None:
            return {"data": []}
        try:
            d_from = _parse_date(date_from, window[0])
            d_to = _parse_date(date_to, window[1])
        except ValueError as exc:
            return _error(400, "bad_date", str(exc))
        if d_from > d_to:
            return _error(400, "bad_range", f"from {d_from} is after to {d_to}")
        entity_ids = sorted(e.id for e in state.kb)
        if entity:
            unknown = [e for e in entity if e not in entity_ids]
            if unknown:
                return _error(400, "unknown_entity", f"unknown entity: {unknown}")
            entity_ids = [e for e in entity_ids if e in set(entity)]
        rows = daily_counts(state.store, state.kb, d_from, d_to)
        series = build_series(rows, state.kb, medium, metric, d_from, d_to)
        out = []
        for eid in entity_ids:
            points = series[eid]
            out.append(series_to_obj(eid, medium, metric, smoothing, points,
                                     smooth_series(points, smoothing)))
        return {"data": out}

    @app.get("/api/v1/indicators/buzz")
    def buzz(medium: str = "twitter", mode: str = "share",
             smoothing: str = "default",
             from_: str | None = Query(None, alias="from"),
             to: str | None = Query(None),
             entity: list[str] | None = Query(None)):
        if medium not in MEDIA:
            return _error(400, "bad_medium", f"medium must be one of {MEDIA}")
        if mode not in BUZZ_METRICS:
            return _error(400, "bad_mode", f"mode must be one of {BUZZ_METRICS}")
        return indicator_response(medium, mode, smoothing, from_, to, entity)

    @app.get("/api/v1/indicators/sentiment")
    def sentiment_indicators(metric: str = "log_ratio",
                             smoothing: str = "default",
                             from_: str | None = Query(None, alias="from"),
                             to: str | None = Query(None),
                             entity: list[str] | None = Query(None)):
        if metric not in SENTIMENT_METRICS:
            return _error(400, "bad_metric", f"metric must be one of {SENTIMENT_METRICS}")
        return indicator_response("twitter", metric, smoothing, from_, to, entity)

    @app.get("/api/v1/annotation/next")
    def annotation_next(task: str):
        if task not in ("sentiment", "disambig"):
            return _error(400, "bad_task", "task must be sentiment or disambig")
        candidates = state.annotation_candidates(task)
        if not candidates:
            return Response(status_code=204)
        doc, entity_id = candidates[0]
        state.mark_served(task, doc.id, entity_id)
        mentions = [
            m.to_json_obj() for m in state.store.mentions_for_doc(doc.id)
            if entity_id is None or m.entity_id == entity_id
        ]
        payload = {"document": doc.to_json_obj(), "task": task,
                   "mentions": mentions}
        if entity_id is not None:
            entity = state.kb.get(entity_id)
            payload["entity"] = {"id": entity.id, "canonical": entity.canonical_name}
        return {"data": payload}

    @app.post("/api/v1/annotation", status_code=201)
    def annotation_submit(body: dict):
        try:
            ann = Annotation(
                doc_id=body["doc_id"],
                task=body["task"],
                label=body["label"],
                annotator=body["annotator"],
                timestamp=datetime.now(timezone.utc),
                entity_id=body.get("entity_id"),
            )
        except (KeyError, ValueError) as exc:
            return _error(400, "bad_annotation", str(exc))
        if state.store.get_document(ann.doc_id) is None:
            return _error(400, "bad_annotation", f"unknown document {ann.doc_id!r}")
        try:
            state.store.put_annotation(ann)
        except StoreConflictError as exc:
            return _error(409, "duplicate", str(exc))
        return {"data": {"accepted": True}}

    @app.post("/api/v1/models/{task}/retrain")
    def retrain(task: str):
        if task not in ("sentiment", "disambig"):
            return _error(400, "bad_task", "task must be sentiment or disambig")
        with state.retrain_lock:
            try:
                if task == "sentiment":
                    model, metrics = train_sentiment_from_annotations(
                        state.store, state.resources, seed=config.seed)
                    path = config.sentiment_model_path
                    if path:
                        _atomic_save(sentiment_mod.save_model, model, path)
                    state.sentiment_model = model
                else:
                    model, metrics = train_disambig_from_annotations(
                        state.store, state.kb, seed=config.seed)
                    path = config.disambig_model_path
                    if path:
                        _atomic_save(disambig_mod.save_model, model, path)
                    state.disambig_model = model
            except InsufficientClassesError as exc:
                return JSONResponse(status_code=409, content={
                    "error": {"code": "insufficient_classes",
                              "message": str(exc)},
                    "counts": exc.counts,
                })
        return {"data": {"task": task, "metrics": metrics,
                         "models": state.model_timestamps()}}

    return app


def _atomic_save(save_fn, model, path: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    os.close(fd)
    try:
        save_fn(model, tmp)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def serve(config: ApiConfig, host: str = "127.0.0.1", port: int = 8600):
    import uvicorn
    app = create_app(config)
    uvicorn.run(app, host=host, port=port)
