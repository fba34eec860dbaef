"""Read-only HTTP search service over an immutable index snapshot.

Endpoints (all under /v1): GET /search, GET /videos/{id}, GET /health.
The snapshot and corpus are loaded once at startup; request handlers only
read shared immutable state, so any number of searches may run concurrently.
Reindexing happens offline; the service restarts on a new snapshot.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .corpus import Corpus, VideoRecord, assemble_channel_text, load_corpus
from .index import IndexSnapshot, deserialize_index, read_index_header
from .retrieval import (
    CHANNEL_MODES,
    EmptyQueryError,
    IdentityTranslator,
    Query,
    StaticTranslator,
    Translator,
    matched_query_terms,
    maybe_translate,
    search,
)
from .stopwords import load_stopword_file
from .textprep import PrepConfig, preprocess

logger = logging.getLogger(__name__)


@dataclass
class ServiceConfig:
    index_path: str
    corpus_path: str
    host: str = "127.0.0.1"
    port: int = 8000
    stopwords_path: str | None = None
    default_channel: str = "fused"
    default_alpha: float = 0.5
    translator: str = "identity"
    max_top_k: int = 50
    preview_chars: int = 280
    allow_cors: bool = False


def _build_translator(selection: str) -> Translator:
    if selection == "identity":
        return IdentityTranslator()
    if selection.startswith("static:"):
        mapping = json.loads(Path(selection.split(":", 1)[1]).read_text(encoding="utf-8"))
        return StaticTranslator(mapping)
    raise ValueError(f"unknown translator {selection!r}; use 'identity' or 'static:<path>'")


class SearchService:
    """Shared immutable state behind the HTTP handlers."""

    def __init__(
        self,
        snapshot: IndexSnapshot,
        corpus: Corpus,
        config: ServiceConfig,
        index_checksum: str,
    ):
        self.snapshot = snapshot
        self.videos: dict[str, VideoRecord] = {v.video_id: v for v in corpus.videos}
        self.config = config
        self.index_checksum = index_checksum
        self.translator = _build_translator(config.translator)

    def search_payload(
        self,
        q: str,
        channel: str,
        alpha: float,
        lang: str | None,
        top_k: int,
    ) -> dict:
        query = Query(
            text=q, language=lang, channel_mode=channel, fusion_alpha=alpha, top_k=top_k
        )
        # Translate once up front; the engine then sees already-English text.
        translated = maybe_translate(query, self.translator)
        tokens = preprocess(translated.text, self.snapshot.prep)
        ranked = search(self.snapshot, translated, self.snapshot.prep, IdentityTranslator())
        results = []
        for rank, (video_id, score) in enumerate(ranked.entries, start=1):
            video = self.videos.get(video_id)
            results.append(
                {
                    "rank": rank,
                    "video_id": video_id,
                    "title": self.snapshot.titles.get(video_id, ""),
                    "domain": video.domain.value if video else None,
                    "duration_s": video.duration_s if video else None,
                    "score": score,
                    "matched_terms": matched_query_terms(
                        self.snapshot, tokens, video_id, channel
                    ),
                }
            )
        return {
            "query": q,
            "effective_query": translated.text,
            "channel": channel,
            "alpha": alpha,
            "results": results,
        }

    def video_payload(self, video_id: str) -> dict | None:
        video = self.videos.get(video_id)
        if video is None:
            return None
        limit = self.config.preview_chars
        return {
            "video_id": video.video_id,
            "title": video.title,
            "domain": video.domain.value,
            "duration_s": video.duration_s,
            "caption": video.reference_caption,
            "ocr_preview": assemble_channel_text(video, "ocr")[:limit],
            "transcript_preview": assemble_channel_text(video, "transcript")[:limit],
        }


def load_search_service(config: ServiceConfig) -> SearchService:
    header = read_index_header(config.index_path)
    snapshot = deserialize_index(config.index_path)
    corpus = load_corpus(config.corpus_path)
    if config.stopwords_path:
        external = PrepConfig(
            stopwords=load_stopword_file(config.stopwords_path),
            min_token_len=snapshot.prep.min_token_len,
            fold_case=snapshot.prep.fold_case,
        )
        if external.fingerprint() != snapshot.prep_fingerprint:
            raise ValueError(
                "stopword file does not match the preprocessing the index was built with"
            )
    logger.info(
        "serving index %s (corpus %s, prep %s, %d videos)",
        header["checksum"][:12],
        snapshot.corpus_fingerprint[:12],
        snapshot.prep_fingerprint[:12],
        header["n_docs"],
    )
    return SearchService(snapshot, corpus, config, header["checksum"])


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def create_app(service: SearchService | None, allow_cors: bool | None = None) -> FastAPI:
    """Build the API app; ``service=None`` serves 503 everywhere (still loading)."""
    app = FastAPI(title="lvsearch", docs_url=None, redoc_url=None)
    app.state.service = service

    cors = allow_cors if allow_cors is not None else bool(service and service.config.allow_cors)
    if cors:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware, allow_origins=["*"], allow_methods=["GET"], allow_headers=["*"]
        )

    @app.get("/v1/health")
    def health(request: Request):
        svc: SearchService | None = request.app.state.service
        if svc is None:
            return _error(503, "index snapshot not loaded")
        return {
            "status": "ok",
            "n_videos": len(svc.videos),
            "index_fingerprint": svc.index_checksum,
        }

    @app.get("/v1/search")
    def http_search(
        request: Request,
        q: str = "",
        channel: str | None = None,
        alpha: str | None = None,
        lang: str | None = None,
        top_k: str | None = None,
    ):
        svc: SearchService | None = request.app.state.service
        if svc is None:
            return _error(503, "index snapshot not loaded")
        if not q.strip():
            return _error(400, "missing or empty query parameter 'q'")
        mode = channel or svc.config.default_channel
        if mode not in CHANNEL_MODES:
            return _error(400, f"channel must be one of {', '.join(CHANNEL_MODES)}")
        try:
            alpha_value = float(alpha) if alpha is not None else svc.config.default_alpha
        except ValueError:
            return _error(400, "alpha must be a number in [0, 1]")
        if not 0.0 <= alpha_value <= 1.0:
            return _error(400, "alpha must be a number in [0, 1]")
        try:
            k = int(top_k) if top_k is not None else min(10, svc.config.max_top_k)
        except ValueError:
            return _error(400, "top_k must be a positive integer")
        if k < 1 or k > svc.config.max_top_k:
            return _error(400, f"top_k must be in [1, {svc.config.max_top_k}]")
        try:
            return svc.search_payload(q, mode, alpha_value, lang, k)
        except EmptyQueryError:
            return _error(400, "query is empty after preprocessing")

    @app.get("/v1/videos/{video_id}")
    def http_get_video(request: Request, video_id: str):
        svc: SearchService | None = request.app.state.service
        if svc is None:
            return _error(503, "index snapshot not loaded")
        payload = svc.video_payload(video_id)
        if payload is None:
            return _error(404, f"unknown video {video_id!r}")
        return payload

    return app


def create_app_from_config(config: ServiceConfig) -> FastAPI:
    return create_app(load_search_service(config), allow_cors=config.allow_cors)
