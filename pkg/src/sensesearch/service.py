"""HTTP facade and the shared search pipeline.

The pipeline functions build plain JSON-ready dicts so the CLI and the
service emit byte-identical payloads. The service adds request parsing,
error mapping, a TTL page cache, and static serving of the web UI bundle.
"""

import hashlib
import json
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .backends import (
    BackendError,
    Document,
    EngineDescriptor,
    SearchHit,
    UnknownEngineError,
    fetch_document,
    list_engines,
    search,
)
from .config import AppConfig, ConfigError, load_config
from .expansion import UnknownSyntaxProfileError, expand_query, render_query
from .lexicon import (
    ALL_SENSES,
    Lexicon,
    LexiconError,
    UnknownSenseError,
    UnknownSynsetError,
    load_lexicon,
)
from .weighting import rank_results, tokenize

logger = logging.getLogger(__name__)

SEARCH_MODES = ("pre", "post", "pre+post")


class BadRequestError(ValueError):
    pass


def dump_json(payload) -> str:
    """Canonical JSON serialization shared by the CLI and the service."""
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))


# ---------------------------------------------------------------------------
# Page cache


@dataclass
class _CacheEntry:
    expires: float
    document: Document


class DocumentCache:
    """TTL cache for fetched pages with single-flight fetching.

    Concurrent requests for the same URL wait for the first fetch instead
    of duplicating it. An optional spill directory persists entries
    across processes.
    """

    def __init__(self, ttl_s: float, spill_dir: str | None = None):
        self.ttl_s = ttl_s
        self.spill_dir = Path(spill_dir) if spill_dir else None
        self.hits = 0
        self.misses = 0
        self._entries: dict[str, _CacheEntry] = {}
        self._inflight: dict[str, threading.Event] = {}
        self._lock = threading.Lock()
        if self.spill_dir:
            self.spill_dir.mkdir(parents=True, exist_ok=True)

    @property
    def enabled(self) -> bool:
        return self.ttl_s > 0

    def get_or_fetch(self, url: str, fetch) -> Document:
        if not self.enabled:
            return fetch()
        while True:
            with self._lock:
                entry = self._entries.get(url)
                if entry is not None and time.monotonic() < entry.expires:
                    self.hits += 1
                    return entry.document
                if entry is not None:
                    del self._entries[url]
                spilled = self._load_spill(url)
                if spilled is not None:
                    self.hits += 1
                    self._entries[url] = _CacheEntry(
                        time.monotonic() + self.ttl_s, spilled
                    )
                    return spilled
                waiter = self._inflight.get(url)
                if waiter is None:
                    self._inflight[url] = threading.Event()
                    break
            waiter.wait()
        try:
            document = fetch()
        except BaseException:
            with self._lock:
                event = self._inflight.pop(url)
            event.set()
            raise
        with self._lock:
            self.misses += 1
            self._entries[url] = _CacheEntry(time.monotonic() + self.ttl_s, document)
            self._save_spill(url, document)
            event = self._inflight.pop(url)
        event.set()
        return document

    def _spill_path(self, url: str) -> Path:
        digest = hashlib.sha256(url.encode("utf-8")).hexdigest()
        return self.spill_dir / f"{digest}.json"

    def _load_spill(self, url: str) -> Document | None:
        if not self.spill_dir:
            return None
        path = self._spill_path(url)
        try:
            record = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            return None
        if record.get("url") != url or time.time() - record["fetched_at"] >= self.ttl_s:
            return None
        return Document(
            url=url,
            size=record["size"],
            text=record["text"],
            token_count=record["token_count"],
            status=record["status"],
        )

    def _save_spill(self, url: str, document: Document) -> None:
        if not self.spill_dir:
            return
        record = {
            "url": url,
            "fetched_at": time.time(),
            "size": document.size,
            "text": document.text,
            "token_count": document.token_count,
            "status": document.status,
        }
        try:
            self._spill_path(url).write_text(json.dumps(record), encoding="utf-8")
        except OSError as exc:  # cache is best-effort
            logger.warning("cache spill failed for %s: %s", url, exc)


# ---------------------------------------------------------------------------
# Application context and pipeline


@dataclass
class AppContext:
    """Everything a request handler needs, shared and immutable-by-use."""

    config: AppConfig
    lexicon: Lexicon
    engines: list[EngineDescriptor]
    cache: DocumentCache

    def engine(self, name: str) -> EngineDescriptor:
        for engine in self.engines:
            if engine.name == name:
                return engine
        raise UnknownEngineError(f"unknown engine {name!r}")


def build_context(config: AppConfig) -> AppContext:
    if not config.lexicon_path:
        raise ConfigError("no lexicon configured (set lexicon.path)")
    lexicon = load_lexicon(config.lexicon_path)
    return AppContext(
        config=config,
        lexicon=lexicon,
        engines=list_engines(config),
        cache=DocumentCache(config.cache.ttl_s, config.cache.dir),
    )


def senses_payload(ctx: AppContext, term: str, pos: str | None = None) -> dict:
    if not term:
        raise BadRequestError("term must be non-empty")
    senses = []
    for sense in ctx.lexicon.senses_of(term, pos):
        synset = ctx.lexicon.synset(sense.synset_id)
        senses.append(
            {
                "id": sense.id,
                "pos": sense.pos,
                "ordinal": sense.ordinal,
                "synonyms": [
                    l for l in synset.lemmas if l.lower() != sense.lemma
                ],
                "summary": ctx.lexicon.sense_summary(sense),
            }
        )
    return {"term": term, "senses": senses, "all_option": True}


def engines_payload(ctx: AppContext) -> dict:
    return {
        "engines": [
            {"name": e.name, "source_group": e.source_group, "kind": e.kind}
            for e in ctx.engines
        ]
    }


def _gather_documents(ctx: AppContext, urls: list[str]) -> list[Document]:
    fetch_cfg = ctx.config.fetch

    def fetch(url: str) -> Document:
        return ctx.cache.get_or_fetch(
            url,
            lambda: fetch_document(url, fetch_cfg.timeout_s, fetch_cfg.max_bytes),
        )

    if not urls:
        return []
    workers = min(fetch_cfg.parallelism, len(urls))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fetch, urls))


def search_payload(
    ctx: AppContext,
    term: str,
    mode: str,
    sense: str = ALL_SENSES,
    engine_name: str = "",
    limit: int | None = None,
    scoring_overrides: dict | None = None,
) -> dict:
    """Run one search request and shape the response payload.

    Pre mode expands and forwards; post mode retrieves with the raw term
    and re-ranks fetched pages; pre+post does both (experimental).
    """
    if not term:
        raise BadRequestError("term must be non-empty")
    if mode not in SEARCH_MODES:
        raise BadRequestError(f"mode must be one of {SEARCH_MODES}")
    engine = ctx.engine(engine_name)
    selected = ctx.lexicon.resolve_sense_choice(term, sense)
    try:
        scoring = ctx.config.scoring.with_overrides(scoring_overrides)
    except ValueError as exc:
        raise BadRequestError(str(exc)) from exc
    if limit is None:
        limit = ctx.config.default_limit
    if limit < 1:
        raise BadRequestError(f"limit must be >= 1, got {limit}")

    payload: dict = {"mode": mode, "term": term, "sense": selected, "engine": engine.name}

    if mode in ("pre", "pre+post"):
        expanded = expand_query(ctx.lexicon, term, selected)
        executed_query = render_query(expanded, profiles=ctx.config.syntax_profiles)
        payload["expansion"] = {
            "relation": expanded.source_relation,
            "terms": list(expanded.expansion_terms),
        }
    else:
        executed_query = term
    payload["executed_query"] = executed_query

    hits = search(engine, executed_query, limit)
    if mode == "pre":
        payload["hits"] = [
            {"url": h.url, "title": h.title, "snippet": h.snippet, "rank": h.rank}
            for h in hits
        ]
        return payload

    documents = _gather_documents(ctx, [h.url for h in hits])
    docs = [(doc.url, tokenize(doc.text)) for doc in documents]
    table = rank_results(docs, term, selected, ctx.lexicon, scoring)

    hit_by_url: dict[str, SearchHit] = {h.url: h for h in hits}
    doc_by_url: dict[str, Document] = {d.url: d for d in documents}
    rows = []
    for row in table.rows:
        hit = hit_by_url[row.url]
        document = doc_by_url[row.url]
        rows.append(
            {
                "url": row.url,
                "title": hit.title,
                "snippet": hit.snippet,
                "rank": hit.rank,
                "fetch_status": document.status,
                "token_count": document.token_count,
                "scores": row.scores,
                "top_sense": row.top_sense,
            }
        )
    payload["sense_ids"] = list(table.sense_ids)
    payload["order_key"] = table.order_key
    payload["rows"] = rows
    return payload


# ---------------------------------------------------------------------------
# FastAPI application

_STATUS_BY_ERROR = (
    (BadRequestError, 400),
    (UnknownSyntaxProfileError, 400),
    (UnknownEngineError, 404),
    (UnknownSenseError, 404),
    (UnknownSynsetError, 404),
    (ValueError, 400),
    (BackendError, 502),
    (LexiconError, 400),  # request-time lookups only; load errors are fatal at startup
)


def _error_status(exc: Exception) -> int:
    for error_type, status in _STATUS_BY_ERROR:
        if isinstance(exc, error_type):
            return status
    return 500


_FALLBACK_INDEX = f"""<!doctype html>
<html><head><title>sensesearch</title></head>
<body>
<h1>sensesearch {__version__}</h1>
<p>No web UI bundle is installed. API endpoints:</p>
<ul>
<li>GET /api/senses?term=...</li>
<li>GET /api/engines</li>
<li>POST /api/search</li>
</ul>
</body></html>
"""


def create_app(config: AppConfig | None = None, context: AppContext | None = None):
    """Build the FastAPI app over a shared immutable context."""
    from fastapi import FastAPI, Request
    from fastapi.exceptions import RequestValidationError
    from fastapi.responses import HTMLResponse, Response
    from fastapi.staticfiles import StaticFiles
    from pydantic import BaseModel, ConfigDict, Field

    ctx = context or build_context(config if config is not None else load_config())
    app = FastAPI(title="sensesearch", version=__version__)

    class SearchRequestModel(BaseModel):
        model_config = ConfigDict(extra="forbid")

        term: str = Field(min_length=1)
        mode: str
        sense: str = ALL_SENSES
        engine: str
        limit: int | None = None
        scoring: dict = Field(default_factory=dict)

    def json_response(payload: dict, started: float, status: int = 200) -> Response:
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        return Response(
            content=dump_json(payload),
            status_code=status,
            media_type="application/json",
            headers={"X-Elapsed-Ms": f"{elapsed_ms:.3f}"},
        )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        detail = [
            {"loc": list(e.get("loc", ())), "msg": e.get("msg", "")}
            for e in exc.errors()
        ]
        return Response(
            content=dump_json({"error": "invalid request", "detail": detail}),
            status_code=400,
            media_type="application/json",
        )

    async def domain_handler(request: Request, exc: Exception):
        return Response(
            content=dump_json({"error": str(exc)}),
            status_code=_error_status(exc),
            media_type="application/json",
        )

    for error_type, _ in _STATUS_BY_ERROR:
        app.add_exception_handler(error_type, domain_handler)

    @app.get("/api/senses")
    def api_senses(term: str, pos: str | None = None):
        started = time.perf_counter()
        return json_response(senses_payload(ctx, term, pos), started)

    @app.get("/api/engines")
    def api_engines():
        started = time.perf_counter()
        return json_response(engines_payload(ctx), started)

    @app.post("/api/search")
    def api_search(body: SearchRequestModel):
        started = time.perf_counter()
        payload = search_payload(
            ctx,
            term=body.term,
            mode=body.mode,
            sense=body.sense,
            engine_name=body.engine,
            limit=body.limit,
            scoring_overrides=body.scoring,
        )
        return json_response(payload, started)

    ui_dir = ctx.config.server.ui_dir
    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        def index():
            return _FALLBACK_INDEX

    return app


def run_server(config: AppConfig, port: int | None = None) -> None:
    """Run the service until interrupted."""
    import uvicorn

    app = create_app(config=config)
    uvicorn.run(app, host="127.0.0.1", port=port or config.server.port)
