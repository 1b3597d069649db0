"""Pluggable retrieval backends: engine registry, search, fetch, extract.

Two engine kinds exist: a deterministic fixture engine backed by a corpus
directory with a manifest, and a generic http-api client configured by a
URL template plus response field paths. Engines sharing a source group
are deduplicated so only the first of each group is offered.
"""

from __future__ import annotations

import json
import logging
import os
import re
from dataclasses import dataclass
from html import unescape as html_unescape
from html.parser import HTMLParser
from pathlib import Path
from urllib.parse import quote_plus, urlsplit
from urllib.request import url2pathname

import requests

from .weighting import count_concept, tokenize

logger = logging.getLogger(__name__)

HARD_RESULT_CAP = 1000
DEFAULT_LIMIT = 100
DEFAULT_TIMEOUT_S = 10.0
DEFAULT_MAX_BYTES = 1 << 20

ENGINE_KINDS = ("fixture", "http-api")


class BackendError(Exception):
    """Search-side failure: bad engine config, network error, bad response."""


class UnknownEngineError(BackendError):
    pass


@dataclass(frozen=True)
class EngineDescriptor:
    """One configured search engine."""

    name: str
    source_group: str
    kind: str
    corpus_dir: str | None = None
    url_template: str | None = None
    hits_path: str | None = None
    url_field: str = "url"
    title_field: str = "title"
    snippet_field: str = "snippet"
    auth_env: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "EngineDescriptor":
        try:
            name = data["name"]
            source_group = data["source_group"]
            kind = data["kind"]
        except KeyError as exc:
            raise BackendError(f"engine config missing key {exc}") from exc
        if not name or not source_group:
            raise BackendError("engine name and source_group must be non-empty")
        if kind not in ENGINE_KINDS:
            raise BackendError(f"unknown engine kind {kind!r}")
        if kind == "fixture" and not data.get("corpus_dir"):
            raise BackendError(f"fixture engine {name!r} needs corpus_dir")
        if kind == "http-api" and not data.get("url_template"):
            raise BackendError(f"http-api engine {name!r} needs url_template")
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in data.items() if k in known})


@dataclass(frozen=True)
class SearchHit:
    url: str
    title: str
    snippet: str
    rank: int


@dataclass
class Document:
    """A fetched page; failures are recorded, never raised."""

    url: str
    size: int = 0
    text: str = ""
    token_count: int = 0
    status: str = "ok"


def list_engines(config) -> list[EngineDescriptor]:
    """Configured engines, at most one per source group (first wins)."""
    engines = config.engines if hasattr(config, "engines") else list(config)
    seen_names: set[str] = set()
    seen_groups: set[str] = set()
    offered: list[EngineDescriptor] = []
    for engine in engines:
        if engine.name in seen_names:
            raise BackendError(f"duplicate engine name {engine.name!r}")
        seen_names.add(engine.name)
        if engine.source_group in seen_groups:
            continue
        seen_groups.add(engine.source_group)
        offered.append(engine)
    return offered


# ---------------------------------------------------------------------------
# Search


def _clamp_limit(limit: int) -> int:
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    return min(limit, HARD_RESULT_CAP)


_QUOTED_RE = re.compile(r'"([^"]*)"')


def parse_query_groups(query: str) -> tuple[list[str], list[str]]:
    """Split a rendered query into required terms and an OR-group.

    Quoted phrases form the OR-group; remaining bare words (minus the OR
    keyword and grouping parentheses) must all be present.
    """
    group = [m.group(1) for m in _QUOTED_RE.finditer(query) if m.group(1).strip()]
    rest = _QUOTED_RE.sub(" ", query)
    rest = rest.replace("(", " ").replace(")", " ")
    required = [w for w in rest.split() if w.upper() != "OR"]
    return required, group


def search(engine: EngineDescriptor, query: str, limit: int = DEFAULT_LIMIT) -> list[SearchHit]:
    """Run one query against one engine; at most min(limit, 1000) hits."""
    limit = _clamp_limit(limit)
    if engine.kind == "fixture":
        hits = _search_fixture(engine, query)
    else:
        hits = _search_http(engine, query, limit)
    hits = hits[:limit]
    seen: set[str] = set()
    for hit in hits:
        if not hit.url or hit.url in seen:
            raise BackendError(f"engine {engine.name!r} returned duplicate/empty url")
        seen.add(hit.url)
    return hits


def _resolve_corpus_url(url: str, corpus_dir: Path) -> str:
    split = urlsplit(url)
    if split.scheme in ("http", "https"):
        return url
    if split.scheme == "file" and split.path.startswith("/"):
        return url
    relative = split.path if split.scheme == "file" else url
    return (corpus_dir / relative).resolve().as_uri()


def _load_manifest(corpus_dir: Path) -> list[dict]:
    manifest_path = corpus_dir / "manifest.json"
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        docs = manifest["docs"]
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise BackendError(f"cannot read corpus manifest {manifest_path}: {exc}") from exc
    return docs


def _search_fixture(engine: EngineDescriptor, query: str) -> list[SearchHit]:
    corpus_dir = Path(engine.corpus_dir)
    required, group = parse_query_groups(query)
    hits: list[SearchHit] = []
    for doc in _load_manifest(corpus_dir):
        doc_path = corpus_dir / doc["file"]
        try:
            text = extract_text(doc_path.read_bytes())
        except OSError as exc:
            raise BackendError(f"cannot read corpus file {doc_path}: {exc}") from exc
        tokens = tokenize(text)

        def present(term: str) -> bool:
            return bool(tokenize(term)) and count_concept(tokens, term) > 0

        if not all(present(term) for term in required):
            continue
        if group and not any(present(member) for member in group):
            continue
        hits.append(
            SearchHit(
                url=_resolve_corpus_url(doc.get("url") or doc["file"], corpus_dir),
                title=doc.get("title", ""),
                snippet=doc.get("snippet", ""),
                rank=len(hits) + 1,
            )
        )
    return hits


def _walk_path(payload, dotted: str):
    value = payload
    for part in dotted.split("."):
        if isinstance(value, list):
            value = value[int(part)]
        elif isinstance(value, dict):
            value = value[part]
        else:
            raise KeyError(part)
    return value


def _search_http(engine: EngineDescriptor, query: str, limit: int) -> list[SearchHit]:
    key = ""
    headers = {}
    if engine.auth_env:
        key = os.environ.get(engine.auth_env, "")
        if "{key}" not in engine.url_template:
            headers["Authorization"] = f"Bearer {key}"
    url = engine.url_template.format(query=quote_plus(query), limit=limit, key=key)
    try:
        response = requests.get(url, headers=headers, timeout=DEFAULT_TIMEOUT_S)
    except requests.RequestException as exc:
        raise BackendError(f"engine {engine.name!r} request failed: {exc}") from exc
    if not response.ok:
        raise BackendError(
            f"engine {engine.name!r} returned HTTP {response.status_code}"
        )
    try:
        payload = response.json()
        raw_hits = _walk_path(payload, engine.hits_path) if engine.hits_path else payload
        hits = []
        for i, item in enumerate(raw_hits[:limit], start=1):
            hits.append(
                SearchHit(
                    url=str(_walk_path(item, engine.url_field)),
                    title=str(_walk_path(item, engine.title_field)) if engine.title_field else "",
                    snippet=str(_walk_path(item, engine.snippet_field)) if engine.snippet_field else "",
                    rank=i,
                )
            )
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise BackendError(f"engine {engine.name!r} response unparsable: {exc}") from exc
    return hits


# ---------------------------------------------------------------------------
# Fetching


def fetch_document(
    url: str,
    timeout_s: float = DEFAULT_TIMEOUT_S,
    max_bytes: int = DEFAULT_MAX_BYTES,
) -> Document:
    """Fetch a page body, capped at max_bytes; failures become data.

    A failed fetch yields an empty-text Document whose status names the
    failure, so scoring pipelines keep going.
    """
    split = urlsplit(url)
    if split.scheme == "file":
        return _fetch_file(url, split.path, max_bytes)
    if split.scheme not in ("http", "https"):
        return Document(url=url, status="error")

    try:
        with requests.get(url, timeout=timeout_s, stream=True) as response:
            if not response.ok:
                logger.warning("fetch %s -> HTTP %s", url, response.status_code)
                return Document(url=url, status="error")
            body = b""
            for chunk in response.iter_content(chunk_size=65536):
                body += chunk
                if len(body) > max_bytes:
                    break
    except requests.Timeout:
        return Document(url=url, status="timeout")
    except requests.RequestException as exc:
        logger.warning("fetch %s failed: %s", url, exc)
        return Document(url=url, status="error")
    return _document_from_body(url, body, max_bytes)


def _fetch_file(url: str, path: str, max_bytes: int) -> Document:
    try:
        with open(url2pathname(path), "rb") as fh:
            body = fh.read(max_bytes + 1)
    except OSError as exc:
        logger.warning("fetch %s failed: %s", url, exc)
        return Document(url=url, status="error")
    return _document_from_body(url, body, max_bytes)


def _document_from_body(url: str, body: bytes, max_bytes: int) -> Document:
    status = "ok"
    if len(body) > max_bytes:
        body = body[:max_bytes]
        status = "truncated"
    text = extract_text(body)
    return Document(
        url=url,
        size=len(body),
        text=text,
        token_count=len(tokenize(text)),
        status=status,
    )


# ---------------------------------------------------------------------------
# Text extraction


_MARKUP_RE = re.compile(r"<(?:[a-zA-Z]|/[a-zA-Z]|!)")
_WS_RE = re.compile(r"\s+")


class _TextExtractor(HTMLParser):
    """Collects text content, skipping script/style bodies and comments."""

    _SKIP = {"script", "style"}

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.parts: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in self._SKIP:
            self._skip_depth += 1

    def handle_endtag(self, tag):
        if tag in self._SKIP and self._skip_depth:
            self._skip_depth -= 1

    def handle_data(self, data):
        if not self._skip_depth:
            self.parts.append(data)

    def text(self) -> str:
        return _WS_RE.sub(" ", " ".join(self.parts)).strip()


def extract_text(data: bytes | str) -> str:
    """Markup-free text of an HTML body; non-HTML input passes through.

    Script, style, and comment content is dropped, entities are decoded,
    and whitespace is collapsed.
    """
    text = data.decode("utf-8", errors="replace") if isinstance(data, bytes) else data
    if not _MARKUP_RE.search(text):
        if "&" in text:
            text = html_unescape(text)
        return _WS_RE.sub(" ", text).strip()
    parser = _TextExtractor()
    try:
        parser.feed(text)
        parser.close()
    except Exception:  # pragma: no cover - HTMLParser is extremely tolerant
        return _WS_RE.sub(" ", re.sub(r"<[^>]*>", " ", text)).strip()
    return parser.text()
