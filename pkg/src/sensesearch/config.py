"""Configuration loading for the service and the CLI.

One YAML (or JSON) document configures everything: lexicon path, engines,
scoring defaults, fetch limits, cache TTL, and the server port. The path
comes from the CLI flag or the SENSESEARCH_CONFIG environment variable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from .backends import (
    DEFAULT_LIMIT,
    DEFAULT_MAX_BYTES,
    DEFAULT_TIMEOUT_S,
    BackendError,
    EngineDescriptor,
)
from .expansion import DEFAULT_SYNTAX_PROFILES, SyntaxProfile
from .weighting import ScoringConfig

CONFIG_ENV_VAR = "SENSESEARCH_CONFIG"

DEFAULT_PORT = 8080
DEFAULT_CACHE_TTL_S = 3600.0
DEFAULT_PARALLELISM = 8


class ConfigError(Exception):
    pass


@dataclass
class FetchConfig:
    timeout_s: float = DEFAULT_TIMEOUT_S
    max_bytes: int = DEFAULT_MAX_BYTES
    parallelism: int = DEFAULT_PARALLELISM


@dataclass
class CacheConfig:
    ttl_s: float = DEFAULT_CACHE_TTL_S
    dir: str | None = None

    @property
    def enabled(self) -> bool:
        return self.ttl_s > 0


@dataclass
class ServerConfig:
    port: int = DEFAULT_PORT
    ui_dir: str | None = None


@dataclass
class AppConfig:
    lexicon_path: str | None = None
    engines: list[EngineDescriptor] = field(default_factory=list)
    scoring: ScoringConfig = field(default_factory=ScoringConfig)
    fetch: FetchConfig = field(default_factory=FetchConfig)
    cache: CacheConfig = field(default_factory=CacheConfig)
    server: ServerConfig = field(default_factory=ServerConfig)
    syntax_profiles: dict[str, SyntaxProfile] = field(
        default_factory=lambda: dict(DEFAULT_SYNTAX_PROFILES)
    )
    default_limit: int = DEFAULT_LIMIT
    base_dir: Path = field(default_factory=Path.cwd)


def _section(data: dict, key: str) -> dict:
    value = data.get(key) or {}
    if not isinstance(value, dict):
        raise ConfigError(f"config section {key!r} must be a mapping")
    return value


def config_from_dict(data: dict, base_dir: Path | None = None) -> AppConfig:
    """Build an AppConfig from a parsed key/value tree."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    base = base_dir or Path.cwd()

    lexicon_path = _section(data, "lexicon").get("path")
    if lexicon_path is not None:
        lexicon_path = str((base / lexicon_path))

    engines = []
    for raw in data.get("engines") or []:
        try:
            engine = EngineDescriptor.from_dict(raw)
        except BackendError as exc:
            raise ConfigError(str(exc)) from exc
        if engine.corpus_dir is not None:
            engine = replace(engine, corpus_dir=str(base / engine.corpus_dir))
        engines.append(engine)

    try:
        scoring = ScoringConfig().with_overrides(_section(data, "scoring"))
    except ValueError as exc:
        raise ConfigError(f"bad scoring config: {exc}") from exc

    fetch_raw = _section(data, "fetch")
    fetch = FetchConfig(
        timeout_s=float(fetch_raw.get("timeout_s", DEFAULT_TIMEOUT_S)),
        max_bytes=int(fetch_raw.get("max_bytes", DEFAULT_MAX_BYTES)),
        parallelism=int(fetch_raw.get("parallelism", DEFAULT_PARALLELISM)),
    )
    if fetch.timeout_s <= 0 or fetch.max_bytes < 1 or fetch.parallelism < 1:
        raise ConfigError("fetch limits must be positive")

    cache_raw = _section(data, "cache")
    cache = CacheConfig(
        ttl_s=float(cache_raw.get("ttl_s", DEFAULT_CACHE_TTL_S)),
        dir=cache_raw.get("dir"),
    )
    if cache.dir is not None:
        cache.dir = str(base / cache.dir)

    server_raw = _section(data, "server")
    server = ServerConfig(
        port=int(server_raw.get("port", DEFAULT_PORT)),
        ui_dir=server_raw.get("ui_dir"),
    )
    if server.ui_dir is not None:
        server.ui_dir = str(base / server.ui_dir)

    profiles = dict(DEFAULT_SYNTAX_PROFILES)
    for name, raw in _section(data, "syntax_profiles").items():
        profiles[name] = SyntaxProfile(name=name, **(raw or {}))

    limit = int(data.get("default_limit", DEFAULT_LIMIT))
    return AppConfig(
        lexicon_path=lexicon_path,
        engines=engines,
        scoring=scoring,
        fetch=fetch,
        cache=cache,
        server=server,
        syntax_profiles=profiles,
        default_limit=limit,
        base_dir=base,
    )


def load_config(path: str | os.PathLike | None = None) -> AppConfig:
    """Load the config file, or fall back to built-in defaults.

    Relative paths inside the file resolve against the file's directory.
    """
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if path is None:
        return AppConfig()
    config_path = Path(path)
    try:
        text = config_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {config_path}: {exc}") from exc
    return config_from_dict(data, base_dir=config_path.resolve().parent)
