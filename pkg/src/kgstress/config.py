"""Run configuration: a JSON file whose keys mirror :class:`RunConfig`, overridable by CLI flags.

Example::

    {
      "benchmark": "roget",
      "truth": "fixtures/roget/sample_heads.jsonl",
      "cache_dir": "fixtures/roget/llm_cache",
      "offline": true,
      "match_threshold": 80
    }

Relative paths resolve against the config file's directory.
"""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path

BENCHMARKS = ("roget", "philosophers", "bibliographic", "custom")
CACHE_DIR_ENV = "KGSTRESS_CACHE_DIR"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    benchmark: str = "roget"
    truth: str | None = None
    cache_dir: str | None = None
    schema: str | None = None
    prompt: str | None = None
    oracle_cache: str | None = None
    oracle_cache_only: bool = True
    offline: bool = False
    match_threshold: float = 80.0
    mobility_threshold: float = 0.25
    sample_seed: int = 42
    classifier_seed: int = 42
    model: str = "gpt-4.1-mini"
    api_base: str = "https://api.openai.com/v1"
    max_workers: int = 4
    embedding: str = "hashing"
    embedding_model: str = "all-MiniLM-L6-v2"
    embedding_url: str | None = None
    embedding_cache: str | None = None

    _PATHS = ("truth", "cache_dir", "schema", "prompt", "oracle_cache", "embedding_cache")

    def __post_init__(self) -> None:
        if self.cache_dir is None:
            self.cache_dir = os.environ.get(CACHE_DIR_ENV)

    def validate(self) -> None:
        if self.benchmark not in BENCHMARKS:
            raise ConfigError(f"unknown benchmark {self.benchmark!r}; expected one of {BENCHMARKS}")
        if not 0 <= self.match_threshold <= 100:
            raise ConfigError("match_threshold must lie in [0, 100]")
        if not 0 < self.mobility_threshold <= 1:
            raise ConfigError("mobility_threshold must lie in (0, 1]")
        if self.max_workers < 1:
            raise ConfigError("max_workers must be at least 1")
        if self.truth is None:
            raise ConfigError("no truth file configured")
        if self.cache_dir is None:
            raise ConfigError(f"no cache directory configured (flag, config file, or {CACHE_DIR_ENV})")
        if self.benchmark == "custom" and (self.schema is None or self.prompt is None):
            raise ConfigError("a custom benchmark needs both a schema and a prompt template")
        for name in ("truth", "schema", "prompt"):
            value = getattr(self, name)
            if value is not None and not Path(value).exists():
                raise ConfigError(f"{name} path does not exist: {value}")

    @classmethod
    def load(cls, path: str | Path) -> RunConfig:
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key in cls._PATHS:
            if data.get(key) is not None and not Path(data[key]).is_absolute():
                data[key] = str(path.parent / data[key])
        return cls(**data)

    def override(self, **values) -> RunConfig:
        for key, value in values.items():
            if value is not None:
                setattr(self, key, value)
        return self

    def to_dict(self) -> dict:
        return asdict(self)
