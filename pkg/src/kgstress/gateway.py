"""Cached, retrying access to a chat-completion provider.

Cache layout (version 1)::

    <cache_dir>/<key[:2]>/<key>.json

where ``key`` is the SHA-256 of the canonical JSON of the query. Each entry
holds ``{"version", "key", "spec", "raw", "raw_sha256", "parsed_ok",
"timestamp"}``. Entries are written once, via a temp file and rename.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import tempfile
import time
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Protocol, Sequence

logger = logging.getLogger(__name__)

CACHE_VERSION = 1
RETRY_DELAYS = (1.0, 2.0, 4.0, 8.0)
MAX_TOKENS_CAP = 1024
DEFAULT_MODEL = "gpt-4.1-mini"
API_KEY_ENV = "OPENAI_API_KEY"


class GatewayError(RuntimeError):
    pass


class ProviderError(GatewayError):
    """A single failed provider call; retried."""


class ProviderExhausted(GatewayError):
    pass


class AuthMissing(GatewayError):
    pass


class CacheCorrupt(GatewayError):
    pass


class CacheMiss(GatewayError):
    pass


class Unparseable(ValueError):
    pass


@dataclass(frozen=True)
class QuerySpec:
    prompt: str
    model: str = DEFAULT_MODEL
    max_tokens: int = MAX_TOKENS_CAP
    temperature: float = 0.0
    response_schema: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.prompt.strip():
            raise ValueError("prompt must be non-empty")
        if not 0 < self.max_tokens <= MAX_TOKENS_CAP:
            raise ValueError(f"max_tokens must lie in 1..{MAX_TOKENS_CAP}")
        object.__setattr__(self, "response_schema", tuple(self.response_schema))

    def canonical(self) -> str:
        d = asdict(self)
        d["response_schema"] = list(self.response_schema)
        return json.dumps(d, sort_keys=True, separators=(",", ":"), ensure_ascii=False)

    @property
    def key(self) -> str:
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()


@dataclass
class CachedResponse:
    key: str
    raw: str
    parsed_ok: bool
    timestamp: str
    from_cache: bool = False


class ChatProvider(Protocol):
    def complete(self, spec: QuerySpec) -> str: ...


class OpenAIChatProvider:
    """Chat-completions over HTTPS; credentials from ``OPENAI_API_KEY`` by default."""

    def __init__(self, base_url: str = "https://api.openai.com/v1", api_key_env: str = API_KEY_ENV,
                 timeout: float = 120.0):
        self.base_url = base_url.rstrip("/")
        self.api_key_env = api_key_env
        self.timeout = timeout

    def complete(self, spec: QuerySpec) -> str:
        key = os.environ.get(self.api_key_env)
        if not key:
            raise AuthMissing(f"environment variable {self.api_key_env} is not set")
        body = {
            "model": spec.model,
            "messages": [{"role": "user", "content": spec.prompt}],
            "max_tokens": spec.max_tokens,
            "temperature": spec.temperature,
            "response_format": {"type": "json_object"},
        }
        req = urllib.request.Request(
            f"{self.base_url}/chat/completions",
            data=json.dumps(body).encode("utf-8"),
            headers={"Authorization": f"Bearer {key}", "Content-Type": "application/json"},
            method="POST",
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = json.load(resp)
        except urllib.error.HTTPError as exc:
            if exc.code in (401, 403):
                raise AuthMissing(f"provider rejected credentials ({exc.code})") from None
            raise ProviderError(f"HTTP {exc.code}") from None
        except (urllib.error.URLError, OSError, json.JSONDecodeError) as exc:
            raise ProviderError(str(exc)) from None
        try:
            return payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise ProviderError("unexpected response shape") from None


class ResponseCache:
    def __init__(self, root: str | Path):
        self.root = Path(root)

    def path_for(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> CachedResponse | None:
        path = self.path_for(key)
        if not path.exists():
            return None
        try:
            entry = json.loads(path.read_text(encoding="utf-8"))
            raw = entry["raw"]
            ok = entry.get("version") == CACHE_VERSION and entry.get("key") == key
            ok = ok and hashlib.sha256(raw.encode("utf-8")).hexdigest() == entry["raw_sha256"]
        except (json.JSONDecodeError, KeyError, TypeError, UnicodeDecodeError) as exc:
            raise CacheCorrupt(f"{path}: {exc}") from None
        if not ok:
            raise CacheCorrupt(f"{path}: checksum or key mismatch")
        return CachedResponse(key, raw, bool(entry["parsed_ok"]), entry["timestamp"], from_cache=True)

    def put(self, spec: QuerySpec, raw: str, parsed_ok: bool, timestamp: str | None = None) -> CachedResponse:
        key = spec.key
        path = self.path_for(key)
        existing = self.get(key)
        if existing is not None:
            return existing
        entry = {
            "version": CACHE_VERSION,
            "key": key,
            "spec": json.loads(spec.canonical()),
            "raw": raw,
            "raw_sha256": hashlib.sha256(raw.encode("utf-8")).hexdigest(),
            "parsed_ok": parsed_ok,
            "timestamp": timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(entry, fh, ensure_ascii=False, indent=1)
        os.replace(tmp, path)
        return CachedResponse(key, raw, parsed_ok, entry["timestamp"])


@dataclass
class Gateway:
    cache: ResponseCache
    provider: ChatProvider | None = None
    offline: bool = False
    retry_delays: Sequence[float] = RETRY_DELAYS
    sleep: Callable[[float], None] = time.sleep
    max_workers: int = 4
    calls: int = field(default=0, init=False)

    def query(self, spec: QuerySpec) -> CachedResponse:
        """Cache hit returns the stored bytes without touching the provider.

        A miss calls the provider once, then retries after each delay in
        ``retry_delays``; success is persisted before it is returned.
        """
        hit = self.cache.get(spec.key)
        if hit is not None:
            return hit
        if self.offline:
            raise CacheMiss(f"cache miss for {spec.key[:12]} in offline mode")
        if self.provider is None:
            raise AuthMissing("no provider configured for a cache miss")
        failures = []
        for attempt, delay in enumerate([*self.retry_delays, None]):
            self.calls += 1
            try:
                raw = self.provider.complete(spec)
            except ProviderError as exc:
                failures.append(str(exc))
                if delay is None:
                    break
                logger.info("provider call %d failed (%s); retrying in %.0f s", attempt + 1, exc, delay)
                self.sleep(delay)
                continue
            try:
                parse_structured(raw, spec.response_schema)
                ok = True
            except Unparseable:
                ok = False
            return self.cache.put(spec, raw, ok)
        raise ProviderExhausted(f"{len(failures)} failed attempts: {failures[-1]}")

    def query_many(self, specs: Sequence[QuerySpec]) -> list[CachedResponse]:
        if self.max_workers <= 1 or len(specs) <= 1:
            return [self.query(s) for s in specs]
        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            return list(pool.map(self.query, specs))


# -- structured parsing --------------------------------------------------------

_FENCE = re.compile(r"```(?:json|JSON)?\s*\n?(.*?)```", re.DOTALL)


def _first_object(text: str) -> dict | None:
    decoder = json.JSONDecoder()
    for m in re.finditer(r"\{", text):
        try:
            obj, _ = decoder.raw_decode(text, m.start())
        except json.JSONDecodeError:
            continue
        if isinstance(obj, dict):
            return obj
    return None


def _coerce(value: object) -> list[str]:
    if value is None:
        return []
    if isinstance(value, dict):
        return [json.dumps(value, sort_keys=True, ensure_ascii=False)]
    if isinstance(value, (list, tuple)):
        out = []
        for v in value:
            out += _coerce(v)
        return out
    if isinstance(value, bool):
        return [str(value).lower()]
    if isinstance(value, float) and value.is_integer():
        return [str(int(value))]
    text = str(value).strip()
    return [text] if text else []


def parse_structured(raw: str | bytes, schema: Sequence[str]) -> dict[str, list[str]]:
    """First JSON object in ``raw`` (code fences and surrounding prose allowed),
    restricted to ``schema`` fields, each coerced to a list of strings."""
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8", errors="replace")
    obj = None
    for m in _FENCE.finditer(raw):
        obj = _first_object(m.group(1))
        if obj is not None:
            break
    if obj is None:
        obj = _first_object(raw)
    if obj is None:
        raise Unparseable("no JSON object found in response")
    extra = set(obj) - set(schema)
    if extra and schema:
        logger.debug("dropping undeclared fields %s", sorted(extra))
    return {name: _coerce(obj.get(name)) for name in schema}


# -- prompts -------------------------------------------------------------------

def load_prompt(benchmark: str) -> str:
    from importlib.resources import files

    return (files("kgstress") / "data" / "prompts" / f"{benchmark}.txt").read_text(encoding="utf-8")


def render_prompt(template: str, **values: object) -> str:
    body = "\n".join(ln for ln in template.splitlines() if not ln.startswith("#"))
    return body.format(**values).strip() + "\n"
