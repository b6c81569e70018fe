"""Sentence-embedding providers and a replayable embedding cache.

Providers share one contract: ``model`` and ``dimension`` attributes and
``embed(texts) -> ndarray (len(texts), dimension)``. Remote providers speak
``{"model": str, "texts": [str]} -> {"vectors": [[float]]}`` and announce
``{"model": str, "dimension": int}`` at handshake.
"""
from __future__ import annotations

import hashlib
import json
import subprocess
import threading
import urllib.error
import urllib.request
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

DEFAULT_MODEL = "all-MiniLM-L6-v2"
DEFAULT_DIMENSION = 384
CACHE_FORMAT = "kgstress.embedding_cache"
CACHE_VERSION = 1


class ProviderUnavailable(RuntimeError):
    pass


class DimensionMismatch(ValueError):
    pass


class EmbeddingProvider(Protocol):
    model: str
    dimension: int

    def embed(self, texts: Sequence[str]) -> np.ndarray: ...


def _check(vectors: np.ndarray, n: int, dimension: int) -> np.ndarray:
    if vectors.shape != (n, dimension):
        raise DimensionMismatch(f"provider returned shape {vectors.shape}, expected ({n}, {dimension})")
    if not np.all(np.isfinite(vectors)):
        raise ProviderUnavailable("provider returned non-finite values")
    return vectors


class HashingEmbedder:
    """Deterministic offline embedder: signed feature hashing of word tokens
    and character trigrams. Captures surface overlap only, not meaning."""

    def __init__(self, dimension: int = DEFAULT_DIMENSION, model: str = "hashing-char3"):
        self.dimension = dimension
        self.model = model

    def _vector(self, text: str) -> np.ndarray:
        v = np.zeros(self.dimension)
        text = " ".join(text.lower().split())
        if not text:
            return v
        padded = f" {text} "
        feats = text.split() + [padded[i:i + 3] for i in range(len(padded) - 2)]
        for feat in feats:
            h = int.from_bytes(hashlib.blake2b(feat.encode("utf-8"), digest_size=8).digest(), "little")
            v[h % self.dimension] += 1.0 if (h >> 63) & 1 else -1.0
        return v

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dimension))
        return np.vstack([self._vector(t) for t in texts])


class HttpEmbeddingProvider:
    """Client for an embedding service exposing ``GET /handshake`` and ``POST /embed``."""

    def __init__(self, base_url: str, model: str = DEFAULT_MODEL, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.timeout = timeout
        info = self._request("GET", "/handshake")
        self.dimension = int(info["dimension"])
        if info.get("model") not in (None, model):
            raise ProviderUnavailable(f"service hosts {info.get('model')!r}, not {model!r}")

    def _request(self, method: str, path: str, payload: dict | None = None) -> dict:
        data = json.dumps(payload).encode("utf-8") if payload is not None else None
        req = urllib.request.Request(
            self.base_url + path, data=data, method=method, headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return json.load(resp)
        except (urllib.error.URLError, OSError, json.JSONDecodeError) as exc:
            raise ProviderUnavailable(f"embedding service {self.base_url}: {exc}") from None

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dimension))
        out = self._request("POST", "/embed", {"model": self.model, "texts": list(texts)})
        return _check(np.asarray(out["vectors"], dtype=float), len(texts), self.dimension)


class SubprocessEmbeddingProvider:
    """Runs a worker speaking one JSON object per line on stdin/stdout.

    The worker's first output line is the handshake. The default command is
    ``python -m kgstress.embed_worker --model <model>``.
    """

    def __init__(self, command: Sequence[str] | None = None, model: str = DEFAULT_MODEL, timeout: float = 120.0):
        import sys

        self.model = model
        self.command = list(command) if command else [sys.executable, "-m", "kgstress.embed_worker", "--model", model]
        self._lock = threading.Lock()
        try:
            self._proc = subprocess.Popen(
                self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True
            )
        except OSError as exc:
            raise ProviderUnavailable(f"cannot start embedding worker: {exc}") from None
        info = self._readline()
        if "error" in info:
            self.close()
            raise ProviderUnavailable(f"embedding worker failed: {info['error']}")
        self.dimension = int(info["dimension"])

    def _readline(self) -> dict:
        line = self._proc.stdout.readline()
        if not line:
            err = self._proc.stderr.read() if self._proc.poll() is not None else ""
            raise ProviderUnavailable(f"embedding worker exited: {err.strip()[-500:]}")
        return json.loads(line)

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dimension))
        with self._lock:
            try:
                self._proc.stdin.write(json.dumps({"model": self.model, "texts": list(texts)}) + "\n")
                self._proc.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                raise ProviderUnavailable(f"embedding worker pipe closed: {exc}") from None
            out = self._readline()
        if "error" in out:
            raise ProviderUnavailable(out["error"])
        return _check(np.asarray(out["vectors"], dtype=float), len(texts), self.dimension)

    def close(self) -> None:
        if self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=10)

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass


def text_key(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class CachedEmbeddings:
    """Wraps a provider; vectors persist in a JSONL file keyed by (model, sha256(text)).

    The first line is a header ``{"format", "version"}``. With ``provider``
    set to ``None`` the cache replays only and a miss raises
    :class:`ProviderUnavailable`.
    """

    def __init__(self, provider: EmbeddingProvider | None, path: str | Path | None = None, model: str | None = None,
                 dimension: int | None = None):
        self.provider = provider
        self.model = provider.model if provider else (model or DEFAULT_MODEL)
        self.dimension = provider.dimension if provider else (dimension or DEFAULT_DIMENSION)
        self.path = Path(path) if path else None
        self._lock = threading.Lock()
        self._store: dict[tuple[str, str], np.ndarray] = {}
        if self.path and self.path.exists():
            self._load()

    def _load(self) -> None:
        lines = self.path.read_text(encoding="utf-8").splitlines()
        if not lines:
            return
        header = json.loads(lines[0])
        if header.get("format") != CACHE_FORMAT or header.get("version") != CACHE_VERSION:
            raise ValueError(f"{self.path}: not a version-{CACHE_VERSION} embedding cache")
        for line in lines[1:]:
            if line.strip():
                d = json.loads(line)
                self._store[(d["model"], d["sha256"])] = np.asarray(d["vector"], dtype=float)

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        keys = [(self.model, text_key(t)) for t in texts]
        missing: dict[tuple[str, str], str] = {}
        for k, t in zip(keys, texts):
            if k not in self._store:
                missing.setdefault(k, t)
        if missing:
            if self.provider is None:
                raise ProviderUnavailable(f"{len(missing)} text(s) missing from the embedding cache")
            vecs = self.provider.embed(list(missing.values()))
            with self._lock:
                new_file = self.path is not None and not self.path.exists()
                fh = open(self.path, "a", encoding="utf-8") if self.path else None
                try:
                    if fh and new_file:
                        fh.write(json.dumps({"format": CACHE_FORMAT, "version": CACHE_VERSION}) + "\n")
                    for k, v in zip(missing, vecs):
                        self._store[k] = np.asarray(v, dtype=float)
                        if fh:
                            fh.write(json.dumps({"model": k[0], "sha256": k[1], "vector": v.tolist()}) + "\n")
                finally:
                    if fh:
                        fh.close()
        if not texts:
            return np.zeros((0, self.dimension))
        return np.vstack([self._store[k] for k in keys])


def make_provider(kind: str = "hashing", model: str = DEFAULT_MODEL, url: str | None = None,
                  command: Sequence[str] | None = None, dimension: int = DEFAULT_DIMENSION) -> EmbeddingProvider:
    if kind == "hashing":
        return HashingEmbedder(dimension)
    if kind == "http":
        if not url:
            raise ProviderUnavailable("http embedding provider needs a url")
        return HttpEmbeddingProvider(url, model)
    if kind == "subprocess":
        return SubprocessEmbeddingProvider(command, model)
    raise ValueError(f"unknown embedding provider kind {kind!r}")
