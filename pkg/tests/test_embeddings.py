from __future__ import annotations

import sys

import numpy as np
import pytest

from kgstress.embeddings import (
    CachedEmbeddings,
    DimensionMismatch,
    HashingEmbedder,
    HttpEmbeddingProvider,
    ProviderUnavailable,
    SubprocessEmbeddingProvider,
    make_provider,
)


class Counting:
    model = "fake"
    dimension = 4

    def __init__(self):
        self.calls = []

    def embed(self, texts):
        self.calls.append(list(texts))
        return np.array([[len(t), 1.0, 0.0, 2.0] for t in texts])


def test_hashing_embedder_is_deterministic():
    e = HashingEmbedder(64)
    a = e.embed(["Brown", "tawny"])
    assert a.shape == (2, 64)
    assert np.array_equal(a, HashingEmbedder(64).embed(["brown ", "tawny"]))
    assert e.embed([]).shape == (0, 64)


def test_cache_persists_and_dedupes(tmp_path):
    path = tmp_path / "emb.jsonl"
    base = Counting()
    cache = CachedEmbeddings(base, path)
    out = cache.embed(["a", "bb", "a"])
    assert base.calls == [["a", "bb"]]
    assert out[2].tolist() == out[0].tolist()
    replay = CachedEmbeddings(None, path, model="fake", dimension=4)
    assert np.array_equal(replay.embed(["bb"]), out[1:2])
    with pytest.raises(ProviderUnavailable):
        replay.embed(["new"])


def test_cache_rejects_foreign_file(tmp_path):
    path = tmp_path / "emb.jsonl"
    path.write_text('{"format": "other", "version": 1}\n', encoding="utf-8")
    with pytest.raises(ValueError):
        CachedEmbeddings(None, path)


def test_subprocess_provider_with_hashing_worker():
    p = SubprocessEmbeddingProvider([sys.executable, "-m", "kgstress.embed_worker", "--hashing", "--dimension", "32"])
    try:
        got = p.embed(["brown", "hazel"])
        assert np.array_equal(got, HashingEmbedder(32).embed(["brown", "hazel"]))
    finally:
        p.close()


def test_subprocess_provider_reports_dead_worker():
    with pytest.raises(ProviderUnavailable):
        SubprocessEmbeddingProvider([sys.executable, "-c", "import sys; sys.exit(1)"])


def test_http_provider_unreachable():
    with pytest.raises(ProviderUnavailable):
        HttpEmbeddingProvider("http://127.0.0.1:9", timeout=0.5)


def test_make_provider():
    assert isinstance(make_provider("hashing"), HashingEmbedder)
    with pytest.raises(ProviderUnavailable):
        make_provider("http")
    with pytest.raises(ValueError):
        make_provider("telepathy")


def test_dimension_check():
    from kgstress.embeddings import _check

    with pytest.raises(DimensionMismatch):
        _check(np.zeros((2, 3)), 2, 4)
