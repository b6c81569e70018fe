"""Embedding similarity and the logistic-regression hallucination classifier."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .embeddings import DimensionMismatch, EmbeddingProvider
from .kernels import levenshtein
from .record_eval import EvaluationRun
from .rng import shuffle


class ZeroVector(ValueError):
    pass


class SingleClassTraining(ValueError):
    pass


class EmptyTestSet(ValueError):
    pass


def cosine_similarity(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatch(f"vector shapes differ: {a.shape} vs {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroVector("cosine similarity is undefined for a zero vector")
    return float(np.dot(a, b) / (na * nb))


def join_list(values: Sequence[str]) -> str:
    return ", ".join(v for v in values if v)


def field_similarity(truth: Sequence[str], generated: Sequence[str], provider: EmbeddingProvider) -> float:
    """Cosine of the embeddings of the two lists, each joined into one string.

    Empty against empty is 1.0; empty against non-empty is 0.0.
    """
    a, b = join_list(truth), join_list(generated)
    if not a or not b:
        return 1.0 if a == b else 0.0
    if a == b:
        return 1.0
    va, vb = provider.embed([a, b])
    return cosine_similarity(va, vb)


# -- features ------------------------------------------------------------------

FEATURE_NAMES = ("token_jaccard", "norm_edit_distance", "cosine_sim")


@dataclass(frozen=True)
class FeatureVector:
    token_jaccard: float
    norm_edit_distance: float
    cosine_sim: float

    def as_array(self) -> np.ndarray:
        return np.array([self.token_jaccard, self.norm_edit_distance, self.cosine_sim])


def token_jaccard(a: str, b: str) -> float:
    ta, tb = set(a.lower().split()), set(b.lower().split())
    if not ta and not tb:
        return 1.0
    return len(ta & tb) / len(ta | tb)


def norm_edit_distance(a: str, b: str) -> float:
    """Levenshtein distance over the longer length; 0 for two empty strings."""
    longest = max(len(a), len(b))
    return levenshtein(a, b) / longest if longest else 0.0


def _cosine_or_convention(a: str, b: str, va, vb) -> float:
    if not a.strip() or not b.strip():
        return 1.0 if a.strip() == b.strip() else 0.0
    if a == b:
        return 1.0
    return cosine_similarity(va, vb)


def featurize(truth: str, generated: str, provider: EmbeddingProvider) -> FeatureVector:
    va = vb = None
    if truth.strip() and generated.strip() and truth != generated:
        va, vb = provider.embed([truth, generated])
    return FeatureVector(
        token_jaccard(truth, generated),
        norm_edit_distance(truth, generated),
        _cosine_or_convention(truth, generated, va, vb),
    )


def featurize_many(pairs: Sequence[tuple[str, str]], provider: EmbeddingProvider) -> list[FeatureVector]:
    """Batch version of :func:`featurize`: one provider call for all distinct strings."""
    texts = sorted({t for pair in pairs for t in pair if t.strip()})
    vectors = dict(zip(texts, provider.embed(texts))) if texts else {}
    return [
        FeatureVector(
            token_jaccard(t, g),
            norm_edit_distance(t, g),
            _cosine_or_convention(t, g, vectors.get(t), vectors.get(g)),
        )
        for t, g in pairs
    ]


def samples_from_run(run: EvaluationRun, provider: EmbeddingProvider) -> list[tuple[FeatureVector, int]]:
    """Training samples from Stage-2 labels: 1 = hallucinated, 0 = matched or
    confirmed extra knowledge. Unverified values are left out."""
    kept = [v for v in run.values if v.label != "unverified"]
    feats = featurize_many([(v.truth, v.generated) for v in kept], provider)
    return [(f, int(v.is_hallucination)) for f, v in zip(feats, kept)]


# -- classifier ----------------------------------------------------------------

@dataclass
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 500
    l2: float = 1e-4
    test_fraction: float = 0.2
    seed: int = 42


@dataclass
class ClassifierModel:
    weights: list[float]
    bias: float
    feature_mean: list[float]
    feature_scale: list[float]
    train_meta: dict = field(default_factory=dict)
    loss_history: list[float] = field(default_factory=list)

    def decision_function(self, features) -> np.ndarray:
        x = _as_matrix(features)
        z = (x - np.asarray(self.feature_mean)) / np.asarray(self.feature_scale)
        return z @ np.asarray(self.weights) + self.bias

    def predict_proba(self, features) -> np.ndarray:
        return _sigmoid(self.decision_function(features))

    def predict(self, features, threshold: float = 0.5) -> np.ndarray:
        return (self.predict_proba(features) >= threshold).astype(int)

    def holdout(self, samples: Sequence[tuple[FeatureVector, int]]) -> list[tuple[FeatureVector, int]]:
        """The held-out samples recorded at training time."""
        return [samples[i] for i in self.train_meta.get("test_indices", [])]

    def to_dict(self) -> dict:
        return asdict(self)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> ClassifierModel:
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))


def _as_matrix(features) -> np.ndarray:
    if isinstance(features, np.ndarray):
        return features.reshape(-1, len(FEATURE_NAMES)).astype(float)
    rows = [f.as_array() if isinstance(f, FeatureVector) else np.asarray(f, dtype=float) for f in features]
    if not rows:
        return np.zeros((0, len(FEATURE_NAMES)))
    return np.vstack(rows)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def stratified_split(labels: Sequence[int], test_fraction: float, seed: int) -> tuple[list[int], list[int]]:
    """Per-class seeded shuffle; the first round(fraction * class size) go to the test side."""
    train, test = [], []
    for cls in sorted(set(labels)):
        idx = shuffle([i for i, y in enumerate(labels) if y == cls], seed)
        k = int(math.floor(test_fraction * len(idx) + 0.5))
        test += idx[:k]
        train += idx[k:]
    return sorted(train), sorted(test)


def _loss(x: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, l2: float) -> float:
    z = x @ w + b
    return float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * float(w @ w))


def train(samples: Sequence[tuple[FeatureVector, int]], config: TrainConfig | None = None) -> ClassifierModel:
    """Full-batch gradient descent on L2-penalised log-loss over standardized features."""
    config = config or TrainConfig()
    labels = [int(y) for _, y in samples]
    if config.test_fraction > 0:
        train_idx, test_idx = stratified_split(labels, config.test_fraction, config.seed)
    else:
        train_idx, test_idx = list(range(len(samples))), []
    y = np.asarray([labels[i] for i in train_idx], dtype=float)
    if len(set(y.tolist())) < 2:
        raise SingleClassTraining("training split needs both classes")
    x_raw = _as_matrix([samples[i][0] for i in train_idx])
    mean = x_raw.mean(axis=0)
    scale = x_raw.std(axis=0)
    scale[scale == 0] = 1.0
    x = (x_raw - mean) / scale

    w = np.zeros(x.shape[1])
    b = 0.0
    n = len(y)
    history = [_loss(x, y, w, b, config.l2)]
    for _ in range(config.epochs):
        resid = _sigmoid(x @ w + b) - y
        grad_w = x.T @ resid / n + config.l2 * w
        grad_b = float(resid.mean())
        w = w - config.learning_rate * grad_w
        b = b - config.learning_rate * grad_b
        history.append(_loss(x, y, w, b, config.l2))
    return ClassifierModel(
        weights=w.tolist(),
        bias=float(b),
        feature_mean=mean.tolist(),
        feature_scale=scale.tolist(),
        train_meta=asdict(config) | {"train_size": len(train_idx), "test_indices": test_idx,
                                      "features": list(FEATURE_NAMES)},
        loss_history=history,
    )


# -- metrics -------------------------------------------------------------------

def roc_auc(labels: Sequence[int], scores: Sequence[float]) -> float:
    """Mann-Whitney AUC with average ranks for tied scores; NaN for a single class."""
    from .metrics import average_ranks

    labels = [int(y) for y in labels]
    n_pos = sum(labels)
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        return float("nan")
    ranks = average_ranks([float(s) for s in scores])
    # doubled ranks are integers, so the numerator is exact
    twice = sum(int(round(2 * r)) for r, y in zip(ranks, labels) if y == 1) - n_pos * (n_pos + 1)
    return twice / (2 * n_pos * n_neg)


def matthews_corrcoef(tp: int, fp: int, fn: int, tn: int) -> float:
    denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if denom == 0:
        return 0.0
    return (tp * tn - fp * fn) / math.sqrt(denom)


def log_loss(labels: Sequence[int], probs: Sequence[float], eps: float = 1e-15) -> float:
    y = np.asarray(labels, dtype=float)
    p = np.clip(np.asarray(probs, dtype=float), eps, 1 - eps)
    return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))


def scores_metrics(labels: Sequence[int], probs: Sequence[float], threshold: float = 0.5) -> dict[str, float]:
    if len(labels) == 0:
        raise EmptyTestSet("no test samples")
    y = np.asarray(labels, dtype=int)
    pred = (np.asarray(probs) >= threshold).astype(int)
    tp = int(np.sum((pred == 1) & (y == 1)))
    fp = int(np.sum((pred == 1) & (y == 0)))
    fn = int(np.sum((pred == 0) & (y == 1)))
    tn = int(np.sum((pred == 0) & (y == 0)))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {
        "f1": f1,
        "precision": precision,
        "recall": recall,
        "accuracy": (tp + tn) / len(y),
        "roc_auc": roc_auc(y.tolist(), list(probs)),
        "log_loss": log_loss(y.tolist(), list(probs)),
        "mcc": matthews_corrcoef(tp, fp, fn, tn),
    }


def classifier_metrics(model: ClassifierModel, test: Sequence[tuple[FeatureVector, int]]) -> dict[str, float]:
    if not test:
        raise EmptyTestSet("no test samples")
    probs = model.predict_proba([f for f, _ in test])
    return scores_metrics([y for _, y in test], probs.tolist())
