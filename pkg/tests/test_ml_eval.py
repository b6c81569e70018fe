from __future__ import annotations

import math
import random

import numpy as np
import pytest
from sklearn.metrics import log_loss as sk_log_loss
from sklearn.metrics import matthews_corrcoef as sk_mcc
from sklearn.metrics import roc_auc_score

from kgstress.embeddings import HashingEmbedder
from kgstress.ml_eval import (
    ClassifierModel,
    EmptyTestSet,
    FeatureVector,
    SingleClassTraining,
    TrainConfig,
    ZeroVector,
    cosine_similarity,
    featurize,
    featurize_many,
    field_similarity,
    log_loss,
    matthews_corrcoef,
    norm_edit_distance,
    roc_auc,
    scores_metrics,
    stratified_split,
    token_jaccard,
    train,
)

from oracles import concordance_auc


def _samples(n: int, seed: int, shift: float = 0.6):
    rng = random.Random(seed)
    out = []
    for i in range(n):
        y = i % 3 == 0
        f = FeatureVector(rng.random() * 0.5 + (0 if y else shift), rng.random() * 0.5 + (shift if y else 0), rng.random())
        out.append((f, int(y)))
    return out


def test_cosine():
    assert cosine_similarity([1, 0], [0, 1]) == 0.0
    assert cosine_similarity([1, 2], [2, 4]) == pytest.approx(1.0)
    with pytest.raises(ZeroVector):
        cosine_similarity([0, 0], [1, 0])


def test_field_similarity_conventions():
    p = HashingEmbedder()
    assert field_similarity([], [], p) == 1.0
    assert field_similarity(["a"], [], p) == 0.0
    assert field_similarity(["x", "y"], ["x", "y"], p) == 1.0
    assert 0.0 < field_similarity(["dark brown"], ["brown"], p) < 1.0


def test_features():
    assert token_jaccard("a b", "b c") == pytest.approx(1 / 3)
    assert token_jaccard("", "") == 1.0
    assert norm_edit_distance("kitten", "sitting") == pytest.approx(3 / 7)
    assert norm_edit_distance("", "") == 0.0
    p = HashingEmbedder()
    f = featurize("brown", "brown", p)
    assert f == FeatureVector(1.0, 0.0, 1.0)
    assert featurize("", "tan", p).cosine_sim == 0.0
    pairs = [("brown", "tawny"), ("hazel", "hazel"), ("", "")]
    assert featurize_many(pairs, p) == [featurize(a, b, p) for a, b in pairs]


def test_auc_against_concordance_and_sklearn():
    rng = random.Random(1)
    for _ in range(100):
        n = rng.randint(2, 200)
        y = [rng.randint(0, 1) for _ in range(n)]
        y[0], y[1] = 0, 1
        s = [round(rng.random(), 1) for _ in range(n)]
        assert roc_auc(y, s) == float(concordance_auc(y, s))
        assert roc_auc(y, s) == pytest.approx(roc_auc_score(y, s), abs=1e-12)
    assert math.isnan(roc_auc([1, 1], [0.2, 0.3]))


def test_mcc_and_log_loss_against_sklearn():
    rng = random.Random(2)
    for _ in range(50):
        y = [rng.randint(0, 1) for _ in range(40)]
        pred = [rng.randint(0, 1) for _ in range(40)]
        tp = sum(a and b for a, b in zip(y, pred))
        fp = sum((not a) and b for a, b in zip(y, pred))
        fn = sum(a and not b for a, b in zip(y, pred))
        tn = 40 - tp - fp - fn
        assert matthews_corrcoef(tp, fp, fn, tn) == pytest.approx(sk_mcc(y, pred), abs=1e-12)
        probs = [rng.random() for _ in range(40)]
        assert log_loss(y, probs) == pytest.approx(sk_log_loss(y, probs, labels=[0, 1]), abs=1e-12)
    assert matthews_corrcoef(5, 0, 0, 0) == 0.0


def test_stratified_split():
    labels = [1] * 10 + [0] * 40
    train_idx, test_idx = stratified_split(labels, 0.2, 42)
    assert sorted(train_idx + test_idx) == list(range(50))
    assert sum(labels[i] for i in test_idx) == 2 and len(test_idx) == 10
    assert stratified_split(labels, 0.2, 42) == (train_idx, test_idx)


def test_training_reduces_loss_and_separates():
    samples = _samples(300, 3)
    model = train(samples, TrainConfig())
    hist = model.loss_history
    assert len(hist) == 501
    assert all(b <= a + 1e-15 for a, b in zip(hist, hist[1:]))
    test = model.holdout(samples)
    assert len(test) == 60
    m = scores_metrics([y for _, y in test], model.predict_proba([f for f, _ in test]).tolist())
    assert m["roc_auc"] > 0.95 and m["f1"] > 0.8


def test_training_reaches_sklearn_optimum():
    from sklearn.linear_model import LogisticRegression

    # overlapping classes, so the penalised optimum is finite and gradient descent reaches it
    samples = _samples(300, 4, shift=0.2)
    model = train(samples, TrainConfig(test_fraction=0.0, epochs=5000, learning_rate=1.0))
    x = np.vstack([f.as_array() for f, _ in samples])
    y = np.array([lab for _, lab in samples])
    z = (x - x.mean(axis=0)) / x.std(axis=0)
    ref = LogisticRegression(C=1.0 / (1e-4 * len(y)), tol=1e-10, max_iter=10000).fit(z, y)
    assert model.weights == pytest.approx(list(ref.coef_[0]), abs=1e-4)


def test_save_load_bit_identical(tmp_path):
    samples = _samples(120, 5)
    model = train(samples)
    model.save(tmp_path / "m.json")
    loaded = ClassifierModel.load(tmp_path / "m.json")
    x = [f for f, _ in samples]
    assert np.array_equal(model.predict_proba(x), loaded.predict_proba(x))
    assert loaded.train_meta["seed"] == 42


def test_error_paths():
    with pytest.raises(SingleClassTraining):
        train([(FeatureVector(0, 0, 0), 1)] * 10)
    with pytest.raises(EmptyTestSet):
        scores_metrics([], [])
