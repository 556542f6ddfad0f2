import json

import numpy as np
import pytest

from crowdcorrect.evaluation import (
    HINGE_SGD,
    LOGISTIC,
    DesignMatrix,
    EmptyVocabulary,
    Hyper,
    compare,
    doc_stems,
    evaluate,
    logistic_gradient,
    logistic_loss,
    predict,
    preprocess,
    stratified_split,
    train,
)

from oracles import finite_difference_gradient

STOP = {"the", "a", "of", "and", "to"}


def test_doc_stems_pipeline():
    stems = doc_stems("The doctors and Hospitals! #health2016", STOP)
    assert stems == ["doctor", "hospit", "health2016"]


def test_preprocess_min_count():
    docs = [("rare rare common common common", 1), ("common", 0)]
    matrix = preprocess(docs, STOP, min_count=3)
    assert matrix.vocabulary == ["common"]  # "rare" occurs only twice


def test_preprocess_stopwords_removed():
    docs = [("the the the doctor doctor doctor", 1), ("doctor", 0)]
    matrix = preprocess(docs, STOP, min_count=3)
    assert matrix.vocabulary == ["doctor"]


def test_preprocess_deterministic_vocab_order():
    docs = [("beta alpha beta alpha beta alpha", 1), ("alpha beta", 0)]
    assert preprocess(docs, STOP).vocabulary == preprocess(docs, STOP).vocabulary == ["alpha", "beta"]


def test_preprocess_empty_vocabulary():
    with pytest.raises(EmptyVocabulary):
        preprocess([("the of and", 1)], STOP)


def test_preprocess_fixed_vocabulary_skips_min_count():
    matrix = preprocess([("solo word", 1)], STOP, vocabulary=["solo", "word", "zzz"])
    assert matrix.rows.shape == (1, 3)
    assert matrix.rows[0].tolist() == [1.0, 1.0, 0.0]


def test_zero_weight_logistic_predicts_half():
    rows = np.array([[1.0, 2.0], [0.0, 1.0]])
    w = np.zeros(3)
    from crowdcorrect.evaluation import _augment, _sigmoid

    p = _sigmoid(_augment(rows) @ w)
    assert np.allclose(p, 0.5)


def test_gradient_matches_central_differences():
    rng = np.random.default_rng(0)
    rows = rng.normal(size=(5, 8))
    labels = (rng.random(5) > 0.5).astype(float)
    for _ in range(10):
        w = rng.normal(size=8)
        analytic = logistic_gradient(w, rows, labels)
        numeric = np.array(
            finite_difference_gradient(
                lambda v: logistic_loss(np.array(v), rows, labels), w.tolist()
            )
        )
        denom = np.maximum(np.abs(numeric), 1e-8)
        assert np.max(np.abs(analytic - numeric) / denom) <= 1e-4


def test_separable_toy_set_trains_to_perfection():
    rows = np.array([[0.0, 0.0], [0.0, 1.0], [3.0, 3.0], [3.0, 4.0]])
    labels = np.array([0.0, 0.0, 1.0, 1.0])
    matrix = DesignMatrix(vocabulary=["x", "y"], rows=rows, labels=labels)
    for kind in (LOGISTIC, HINGE_SGD):
        model = train(matrix, kind, Hyper(learning_rate=0.1, epochs=500, seed=42))
        assert np.array_equal(predict(model, rows), labels), kind


def test_logistic_loss_monotone_on_toy_set():
    rows = np.array([[0.0, 0.0], [0.0, 1.0], [3.0, 3.0], [3.0, 4.0]])
    labels = np.array([0.0, 0.0, 1.0, 1.0])
    from crowdcorrect.evaluation import _augment

    X = _augment(rows)
    w = np.zeros(3)
    losses = [logistic_loss(w, X, labels)]
    for _ in range(50):
        w = w - 0.1 * logistic_gradient(w, X, labels)
        losses.append(logistic_loss(w, X, labels))
    assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))


def test_train_needs_both_classes():
    matrix = DesignMatrix(["x"], np.array([[1.0], [2.0]]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        train(matrix, LOGISTIC)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_detected():
    from crowdcorrect.evaluation import DivergenceDetected

    matrix = DesignMatrix(["x"], np.array([[np.inf], [1.0]]), np.array([0.0, 1.0]))
    with pytest.raises(DivergenceDetected):
        train(matrix, LOGISTIC, Hyper(epochs=5))


def test_metrics_perfect():
    rows = np.array([[5.0], [0.0]])
    labels = np.array([1.0, 0.0])
    matrix = DesignMatrix(["x"], rows, labels)
    model = train(matrix, LOGISTIC, Hyper(epochs=300))
    metrics = evaluate(model, matrix)
    assert (metrics["precision"], metrics["recall"], metrics["f1"]) == (1.0, 1.0, 1.0)


def test_metrics_all_positive_half_true():
    # predictions all positive, half the truth positive: P=.5, R=1, F1=2/3
    matrix = DesignMatrix(["x"], np.array([[1.0], [1.0]]), np.array([1.0, 0.0]))
    model = train(matrix, LOGISTIC, Hyper(epochs=0))
    model.weights = np.array([10.0, 10.0])  # force positive predictions
    metrics = evaluate(model, matrix)
    assert metrics["precision"] == pytest.approx(0.5)
    assert metrics["recall"] == pytest.approx(1.0)
    assert metrics["f1"] == pytest.approx(2 / 3)


def test_metrics_zero_positive_flagged():
    matrix = DesignMatrix(["x"], np.array([[1.0], [1.0]]), np.array([1.0, 0.0]))
    model = train(matrix, LOGISTIC, Hyper(epochs=0))
    model.weights = np.array([-10.0, -10.0])
    metrics = evaluate(model, matrix)
    assert metrics["precision"] == 0.0 and metrics["zero_predicted_positive"]


def test_evaluate_rejects_vocabulary_mismatch():
    m1 = DesignMatrix(["x"], np.array([[1.0]]), np.array([1.0]))
    model = train(
        DesignMatrix(["y"], np.array([[1.0], [0.0]]), np.array([1.0, 0.0])), LOGISTIC
    )
    with pytest.raises(ValueError):
        evaluate(model, m1)


def test_stratified_split_is_seeded_and_stratified():
    labels = np.array([0.0] * 40 + [1.0] * 10)
    train_idx, test_idx = stratified_split(labels, seed=42)
    assert stratified_split(labels, seed=42) == (train_idx, test_idx)
    assert len(test_idx) == 10  # 8 negatives + 2 positives
    assert sum(labels[i] for i in test_idx) == 2
    assert set(train_idx) | set(test_idx) == set(range(50))
    assert not set(train_idx) & set(test_idx)


def _corpus(n=60):
    docs = []
    for i in range(n):
        if i % 2:
            docs.append((f"doctor hospital doctor nurse visit{i % 3}", 1))
        else:
            docs.append((f"budget finance money trade visit{i % 3}", 0))
    return docs


def test_compare_identical_corpora_zero_deltas():
    docs = _corpus()
    report = compare(docs, list(docs), STOP, Hyper(epochs=50))
    for delta in report.deltas:
        assert delta["d_precision"] == 0.0
        assert delta["d_recall"] == 0.0
        assert delta["d_f1"] == 0.0


def test_compare_report_schema():
    report = compare(_corpus(), _corpus(), STOP, Hyper(epochs=20))
    assert len(report.rows) == 4
    assert len(report.deltas) == 2
    payload = json.loads(report.to_json())
    assert {r["dataset"] for r in payload["rows"]} == {"raw", "curated"}
    assert {r["classifier"] for r in payload["rows"]} == {LOGISTIC, HINGE_SGD}
    assert all(0.0 <= r[k] <= 1.0 for r in payload["rows"]
               for k in ("precision", "recall", "f1"))
    for row in payload["rows"]:
        p, r, f1 = row["precision"], row["recall"], row["f1"]
        expected = 2 * p * r / (p + r) if p + r > 0 else 0.0
        assert f1 == pytest.approx(expected)


def test_compare_requires_alignment():
    with pytest.raises(ValueError):
        compare(_corpus(10), _corpus(12), STOP)
