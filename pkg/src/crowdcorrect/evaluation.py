"""Classifier-based evaluation of curation quality.

Mirrors the methodology of training the same lightweight text classifiers
on raw and on curated text and comparing precision / recall / F-measure:
stopword and punctuation removal, Porter stemming, a minimum token count of
3 for the vocabulary, then binomial logistic regression (full-batch gradient
descent) and a hinge-loss linear classifier (SGD), both from scratch.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .extract import HASHTAG, WORD, tokenize
from .porter import porter_stem

MIN_STEM_COUNT = 3
LOGISTIC = "logistic"
HINGE_SGD = "hinge_sgd"


class EmptyVocabulary(ValueError):
    pass


class DivergenceDetected(RuntimeError):
    pass


@dataclass(frozen=True)
class Hyper:
    learning_rate: float = 0.1
    epochs: int = 200
    seed: int = 42


@dataclass
class DesignMatrix:
    vocabulary: list[str]
    rows: np.ndarray  # (n_docs, n_stems) counts
    labels: np.ndarray  # (n_docs,) in {0,1}


@dataclass
class LinearModel:
    weights: np.ndarray  # (n_stems + 1,), bias last
    kind: str
    hyper: Hyper
    vocabulary: list[str] = field(default_factory=list)


def doc_stems(text: str, stopwords: set[str]) -> list[str]:
    """Tokens that survive preprocessing: words and hashtag bodies, edges
    stripped of punctuation, case-folded, minus stopwords, Porter-stemmed
    (alphabetic tokens only)."""
    stems = []
    for tok in tokenize(text):
        if tok.kind == WORD:
            raw = tok.surface
        elif tok.kind == HASHTAG:
            raw = tok.surface[1:]
        else:
            continue
        word = raw.strip("'.’-").casefold()
        if not word or word in stopwords:
            continue
        stems.append(porter_stem(word) if word.isalpha() else word)
    return stems


def preprocess(docs: list[tuple[str, int]], stopwords: set[str],
               vocabulary: list[str] | None = None,
               min_count: int = MIN_STEM_COUNT) -> DesignMatrix:
    """Build the count matrix. Without a fixed vocabulary, stems seen fewer
    than ``min_count`` times across the corpus are dropped."""
    if not docs:
        raise EmptyVocabulary("no documents")
    tokenized = [doc_stems(text, stopwords) for text, _ in docs]
    if vocabulary is None:
        counts: dict[str, int] = {}
        for stems in tokenized:
            for stem in stems:
                counts[stem] = counts.get(stem, 0) + 1
        vocabulary = sorted(s for s, n in counts.items() if n >= min_count)
        if not vocabulary:
            raise EmptyVocabulary("every stem fell under the minimum count")
    index = {s: i for i, s in enumerate(vocabulary)}
    rows = np.zeros((len(docs), len(vocabulary)))
    for r, stems in enumerate(tokenized):
        for stem in stems:
            c = index.get(stem)
            if c is not None:
                rows[r, c] += 1.0
    labels = np.array([label for _, label in docs], dtype=float)
    return DesignMatrix(vocabulary=list(vocabulary), rows=rows, labels=labels)


def _augment(rows: np.ndarray) -> np.ndarray:
    return np.hstack([rows, np.ones((rows.shape[0], 1))])


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def logistic_loss(weights: np.ndarray, rows: np.ndarray, labels: np.ndarray) -> float:
    """Mean cross-entropy of the sigmoid model on augmented rows."""
    p = _sigmoid(rows @ weights)
    eps = 1e-12
    return float(-np.mean(labels * np.log(p + eps) + (1 - labels) * np.log(1 - p + eps)))


def logistic_gradient(weights: np.ndarray, rows: np.ndarray, labels: np.ndarray) -> np.ndarray:
    p = _sigmoid(rows @ weights)
    return rows.T @ (p - labels) / rows.shape[0]


def train(matrix: DesignMatrix, kind: str, hyper: Hyper = Hyper()) -> LinearModel:
    """Fit a linear classifier: ``logistic`` runs full-batch gradient
    descent on mean cross-entropy from zero weights; ``hinge_sgd`` runs
    seeded per-sample SGD on hinge loss."""
    if len(set(matrix.labels.tolist())) < 2:
        raise ValueError("need at least one example of each class")
    X = _augment(matrix.rows)
    y = matrix.labels
    w = np.zeros(X.shape[1])
    if kind == LOGISTIC:
        for _ in range(hyper.epochs):
            w -= hyper.learning_rate * logistic_gradient(w, X, y)
            loss = logistic_loss(w, X, y)
            if not np.isfinite(loss):
                raise DivergenceDetected(f"loss became {loss}")
    elif kind == HINGE_SGD:
        signed = 2.0 * y - 1.0
        rng = np.random.default_rng(hyper.seed)
        for _ in range(hyper.epochs):
            for i in rng.permutation(X.shape[0]):
                if signed[i] * (X[i] @ w) < 1.0:
                    w += hyper.learning_rate * signed[i] * X[i]
            if not np.all(np.isfinite(w)):
                raise DivergenceDetected("weights became non-finite")
    else:
        raise ValueError(f"unknown classifier kind {kind!r}")
    return LinearModel(weights=w, kind=kind, hyper=hyper, vocabulary=matrix.vocabulary)


def predict(model: LinearModel, rows: np.ndarray) -> np.ndarray:
    scores = _augment(rows) @ model.weights
    if model.kind == LOGISTIC:
        return (_sigmoid(scores) >= 0.5).astype(float)
    return (scores >= 0.0).astype(float)


def evaluate(model: LinearModel, matrix: DesignMatrix) -> dict:
    """Precision / recall / F1 with the positive class = the category.
    Zero predicted positives yields precision 0 and is flagged."""
    if model.vocabulary != matrix.vocabulary:
        raise ValueError("matrix vocabulary differs from the model's")
    pred = predict(model, matrix.rows)
    truth = matrix.labels
    tp = float(np.sum((pred == 1) & (truth == 1)))
    fp = float(np.sum((pred == 1) & (truth == 0)))
    fn = float(np.sum((pred == 0) & (truth == 1)))
    precision = tp / (tp + fp) if (tp + fp) > 0 else 0.0
    recall = tp / (tp + fn) if (tp + fn) > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if (precision + recall) > 0 else 0.0
    return {
        "precision": precision,
        "recall": recall,
        "f1": f1,
        "zero_predicted_positive": (tp + fp) == 0,
    }


def stratified_split(labels: np.ndarray, seed: int, test_fraction: float = 0.2):
    """Seeded stratified 80/20 split; returns (train_idx, test_idx)."""
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for value in (0.0, 1.0):
        idx = np.flatnonzero(labels == value)
        idx = idx[rng.permutation(len(idx))]
        n_test = max(1, int(round(len(idx) * test_fraction))) if len(idx) > 1 else 0
        test_idx.extend(idx[:n_test].tolist())
        train_idx.extend(idx[n_test:].tolist())
    return sorted(train_idx), sorted(test_idx)


@dataclass
class EvalReport:
    rows: list[dict]  # 4 rows: (classifier, dataset) metrics
    deltas: list[dict]  # 2 rows: curated - raw per classifier
    hyper: Hyper
    seed: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "rows": self.rows,
                "deltas": self.deltas,
                "hyper": {
                    "learning_rate": self.hyper.learning_rate,
                    "epochs": self.hyper.epochs,
                    "seed": self.hyper.seed,
                },
                "split": {"test_fraction": 0.2, "stratified": True, "seed": self.seed},
            },
            sort_keys=True,
            indent=2,
        )


def compare(raw_docs: list[tuple[str, int]], curated_docs: list[tuple[str, int]],
            stopwords: set[str], hyper: Hyper = Hyper()) -> EvalReport:
    """Train both classifier kinds on raw and on curated text over a shared
    stratified split and report per-dataset metrics plus curated-minus-raw
    deltas."""
    if len(raw_docs) != len(curated_docs):
        raise ValueError("raw and curated corpora must be aligned")
    labels = np.array([label for _, label in raw_docs], dtype=float)
    if not np.array_equal(labels, np.array([label for _, label in curated_docs], dtype=float)):
        raise ValueError("raw and curated labels disagree")
    train_idx, test_idx = stratified_split(labels, hyper.seed)

    rows = []
    metric_by: dict[tuple[str, str], dict] = {}
    for dataset, docs in (("raw", raw_docs), ("curated", curated_docs)):
        train_docs = [docs[i] for i in train_idx]
        test_docs = [docs[i] for i in test_idx]
        train_matrix = preprocess(train_docs, stopwords)
        test_matrix = preprocess(test_docs, stopwords, vocabulary=train_matrix.vocabulary)
        for kind in (LOGISTIC, HINGE_SGD):
            model = train(train_matrix, kind, hyper)
            metrics = evaluate(model, test_matrix)
            metric_by[(kind, dataset)] = metrics
            rows.append({"classifier": kind, "dataset": dataset, **metrics})

    deltas = []
    for kind in (LOGISTIC, HINGE_SGD):
        cur, raw = metric_by[(kind, "curated")], metric_by[(kind, "raw")]
        deltas.append(
            {
                "classifier": kind,
                "d_precision": cur["precision"] - raw["precision"],
                "d_recall": cur["recall"] - raw["recall"],
                "d_f1": cur["f1"] - raw["f1"],
            }
        )
    return EvalReport(rows=rows, deltas=deltas, hyper=hyper, seed=hyper.seed)
