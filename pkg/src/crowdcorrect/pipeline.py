"""End-to-end orchestration: ingest, extract, auto-correct, crowd, export,
evaluate. This is what the ``bench`` command and the acceptance suite drive;
each stage is also callable on its own through the CLI.
"""

from __future__ import annotations

import json
from pathlib import Path

from . import evaluation, simcrowd, store, synthetic
from .autocorrect import AutoCorrectConfig, SourceRegistry, auto_correct_corpus
from .crowd import (
    DEFAULT_QUORUM,
    TaskBoard,
    apply_crowd_results,
    generate_identification_tasks,
    generate_suggestion_task,
)
from .extract import (
    STATUS_NEEDS_CROWD,
    extract_entities,
    extract_features,
    extract_time_location,
    load_stopwords,
    tokenize,
)
from .ingest import PostStore, ingest_file
from .simcrowd import TruthOracle
from .store import FeatureStore

CATEGORY = "health"


def logical_clock():
    """Deterministic stand-in for wall time in simulations."""
    counter = 0

    def tick() -> str:
        nonlocal counter
        counter += 1
        return f"t{counter:08d}"

    return tick


def extract_all(posts: PostStore, features: FeatureStore, stopwords=None,
                gazetteer: set[str] | None = None) -> int:
    stopwords = stopwords if stopwords is not None else load_stopwords()
    gazetteer = gazetteer or set()
    records = []
    for post in posts.posts():
        tokens = tokenize(post.text)
        records.extend(extract_features(post, stopwords))
        records.extend(extract_entities(tokens, gazetteer, post.id))
        records.extend(extract_time_location(tokens, post))
    features.save(records)
    return len(records)


def generate_tasks(posts: PostStore, features: FeatureStore, board: TaskBoard,
                   sources: SourceRegistry, quorum: int = DEFAULT_QUORUM,
                   category: str | None = CATEGORY) -> dict:
    """Identification tasks for every post (when a category is given) plus
    one suggestion task per crowd-bound feature."""
    post_by_id = {p.id: p for p in posts.posts()}
    if category:
        board.add_tasks(generate_identification_tasks(posts.posts(), category, quorum))
    n_suggestions = 0
    for feat in features.load():
        if feat.status != STATUS_NEEDS_CROWD:
            continue
        post = post_by_id[feat.post_id]
        task = generate_suggestion_task(
            feat, post, quorum=quorum,
            candidates_by_class=sources.candidates_by_class(feat.surface),
        )
        board.add_task(task)
        n_suggestions += 1
    return {"identification": len(post_by_id) if category else 0,
            "suggestions": n_suggestions}


def resolution_metrics(features: FeatureStore, truth_rows) -> dict:
    """Share of injected corruptions whose final correction matches the
    recorded ground truth."""
    expected = {ref: truth for kind, ref, truth in truth_rows if kind == "correction"}
    by_id = {f.feature_id: f for f in features.load()}
    fixed = 0
    by_issue: dict[str, list[int]] = {}
    issue_of = {ref: truth for kind, ref, truth in truth_rows if kind == "suggestion"}
    for fid, original in expected.items():
        feat = by_id.get(fid)
        ok = bool(
            feat is not None
            and feat.correction is not None
            and feat.correction.casefold() == original.casefold()
        )
        fixed += ok
        bucket = by_issue.setdefault(issue_of.get(fid, "?"), [0, 0])
        bucket[0] += ok
        bucket[1] += 1
    total = len(expected)
    return {
        "corruptions": total,
        "fixed": fixed,
        "fix_rate": fixed / total if total else 1.0,
        "by_issue": {k: {"fixed": v[0], "total": v[1]} for k, v in sorted(by_issue.items())},
    }


def run_pipeline(work_dir: str | Path, corpus_path: str | Path,
                 truth_path: str | Path, labels_path: str | Path,
                 seed: int = 42, accuracy: float = 0.9,
                 quorum: int = DEFAULT_QUORUM, n_workers: int | None = None,
                 config: AutoCorrectConfig = AutoCorrectConfig(),
                 lexicon_dir: str | Path | None = None) -> dict:
    """Run every stage against one corpus; returns metrics and output paths."""
    work_dir = Path(work_dir)
    work_dir.mkdir(parents=True, exist_ok=True)
    sources = SourceRegistry.from_lexicon_dir(lexicon_dir)
    stopwords = load_stopwords()

    posts = PostStore(work_dir)
    stats = ingest_file(corpus_path, posts)

    features = FeatureStore(work_dir)
    n_features = extract_all(posts, features, stopwords)

    features.save(auto_correct_corpus(features.load(), sources, config))

    board = TaskBoard(work_dir / store.TASKS_FILENAME, clock=logical_clock())
    task_counts = generate_tasks(posts, features, board, sources, quorum=quorum)

    truth_rows = synthetic.load_truth_rows(truth_path)
    oracle = TruthOracle.from_rows(truth_rows)
    sim = simcrowd.run_simulation(
        board, oracle, n_workers=n_workers or quorum + 4, accuracy=accuracy, seed=seed
    )

    updated, categories = apply_crowd_results(board, features.load())
    features.save(updated)
    store.save_categories(work_dir, categories)
    board.close()

    curated = store.export_curated(posts, features, categories, work_dir)

    labels = synthetic.load_labels(labels_path)
    raw_docs = [(p.text, 1 if labels[p.id] == CATEGORY else 0)
                for p in sorted(posts.posts(), key=lambda p: p.id)]
    curated_docs = [(c.curated_text, 1 if labels[c.post_id] == CATEGORY else 0)
                    for c in curated]
    report = evaluation.compare(raw_docs, curated_docs, stopwords,
                                evaluation.Hyper(seed=seed))
    report_path = work_dir / "report.json"
    report_path.write_text(report.to_json() + "\n", encoding="utf-8")

    resolution = resolution_metrics(features, truth_rows)
    identification_correct = sum(
        1 for pid, cat in categories.items() if labels.get(pid) == cat
    )
    return {
        "ingest": {"read": stats.read, "accepted": stats.accepted,
                   "duplicates": stats.duplicates, "rejected": stats.rejected},
        "features": n_features,
        "tasks": task_counts,
        "simulation": sim,
        "resolution": resolution,
        "identification": {
            "labelled": len(categories),
            "correct": identification_correct,
        },
        "report": json.loads(report.to_json()),
        "paths": {
            "curated": str(work_dir / store.CURATED_FILENAME),
            "summary": str(work_dir / store.SUMMARY_FILENAME),
            "report": str(report_path),
            "tasks": str(work_dir / store.TASKS_FILENAME),
        },
    }


def run_benchmark(root: str | Path, n_posts: int = 500, seed: int = 42,
                  accuracy: float = 0.9, quorum: int = DEFAULT_QUORUM,
                  n_workers: int | None = None) -> dict:
    """Generate the synthetic benchmark and push it through the pipeline."""
    root = Path(root)
    bench = synthetic.generate_benchmark(n_posts=n_posts, seed=seed)
    paths = synthetic.write_benchmark(bench, root / "input")
    return run_pipeline(
        root / "run",
        corpus_path=paths["corpus"],
        truth_path=paths["truth"],
        labels_path=paths["labels"],
        seed=seed,
        accuracy=accuracy,
        quorum=quorum,
        n_workers=n_workers,
    )
