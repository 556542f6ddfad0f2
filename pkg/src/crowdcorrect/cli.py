"""Command-line entry points for every pipeline stage.

    crowdcorrect ingest --in corpus.jsonl --store run/
    crowdcorrect extract --store run/ --features run/
    crowdcorrect autocorrect --features run/ --lexicons lexicons/
    crowdcorrect tasks generate|status|apply ...
    crowdcorrect simulate --tasks run/ --truth truth.csv ...
    crowdcorrect export --store run/ --features run/ --out run/
    crowdcorrect eval --raw ... --curated ... --labels ... --out report.json
    crowdcorrect synth --out input/ [--posts 500] [--seed 42]
    crowdcorrect bench --workdir bench/ [--seed 42]
    crowdcorrect serve --store run/ [--port 8040]
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import evaluation, pipeline, simcrowd, store, synthetic
from .autocorrect import AutoCorrectConfig, SourceRegistry, auto_correct_corpus
from .crowd import DEFAULT_QUORUM, TaskBoard, apply_crowd_results
from .extract import load_stopwords
from .ingest import PostStore, ingest_file
from .store import FeatureStore


def _cmd_ingest(args) -> int:
    posts = PostStore(args.store)
    stats = ingest_file(getattr(args, "in"), posts)
    print(f"read={stats.read} accepted={stats.accepted} "
          f"duplicates={stats.duplicates} rejected={stats.rejected}")
    for lineno, reason in stats.reasons:
        print(f"  line {lineno}: {reason}", file=sys.stderr)
    return 0 if stats.rejected == 0 else 1


def _cmd_extract(args) -> int:
    stopwords = load_stopwords(args.stopwords)
    gazetteer = set()
    if args.gazetteer:
        gazetteer = {w.strip() for w in Path(args.gazetteer).read_text("utf-8").splitlines() if w.strip()}
    n = pipeline.extract_all(PostStore(args.store), FeatureStore(args.features),
                             stopwords, gazetteer)
    print(f"features={n}")
    return 0


def _cmd_autocorrect(args) -> int:
    sources = SourceRegistry.from_lexicon_dir(args.lexicons)
    features = FeatureStore(args.features)
    config = AutoCorrectConfig(accept_threshold=args.threshold, accept_margin=args.margin)
    updated = auto_correct_corpus(features.load(), sources, config)
    features.save(updated)
    counts: dict[str, int] = {}
    for feat in updated:
        counts[feat.status] = counts.get(feat.status, 0) + 1
    print(" ".join(f"{k}={v}" for k, v in sorted(counts.items())))
    return 0


def _cmd_tasks(args) -> int:
    board = TaskBoard(Path(args.tasks) / store.TASKS_FILENAME)
    try:
        if args.tasks_command == "generate":
            sources = SourceRegistry.from_lexicon_dir(args.lexicons)
            counts = pipeline.generate_tasks(
                PostStore(args.store), FeatureStore(args.features), board, sources,
                quorum=args.quorum,
                category=None if args.no_identification else args.category,
            )
            print(" ".join(f"{k}={v}" for k, v in counts.items()))
        elif args.tasks_command == "status":
            print(json.dumps(board.progress(), indent=2, sort_keys=True))
        elif args.tasks_command == "apply":
            features = FeatureStore(args.features)
            updated, categories = apply_crowd_results(board, features.load())
            features.save(updated)
            store.save_categories(args.features, categories)
            print(f"categories={len(categories)}")
    finally:
        board.close()
    return 0


def _cmd_simulate(args) -> int:
    board = TaskBoard(Path(args.tasks) / store.TASKS_FILENAME,
                      clock=pipeline.logical_clock())
    try:
        if args.quorum is not None:
            mismatched = [t.task_id for t in board.tasks() if t.quorum != args.quorum]
            if mismatched:
                print(f"error: {len(mismatched)} tasks have quorum != {args.quorum} "
                      f"(first: {mismatched[0]}); regenerate tasks with the desired quorum",
                      file=sys.stderr)
                return 2
        oracle = simcrowd.TruthOracle.from_rows(synthetic.load_truth_rows(args.truth))
        result = simcrowd.run_simulation(board, oracle, n_workers=args.workers,
                                         accuracy=args.accuracy, seed=args.seed)
        print(json.dumps(result, indent=2, sort_keys=True))
    finally:
        board.close()
    return 0


def _cmd_export(args) -> int:
    categories = store.load_categories(args.features)
    curated = store.export_curated(PostStore(args.store), FeatureStore(args.features),
                                   categories, args.out)
    print(f"curated={len(curated)}")
    return 0


def _cmd_eval(args) -> int:
    labels = synthetic.load_labels(args.labels)
    raw_posts = _texts_from_jsonl(args.raw)
    curated = {c.post_id: c.curated_text for c in store.load_curated(args.curated)}
    ids = sorted(set(raw_posts) & set(curated) & set(labels))
    if not ids:
        print("error: no aligned post ids between raw, curated and labels", file=sys.stderr)
        return 2
    raw_docs = [(raw_posts[i], 1 if labels[i] == args.category else 0) for i in ids]
    curated_docs = [(curated[i], 1 if labels[i] == args.category else 0) for i in ids]
    report = evaluation.compare(raw_docs, curated_docs, load_stopwords(),
                                evaluation.Hyper(seed=args.seed))
    Path(args.out).write_text(report.to_json() + "\n", encoding="utf-8")
    print(f"wrote {args.out}")
    return 0


def _texts_from_jsonl(path) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                obj = json.loads(line)
                out[obj["id"]] = obj["text"]
    return out


def _cmd_synth(args) -> int:
    bench = synthetic.generate_benchmark(n_posts=args.posts, seed=args.seed)
    paths = synthetic.write_benchmark(bench, args.out)
    print(f"posts={len(bench.posts)} corruptions={len(bench.corruptions)} "
          f"-> {paths['corpus']}")
    return 0


def _cmd_bench(args) -> int:
    metrics = pipeline.run_benchmark(args.workdir, n_posts=args.posts, seed=args.seed,
                                     accuracy=args.accuracy, quorum=args.quorum)
    print(json.dumps({k: v for k, v in metrics.items() if k != "report"},
                     indent=2, sort_keys=True))
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    ui_dir = args.ui if args.ui else None
    serve(store_dir=args.store, port=args.port, ui_dir=ui_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crowdcorrect", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="ingest a JSONL corpus into a post store")
    p.add_argument("--in", required=True, help="input JSONL file")
    p.add_argument("--store", required=True, help="post store directory")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("extract", help="extract features from ingested posts")
    p.add_argument("--store", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--stopwords", default=None, help="stopword override file")
    p.add_argument("--gazetteer", default=None, help="named-entity gazetteer file")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("autocorrect", help="run the automated correction pass")
    p.add_argument("--features", required=True)
    p.add_argument("--lexicons", default=None, help="lexicon dir (bundled if omitted)")
    p.add_argument("--threshold", type=float, default=0.8)
    p.add_argument("--margin", type=float, default=0.1)
    p.set_defaults(func=_cmd_autocorrect)

    p = sub.add_parser("tasks", help="crowd task management")
    tsub = p.add_subparsers(dest="tasks_command", required=True)
    g = tsub.add_parser("generate")
    g.add_argument("--store", required=True)
    g.add_argument("--features", required=True)
    g.add_argument("--tasks", required=True)
    g.add_argument("--lexicons", default=None)
    g.add_argument("--quorum", type=int, default=DEFAULT_QUORUM)
    g.add_argument("--category", default=pipeline.CATEGORY)
    g.add_argument("--no-identification", action="store_true")
    g.set_defaults(func=_cmd_tasks)
    s = tsub.add_parser("status")
    s.add_argument("--tasks", required=True)
    s.set_defaults(func=_cmd_tasks)
    a = tsub.add_parser("apply")
    a.add_argument("--tasks", required=True)
    a.add_argument("--features", required=True)
    a.set_defaults(func=_cmd_tasks)

    p = sub.add_parser("simulate", help="answer open tasks with simulated workers")
    p.add_argument("--tasks", required=True)
    p.add_argument("--truth", required=True, help="truth CSV (kind,ref_id,truth)")
    p.add_argument("--workers", type=int, default=7)
    p.add_argument("--accuracy", type=float, default=0.9)
    p.add_argument("--quorum", type=int, default=None,
                   help="assert every task uses this quorum")
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("export", help="write curated.jsonl and summary.csv")
    p.add_argument("--store", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("eval", help="compare classifiers on raw vs curated text")
    p.add_argument("--raw", required=True, help="posts.jsonl or any id/text JSONL")
    p.add_argument("--curated", required=True, help="curated.jsonl")
    p.add_argument("--labels", required=True, help="labels CSV (post_id,label)")
    p.add_argument("--out", required=True)
    p.add_argument("--category", default=pipeline.CATEGORY)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("synth", help="generate the synthetic benchmark corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--posts", type=int, default=500)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("bench", help="generate + run the full pipeline end to end")
    p.add_argument("--workdir", required=True)
    p.add_argument("--posts", type=int, default=500)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--accuracy", type=float, default=0.9)
    p.add_argument("--quorum", type=int, default=DEFAULT_QUORUM)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("serve", help="run the crowd-task HTTP service")
    p.add_argument("--store", default=None, help="store dir (or CROWDCORRECT_STORE)")
    p.add_argument("--port", type=int, default=8040)
    p.add_argument("--ui", default=None, help="static UI directory to mount at /ui")
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
