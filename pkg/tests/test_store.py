import csv
import json

from crowdcorrect.extract import STATUS_AUTO, STATUS_CROWD, STATUS_UNRESOLVED
from crowdcorrect.ingest import PostStore, parse_post
from crowdcorrect.store import (
    CuratedPost,
    FeatureStore,
    export_curated,
    load_categories,
    load_curated,
    save_categories,
)

from test_autocorrect import _keyword


def seeded_store(tmp_path):
    posts = PostStore(tmp_path)
    posts.append(parse_post(json.dumps({"id": "p1", "text": "healht plan cardo"})))
    posts.append(parse_post(json.dumps({"id": "p2", "text": "all fine here"})))

    features = FeatureStore(tmp_path)
    features.save([
        _keyword("healht", "p1", (0, 6)).with_(
            status=STATUS_AUTO, correction="health", issue_class="misspelling",
            provenance={"method": "auto", "source_id": "local-spell", "score": 1.0},
        ),
        _keyword("cardo", "p1", (12, 17)).with_(
            status=STATUS_CROWD, correction="cardio", issue_class="misspelling",
            provenance={"method": "crowd", "source_id": "c:x", "score": 1.0},
        ),
        _keyword("fine", "p2", (4, 8)).with_(status=STATUS_UNRESOLVED),
    ])
    return posts, features


def test_export_curated_content(tmp_path):
    posts, features = seeded_store(tmp_path)
    curated = export_curated(posts, features, {"p1": "health"}, tmp_path)
    by_id = {c.post_id: c for c in curated}
    assert by_id["p1"].curated_text == "health plan cardio"
    assert by_id["p1"].category == "health"
    assert [c["method"] for c in by_id["p1"].corrections] == ["auto", "crowd"]
    assert by_id["p2"].curated_text == by_id["p2"].original_text
    assert by_id["p2"].category is None


def test_export_summary_csv(tmp_path):
    posts, features = seeded_store(tmp_path)
    export_curated(posts, features, {}, tmp_path)
    with open(tmp_path / "summary.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["post_id", "n_auto", "n_crowd", "n_unresolved"]
    assert rows[1] == ["p1", "1", "1", "0"]
    assert rows[2] == ["p2", "0", "0", "1"]


def test_export_deterministic_bytes(tmp_path):
    posts, features = seeded_store(tmp_path)
    export_curated(posts, features, {"p1": "health"}, tmp_path)
    first = (tmp_path / "curated.jsonl").read_bytes(), (tmp_path / "summary.csv").read_bytes()
    export_curated(posts, features, {"p1": "health"}, tmp_path)
    second = (tmp_path / "curated.jsonl").read_bytes(), (tmp_path / "summary.csv").read_bytes()
    assert first == second


def test_export_roundtrip(tmp_path):
    posts, features = seeded_store(tmp_path)
    curated = export_curated(posts, features, {"p1": "health"}, tmp_path)
    parsed = load_curated(tmp_path / "curated.jsonl")
    assert parsed == curated


def test_curated_invariant_rebuild(tmp_path):
    posts, features = seeded_store(tmp_path)
    for item in export_curated(posts, features, {}, tmp_path):
        text = item.original_text
        for corr in sorted(item.corrections, key=lambda c: -text.find(c["surface"])):
            idx = text.find(corr["surface"])
            text = text[:idx] + corr["replacement"] + text[idx + len(corr["surface"]):]
        assert text == item.curated_text


def test_feature_store_roundtrip(tmp_path):
    features = FeatureStore(tmp_path)
    records = [
        _keyword("plan", "p", (0, 4)),
        _keyword("cardo", "p", (5, 10)).with_(
            status=STATUS_CROWD, correction="cardio",
            candidates=(("cardio", 0.9, "s"), ("card", 0.8, "s")),
        ),
    ]
    features.save(records)
    assert features.load() == records


def test_categories_roundtrip(tmp_path):
    save_categories(tmp_path, {"p2": "other", "p1": "health"})
    assert load_categories(tmp_path) == {"p1": "health", "p2": "other"}


def test_curated_post_json_roundtrip():
    item = CuratedPost("p", "a b", "a c", None,
                       ({"surface": "b", "replacement": "c", "issue_class": "misspelling",
                         "method": "auto", "source_id": "s", "score": 0.9},))
    assert CuratedPost.from_json(item.to_json()) == item
