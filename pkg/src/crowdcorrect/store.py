"""File-backed stores and the curated-corpus export.

Everything is line-oriented JSON (plus one RFC-4180 CSV summary) so runs
are reproducible and diffable; there is no database anywhere. Task/answer
state is event-sourced in ``tasks.jsonl`` and reconstructed via
:func:`crowdcorrect.crowd.replay`.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .autocorrect import apply_corrections
from .crowd import replay  # noqa: F401  (re-exported: task state lives here on disk)
from .extract import STATUS_AUTO, STATUS_CROWD, STATUS_UNRESOLVED, FeatureRecord
from .ingest import IoError, PostStore

FEATURES_FILENAME = "features.jsonl"
TASKS_FILENAME = "tasks.jsonl"
CATEGORIES_FILENAME = "categories.jsonl"
CURATED_FILENAME = "curated.jsonl"
SUMMARY_FILENAME = "summary.csv"


class FeatureStore:
    """Whole-file JSONL store for feature records; rewrites are atomic
    (temp file + rename) and preserve record order."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.path = self.directory / FEATURES_FILENAME

    def load(self) -> list[FeatureRecord]:
        records = []
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        records.append(FeatureRecord.from_json(line))
        return records

    def save(self, records: list[FeatureRecord]):
        tmp = self.path.with_suffix(".tmp")
        try:
            with open(tmp, "w", encoding="utf-8") as fh:
                for rec in records:
                    fh.write(rec.to_json() + "\n")
            tmp.replace(self.path)
        except OSError as exc:
            raise IoError(str(exc)) from exc


def save_categories(directory: str | Path, categories: dict[str, str]):
    path = Path(directory) / CATEGORIES_FILENAME
    with open(path, "w", encoding="utf-8") as fh:
        for post_id in sorted(categories):
            fh.write(json.dumps({"post_id": post_id, "category": categories[post_id]},
                                sort_keys=True) + "\n")


def load_categories(directory: str | Path) -> dict[str, str]:
    path = Path(directory) / CATEGORIES_FILENAME
    out: dict[str, str] = {}
    if path.exists():
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    obj = json.loads(line)
                    out[obj["post_id"]] = obj["category"]
    return out


@dataclass(frozen=True)
class CuratedPost:
    post_id: str
    original_text: str
    curated_text: str
    category: str | None
    corrections: tuple[dict, ...]  # span order

    def to_json(self) -> str:
        return json.dumps(
            {
                "post_id": self.post_id,
                "original_text": self.original_text,
                "curated_text": self.curated_text,
                "category": self.category,
                "corrections": list(self.corrections),
            },
            ensure_ascii=False,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "CuratedPost":
        obj = json.loads(line)
        return cls(
            post_id=obj["post_id"],
            original_text=obj["original_text"],
            curated_text=obj["curated_text"],
            category=obj.get("category"),
            corrections=tuple(obj["corrections"]),
        )


def export_curated(posts: PostStore, features: FeatureStore,
                   categories: dict[str, str], out_dir: str | Path) -> list[CuratedPost]:
    """Write ``curated.jsonl`` and ``summary.csv``, one row per post in
    post-id order. Unresolved features are left as their original surface
    and only counted."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = features.load()
    by_post: dict[str, list[FeatureRecord]] = {}
    for rec in records:
        by_post.setdefault(rec.post_id, []).append(rec)

    curated: list[CuratedPost] = []
    summary_rows = []
    for post in sorted(posts.posts(), key=lambda p: p.id):
        feats = by_post.get(post.id, [])
        corrected = sorted(
            (f for f in feats if f.correction is not None and f.status in (STATUS_AUTO, STATUS_CROWD)),
            key=lambda f: f.span,
        )
        curated_text = apply_corrections(post, corrected)
        n_auto = sum(1 for f in corrected if f.status == STATUS_AUTO)
        n_crowd = sum(1 for f in corrected if f.status == STATUS_CROWD)
        n_unresolved = sum(1 for f in feats if f.status == STATUS_UNRESOLVED)
        curated.append(
            CuratedPost(
                post_id=post.id,
                original_text=post.text,
                curated_text=curated_text,
                category=categories.get(post.id),
                corrections=tuple(
                    {
                        "surface": f.surface,
                        "replacement": f.correction,
                        "issue_class": f.issue_class,
                        "method": (f.provenance or {}).get("method"),
                        "source_id": (f.provenance or {}).get("source_id"),
                        "score": (f.provenance or {}).get("score"),
                    }
                    for f in corrected
                ),
            )
        )
        summary_rows.append((post.id, n_auto, n_crowd, n_unresolved))

    try:
        with open(out_dir / CURATED_FILENAME, "w", encoding="utf-8") as fh:
            for item in curated:
                fh.write(item.to_json() + "\n")
        with open(out_dir / SUMMARY_FILENAME, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["post_id", "n_auto", "n_crowd", "n_unresolved"])
            writer.writerows(summary_rows)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return curated


def load_curated(path: str | Path) -> list[CuratedPost]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(CuratedPost.from_json(line))
    return out
