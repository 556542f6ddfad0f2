"""Raw post ingestion: JSONL in, deduplicated append-only post store out.

One JSON object per line with keys ``id``, ``text``, ``hashtags``, ``links``,
``user``, ``geo``, ``created_at``. Unknown keys survive inside the preserved
raw line. Duplicate ids are first-write-wins, so re-running an ingest is a
no-op.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

EPOCH_ISO = "1970-01-01T00:00:00+00:00"


class IngestError(ValueError):
    pass


class MalformedJson(IngestError):
    pass


class MissingField(IngestError):
    pass


class EmptyText(IngestError):
    pass


class IoError(OSError):
    pass


@dataclass(frozen=True)
class RawPost:
    id: str
    text: str
    hashtags: tuple[str, ...] = ()
    links: tuple[str, ...] = ()
    user: str = ""
    geo: str | None = None
    created_at: str = EPOCH_ISO
    raw: str = ""

    def __post_init__(self):
        if not self.id:
            raise MissingField("post id must be non-empty")
        if not self.text.strip():
            raise EmptyText("post text must be non-empty")
        if any("#" in h for h in self.hashtags):
            raise MalformedJson("hashtags must not contain '#'")
        _parse_iso(self.created_at)

    def to_json(self) -> str:
        return json.dumps(
            {
                "id": self.id,
                "text": self.text,
                "hashtags": list(self.hashtags),
                "links": list(self.links),
                "user": self.user,
                "geo": self.geo,
                "created_at": self.created_at,
                "raw": self.raw,
            },
            ensure_ascii=False,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "RawPost":
        obj = json.loads(line)
        return cls(
            id=obj["id"],
            text=obj["text"],
            hashtags=tuple(obj.get("hashtags", ())),
            links=tuple(obj.get("links", ())),
            user=obj.get("user", ""),
            geo=obj.get("geo"),
            created_at=obj.get("created_at", EPOCH_ISO),
            raw=obj.get("raw", ""),
        )


@dataclass
class IngestStats:
    read: int = 0
    accepted: int = 0
    duplicates: int = 0
    rejected: int = 0
    reasons: list[tuple[int, str]] = field(default_factory=list)

    def check(self):
        assert self.read == self.accepted + self.duplicates + self.rejected


def _parse_iso(value: str):
    try:
        # fromisoformat in 3.10 rejects a trailing Z
        datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError:
        raise MalformedJson(f"created_at is not ISO-8601: {value!r}") from None


def parse_post(json_text: str) -> RawPost:
    """Map one JSON object onto a RawPost. The original line is preserved
    verbatim in ``raw``; hashtags are normalized by stripping a leading '#'."""
    try:
        obj = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"unparseable JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise MalformedJson("top-level JSON value must be an object")
    if "id" not in obj or obj["id"] in (None, ""):
        raise MissingField("missing 'id'")
    if "text" not in obj or obj["text"] is None:
        raise MissingField("missing 'text'")
    text = str(obj["text"])
    if not text.strip():
        raise EmptyText("empty 'text'")
    hashtags = tuple(str(h).lstrip("#") for h in obj.get("hashtags") or ())
    links = tuple(str(u) for u in obj.get("links") or ())
    geo = obj.get("geo")
    return RawPost(
        id=str(obj["id"]),
        text=text,
        hashtags=hashtags,
        links=links,
        user=str(obj.get("user") or ""),
        geo=None if geo in (None, "") else str(geo),
        created_at=str(obj.get("created_at") or EPOCH_ISO),
        raw=json_text,
    )


class PostStore:
    """Append-only ``posts.jsonl`` plus an in-memory id index rebuilt on
    open. Single writer; readers may share the file once the writer is done.
    """

    FILENAME = "posts.jsonl"

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.path = self.directory / self.FILENAME
        self._ids: set[str] = set()
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        self._ids.add(json.loads(line)["id"])

    def __contains__(self, post_id: str) -> bool:
        return post_id in self._ids

    def __len__(self) -> int:
        return len(self._ids)

    def append(self, post: RawPost) -> bool:
        """Write the post unless its id is already present. Returns True if
        the post was written."""
        if post.id in self._ids:
            return False
        try:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(post.to_json() + "\n")
                fh.flush()
        except OSError as exc:
            raise IoError(str(exc)) from exc
        self._ids.add(post.id)
        return True

    def posts(self) -> list[RawPost]:
        out = []
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        out.append(RawPost.from_json(line))
        return out

    def get(self, post_id: str) -> RawPost | None:
        for post in self.posts():
            if post.id == post_id:
                return post
        return None


def ingest_file(path: str | Path, store: PostStore) -> IngestStats:
    """Ingest a JSONL file into the store. Valid unseen posts are appended;
    duplicates and rejects are counted, with one reason per rejected line."""
    stats = IngestStats()
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise IoError(str(exc)) from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            stats.read += 1
            try:
                post = parse_post(line.rstrip("\n"))
            except IngestError as exc:
                stats.rejected += 1
                stats.reasons.append((lineno, f"{type(exc).__name__}: {exc}"))
                continue
            if store.append(post):
                stats.accepted += 1
            else:
                stats.duplicates += 1
    stats.check()
    return stats


def utcnow_iso() -> str:
    return datetime.now(timezone.utc).isoformat()
