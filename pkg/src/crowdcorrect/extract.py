"""Tokenization and feature extraction over raw posts.

Features are the units the rest of the pipeline corrects: keywords,
hashtags, mentions, URLs, heuristic named entities, and time/location
mentions. Named-entity detection is deliberately shallow (capitalization +
gazetteer); there is no statistical NER here.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from importlib import resources

from .ingest import RawPost

WORD = "word"
HASHTAG = "hashtag"
MENTION = "mention"
URL = "url"
NUMBER = "number"
PUNCTUATION = "punctuation"

# feature kinds
KEYWORD = "keyword"
NAMED_ENTITY = "named_entity"
TIME = "time"
LOCATION = "location"

STATUS_UNTOUCHED = "untouched"
STATUS_CLEAN = "clean"
STATUS_AUTO = "auto_corrected"
STATUS_NEEDS_CROWD = "needs_crowd"
STATUS_CROWD = "crowd_corrected"
STATUS_UNRESOLVED = "unresolved"

# a single trailing dot stays attached to a short word: "Hosp." and "Aus."
# are abbreviation candidates, not sentence ends
ABBREV_DOT_MAX_LEN = 6

_URL_RE = re.compile(
    r"""(?:https?://\S+
        |www\.\S+
        |[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)+/[^\s]*)""",
    re.VERBOSE,
)
_TAG_RE = re.compile(r"[#@][A-Za-z0-9_]+")
_WORD_RE = re.compile(r"[A-Za-z0-9]+(?:['’-][A-Za-z0-9]+)*")
_TRAILING_PUNCT = ".,!?;:'\")"

_MONTHS = (
    "January|February|March|April|May|June|July|August|September|October|"
    "November|December|Jan|Feb|Mar|Apr|Jun|Jul|Aug|Sep|Sept|Oct|Nov|Dec"
)
_DATE_RES = (
    re.compile(rf"\b\d{{1,2}} (?:{_MONTHS}) \d{{2,4}}\b"),
    re.compile(r"\b\d{4}-\d{2}-\d{2}\b"),
    re.compile(
        r"\b(?:Monday|Tuesday|Wednesday|Thursday|Friday|Saturday|Sunday)\b",
        re.IGNORECASE,
    ),
)


@dataclass(frozen=True)
class Token:
    surface: str
    start: int
    end: int
    kind: str

    def __post_init__(self):
        assert self.start < self.end


@dataclass(frozen=True)
class FeatureRecord:
    feature_id: str
    post_id: str
    kind: str
    surface: str
    span: tuple[int, int]
    status: str = STATUS_UNTOUCHED
    issue_class: str | None = None
    correction: str | None = None
    provenance: dict | None = None  # {"method", "source_id", "score"}
    candidates: tuple | None = None  # cached (replacement, score, source_id)

    def to_json(self) -> str:
        obj = {
            "feature_id": self.feature_id,
            "post_id": self.post_id,
            "kind": self.kind,
            "surface": self.surface,
            "span": list(self.span),
            "status": self.status,
            "issue_class": self.issue_class,
            "correction": self.correction,
            "provenance": self.provenance,
            "candidates": [list(c) for c in self.candidates] if self.candidates else None,
        }
        return json.dumps(obj, ensure_ascii=False, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "FeatureRecord":
        obj = json.loads(line)
        return cls(
            feature_id=obj["feature_id"],
            post_id=obj["post_id"],
            kind=obj["kind"],
            surface=obj["surface"],
            span=tuple(obj["span"]),
            status=obj["status"],
            issue_class=obj.get("issue_class"),
            correction=obj.get("correction"),
            provenance=obj.get("provenance"),
            candidates=tuple(tuple(c) for c in obj["candidates"]) if obj.get("candidates") else None,
        )

    def with_(self, **kw) -> "FeatureRecord":
        return replace(self, **kw)


def _feature_id(post_id: str, start: int, end: int, kind: str) -> str:
    return f"{post_id}:{start}-{end}:{kind}"


def tokenize(text: str) -> list[Token]:
    """Split text into typed tokens with character offsets; the concatenated
    surfaces cover every non-whitespace character exactly once."""
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        m = _URL_RE.match(text, i)
        if m:
            end = m.end()
            while end > i + 1 and text[end - 1] in _TRAILING_PUNCT:
                end -= 1
            tokens.append(Token(text[i:end], i, end, URL))
            i = end
            continue
        m = _TAG_RE.match(text, i)
        if m:
            kind = HASHTAG if text[i] == "#" else MENTION
            tokens.append(Token(m.group(), i, m.end(), kind))
            i = m.end()
            continue
        m = _WORD_RE.match(text, i)
        if m:
            surface, end = m.group(), m.end()
            if (
                end < n
                and text[end] == "."
                and (end + 1 == n or text[end + 1] != ".")
                and surface.isalpha()
                and len(surface) <= ABBREV_DOT_MAX_LEN
                and (end + 1 == n or not text[end + 1].isalnum())
            ):
                surface, end = surface + ".", end + 1
            kind = NUMBER if surface.rstrip(".").isdigit() else WORD
            tokens.append(Token(surface, i, end, kind))
            i = end
            continue
        j = i
        while j < n and not text[j].isspace() and not _starts_token(text, j):
            j += 1
        tokens.append(Token(text[i:j], i, j, PUNCTUATION))
        i = j
    return tokens


def _starts_token(text: str, pos: int) -> bool:
    return bool(
        _URL_RE.match(text, pos)
        or _TAG_RE.match(text, pos)
        or _WORD_RE.match(text, pos)
    )


def extract_features(post: RawPost, stopwords: set[str]) -> list[FeatureRecord]:
    """Keyword records for non-stopword word tokens and for hashtag bodies;
    hashtag/mention/url tokens additionally kept under their own kinds."""
    records: list[FeatureRecord] = []
    for tok in tokenize(post.text):
        if tok.kind == WORD:
            if tok.surface.casefold() not in stopwords:
                records.append(_record(post.id, KEYWORD, tok.surface, tok.start, tok.end))
        elif tok.kind == HASHTAG:
            body = tok.surface[1:]
            # hashtag record spans the whole token but drops the '#'
            records.append(
                FeatureRecord(
                    feature_id=_feature_id(post.id, tok.start, tok.end, HASHTAG),
                    post_id=post.id,
                    kind=HASHTAG,
                    surface=body,
                    span=(tok.start, tok.end),
                )
            )
            records.append(_record(post.id, KEYWORD, body, tok.start + 1, tok.end))
        elif tok.kind == MENTION:
            records.append(_record(post.id, MENTION, tok.surface, tok.start, tok.end))
        elif tok.kind == URL:
            records.append(_record(post.id, URL, tok.surface, tok.start, tok.end))
    return records


def _record(post_id: str, kind: str, surface: str, start: int, end: int) -> FeatureRecord:
    return FeatureRecord(
        feature_id=_feature_id(post_id, start, end, kind),
        post_id=post_id,
        kind=kind,
        surface=surface,
        span=(start, end),
    )


def extract_entities(tokens: list[Token], gazetteer: set[str],
                     post_id: str = "") -> list[FeatureRecord]:
    """Heuristic named entities: gazetteer hits plus capitalized words that
    are neither text-initial nor sentence-initial."""
    folded = {g.casefold() for g in gazetteer}
    records = []
    first_word_seen = False
    sentence_start = True
    for tok in tokens:
        if tok.kind == PUNCTUATION:
            if any(ch in ".!?" for ch in tok.surface):
                sentence_start = True
            continue
        if tok.kind != WORD:
            continue
        is_gazetteer = tok.surface.casefold() in folded
        is_capitalized = (
            tok.surface[0].isupper() and first_word_seen and not sentence_start
        )
        if is_gazetteer or is_capitalized:
            records.append(_record(post_id, NAMED_ENTITY, tok.surface, tok.start, tok.end))
        first_word_seen = True
        # a kept abbreviation dot ("clear.") still ends the sentence
        sentence_start = tok.surface.endswith(".")
    return records


def extract_time_location(tokens: list[Token], post: RawPost) -> list[FeatureRecord]:
    """Date-shaped text spans become time records; the post's geo label, if
    any, becomes one location record (span (0,0): it has no text span)."""
    records = []
    seen: set[tuple[int, int]] = set()
    for pattern in _DATE_RES:
        for m in pattern.finditer(post.text):
            span = (m.start(), m.end())
            if span in seen or any(s <= span[0] and span[1] <= e for s, e in seen):
                continue
            seen.add(span)
            records.append(_record(post.id, TIME, m.group(), *span))
    records.sort(key=lambda r: r.span)
    if post.geo:
        records.append(
            FeatureRecord(
                feature_id=f"{post.id}:geo:{LOCATION}",
                post_id=post.id,
                kind=LOCATION,
                surface=post.geo,
                span=(0, 0),
            )
        )
    return records


def load_stopwords(path=None) -> set[str]:
    """Bundled ~150-word English stopword list, or one word per line from
    an override file."""
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            return {w.strip().casefold() for w in fh if w.strip()}
    data = resources.files("crowdcorrect.data").joinpath("stopwords.txt").read_text("utf-8")
    return {w.strip().casefold() for w in data.splitlines() if w.strip()}
