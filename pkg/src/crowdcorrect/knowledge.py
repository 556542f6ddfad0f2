"""Scored correction candidates from pluggable knowledge sources.

Three local source types cover the three issue classes:

* spelling    -- dictionary (word -> frequency) searched by Levenshtein
                 distance with a delete-neighbourhood index,
* abbreviation -- lexicon mapping short form -> ranked expansions,
* jargon      -- exact map from in-group term -> canonical form.

A remote adapter speaks a small JSON wire contract so external services can
be plugged in without code changes; failures there are soft (empty result).
"""

from __future__ import annotations

import math
import urllib.parse
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import requests

MAX_EDIT_DEFAULT = 2


class KnowledgeError(Exception):
    pass


class NetworkError(KnowledgeError):
    """Remote source unreachable or timed out."""


class BadResponse(KnowledgeError):
    """Remote source answered with something outside the wire contract."""


@dataclass(frozen=True)
class Candidate:
    replacement: str
    score: float
    source_id: str

    def __post_init__(self):
        if not self.replacement:
            raise ValueError("candidate replacement must be non-empty")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"candidate score {self.score} outside [0,1]")


@dataclass(frozen=True)
class SourceDescriptor:
    source_id: str
    issue_class: str  # misspelling | abbreviation | jargon
    kind: str  # local | remote
    config: dict = field(default_factory=dict)


def levenshtein(a: str, b: str, cutoff: int | None = None) -> int:
    """Unit-cost edit distance. With a cutoff, returns cutoff+1 as soon as
    the distance provably exceeds it (row-minimum short circuit)."""
    if a == b:
        return 0
    m, n = len(a), len(b)
    if cutoff is not None and abs(m - n) > cutoff:
        return cutoff + 1
    prev = list(range(n + 1))
    for i in range(1, m + 1):
        cur = [i] + [0] * n
        ca = a[i - 1]
        row_min = i
        for j in range(1, n + 1):
            cost = 0 if ca == b[j - 1] else 1
            v = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
            cur[j] = v
            if v < row_min:
                row_min = v
        if cutoff is not None and row_min > cutoff:
            return cutoff + 1
        prev = cur
    return prev[n]


def _delete_variants(word: str, max_deletes: int) -> set[str]:
    variants = {word}
    for k in range(1, min(max_deletes, len(word)) + 1):
        for idxs in combinations(range(len(word)), k):
            keep = [c for i, c in enumerate(word) if i not in idxs]
            variants.add("".join(keep))
    return variants


class SpellSource:
    """Dictionary-backed spelling source.

    Candidate search uses a precomputed delete-neighbourhood index: if
    lev(w, c) <= k then w and c share a variant reachable by deleting at
    most k characters from each, so the index lookup is a complete
    candidate generator; every hit is then verified with the real DP.

    Candidate order is (edit distance asc, frequency desc, word asc) --
    the same ordering a naive full scan of the dictionary produces.
    The reported score is
        (1 - d / max(|word|, |cand|)) * (1 + w_f / 2)  clamped to [0, 1]
    where w_f is the candidate's log frequency normalized by the largest
    log frequency in the dictionary.
    """

    issue_class = "misspelling"

    def __init__(self, dictionary: dict[str, int], max_edit: int = MAX_EDIT_DEFAULT,
                 source_id: str = "local-spell"):
        if max_edit < 1:
            raise ValueError("max_edit must be >= 1")
        self.source_id = source_id
        self.max_edit = max_edit
        self.words = {w.casefold(): int(f) for w, f in dictionary.items()}
        max_log = max((math.log1p(f) for f in self.words.values()), default=1.0)
        self._max_log = max_log or 1.0
        self._index: dict[str, list[str]] = {}
        for w in self.words:
            for v in _delete_variants(w, max_edit):
                self._index.setdefault(v, []).append(w)

    def __contains__(self, word: str) -> bool:
        return word.casefold() in self.words

    def freq_weight(self, word: str) -> float:
        return math.log1p(self.words[word]) / self._max_log

    def score(self, word: str, cand: str, dist: int) -> float:
        sim = 1.0 - dist / max(len(word), len(cand))
        raw = sim * (1.0 + self.freq_weight(cand) / 2.0)
        return min(1.0, max(0.0, raw))

    def candidates(self, word: str, max_edit: int | None = None) -> list[Candidate]:
        if not word:
            raise ValueError("word must be non-empty")
        k = self.max_edit if max_edit is None else max_edit
        w = word.casefold()
        if w in self.words:
            return [Candidate(w, 1.0, self.source_id)]
        pool: set[str] = set()
        for v in _delete_variants(w, k):
            pool.update(self._index.get(v, ()))
        scored = []
        for cand in pool:
            d = levenshtein(w, cand, cutoff=k)
            if d <= k:
                scored.append((d, -self.words[cand], cand))
        scored.sort()
        return [
            Candidate(cand, self.score(w, cand, d), self.source_id)
            for d, _negfreq, cand in scored
        ]


class AbbreviationSource:
    """Lexicon of short forms; lookup folds case and ignores one trailing
    dot. Expansions keep their listed order, scored 1/rank."""

    issue_class = "abbreviation"

    def __init__(self, lexicon: dict[str, list[str]], source_id: str = "local-abbrev"):
        self.source_id = source_id
        self.entries = {k.casefold().rstrip("."): list(v) for k, v in lexicon.items()}

    def candidates(self, word: str) -> list[Candidate]:
        key = word.casefold()
        if key.endswith("."):
            key = key[:-1]
        expansions = self.entries.get(key, [])
        return [
            Candidate(exp, 1.0 / (rank + 1), self.source_id)
            for rank, exp in enumerate(expansions)
        ]


class JargonSource:
    """Exact case-insensitive map from in-group term to canonical form."""

    issue_class = "jargon"

    def __init__(self, jargon_map: dict[str, str], source_id: str = "local-jargon"):
        self.source_id = source_id
        self.entries = {k.casefold(): v for k, v in jargon_map.items()}

    def candidates(self, word: str) -> list[Candidate]:
        hit = self.entries.get(word.casefold())
        if hit is None:
            return []
        return [Candidate(hit, 1.0, self.source_id)]


class RemoteSource:
    """Adapter for an external service speaking the wire contract

        GET <endpoint>?q=<url-encoded word>
        -> {"candidates": [{"replacement": str, "score": number}, ...]}

    Scores are clamped into [0,1]; list order is preserved.
    """

    def __init__(self, descriptor: SourceDescriptor, timeout: float = 5.0):
        if descriptor.kind != "remote":
            raise ValueError("RemoteSource needs a descriptor with kind=remote")
        endpoint = descriptor.config.get("endpoint")
        if not endpoint:
            raise ValueError("remote descriptor missing config['endpoint']")
        self.descriptor = descriptor
        self.source_id = descriptor.source_id
        self.issue_class = descriptor.issue_class
        self.endpoint = endpoint
        self.timeout = timeout

    def candidates(self, word: str) -> list[Candidate]:
        url = f"{self.endpoint}?q={urllib.parse.quote(word)}"
        try:
            resp = requests.get(url, timeout=self.timeout)
        except requests.RequestException as exc:
            raise NetworkError(str(exc)) from exc
        if resp.status_code != 200:
            raise BadResponse(f"HTTP {resp.status_code} from {self.endpoint}")
        try:
            payload = resp.json()
        except ValueError as exc:
            raise BadResponse("response body is not JSON") from exc
        if not isinstance(payload, dict) or "candidates" not in payload:
            raise BadResponse('response missing "candidates"')
        out = []
        for item in payload["candidates"]:
            try:
                replacement = item["replacement"]
                score = float(item["score"])
            except (TypeError, KeyError, ValueError) as exc:
                raise BadResponse(f"malformed candidate entry: {item!r}") from exc
            if not isinstance(replacement, str) or not replacement:
                raise BadResponse(f"malformed replacement: {replacement!r}")
            out.append(Candidate(replacement, min(1.0, max(0.0, score)), self.source_id))
        return out


def spell_candidates(word: str, dictionary: dict[str, int],
                     max_edit: int = MAX_EDIT_DEFAULT) -> list[Candidate]:
    """One-shot convenience wrapper; builds a throwaway SpellSource."""
    return SpellSource(dictionary, max_edit=max_edit).candidates(word)


def abbrev_candidates(word: str, lexicon: dict[str, list[str]]) -> list[Candidate]:
    return AbbreviationSource(lexicon).candidates(word)


def jargon_candidates(word: str, jargon_map: dict[str, str]) -> list[Candidate]:
    return JargonSource(jargon_map).candidates(word)


def query_remote(source: SourceDescriptor, word: str,
                 timeout: float = 5.0) -> list[Candidate]:
    return RemoteSource(source, timeout=timeout).candidates(word)


# ---------------------------------------------------------------------------
# Lexicon file formats (one entry per line, tab separated):
#   dictionary:     word<TAB>frequency
#   abbreviations:  abbr<TAB>expansion1|expansion2|...
#   jargon:         term<TAB>canonical
# ---------------------------------------------------------------------------

def load_dictionary(path: str | Path) -> dict[str, int]:
    out: dict[str, int] = {}
    for line in _lines(path):
        word, _, freq = line.partition("\t")
        out[word.strip()] = int(freq.strip() or "1")
    return out


def load_abbreviations(path: str | Path) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for line in _lines(path):
        abbr, _, rest = line.partition("\t")
        out[abbr.strip()] = [e.strip() for e in rest.split("|") if e.strip()]
    return out


def load_jargon(path: str | Path) -> dict[str, str]:
    out: dict[str, str] = {}
    for line in _lines(path):
        term, _, canonical = line.partition("\t")
        out[term.strip()] = canonical.strip()
    return out


def _lines(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if line and not line.startswith("#"):
                yield line
