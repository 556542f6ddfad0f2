"""Automated curation pass over extracted features.

Each keyword feature is classified against the configured knowledge sources
(jargon, then abbreviation, then spelling: exact curated lexicons outrank
fuzzy matching). High-confidence corrections are applied in place; anything
ambiguous is handed to the crowd with its candidate lists cached.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import knowledge

log = logging.getLogger(__name__)
from .extract import (
    KEYWORD,
    STATUS_AUTO,
    STATUS_CLEAN,
    STATUS_NEEDS_CROWD,
    FeatureRecord,
)
from .ingest import RawPost
from .knowledge import (
    AbbreviationSource,
    Candidate,
    JargonSource,
    KnowledgeError,
    SpellSource,
)

ISSUE_MISSPELLING = "misspelling"
ISSUE_ABBREVIATION = "abbreviation"
ISSUE_JARGON = "jargon"
ISSUE_NONE = "none"


class OverlappingSpans(ValueError):
    pass


@dataclass(frozen=True)
class AutoCorrectConfig:
    accept_threshold: float = 0.8
    accept_margin: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.accept_threshold <= 1.0:
            raise ValueError("accept_threshold must be in (0, 1]")
        if self.accept_margin < 0.0:
            raise ValueError("accept_margin must be >= 0")


@dataclass
class SourceRegistry:
    """The three local sources queried in fixed precedence order."""

    spell: SpellSource
    abbrev: AbbreviationSource
    jargon: JargonSource
    extra: list = field(default_factory=list)  # remote adapters, same order

    @classmethod
    def from_lexicon_dir(cls, directory: str | Path | None = None,
                         max_edit: int = knowledge.MAX_EDIT_DEFAULT) -> "SourceRegistry":
        """Load dictionary.txt / abbreviations.txt / jargon.txt from a
        directory, falling back to the bundled lexicons."""
        if directory is None:
            base = resources.files("crowdcorrect.data")
            read = lambda name: base.joinpath(name)
        else:
            base = Path(directory)
            read = lambda name: base / name
        return cls(
            spell=SpellSource(knowledge.load_dictionary(read("dictionary.txt")), max_edit=max_edit),
            abbrev=AbbreviationSource(knowledge.load_abbreviations(read("abbreviations.txt"))),
            jargon=JargonSource(knowledge.load_jargon(read("jargon.txt"))),
        )

    def candidates_for(self, issue_class: str, word: str) -> list[Candidate]:
        """Local source for the class; remote adopters of the same class act
        as fallback, with their failures logged and treated as empty."""
        local = {
            ISSUE_JARGON: self.jargon,
            ISSUE_ABBREVIATION: self.abbrev,
            ISSUE_MISSPELLING: self.spell,
        }[issue_class]
        hits = local.candidates(word)
        if hits:
            return hits
        for remote in self.extra:
            if remote.issue_class != issue_class:
                continue
            try:
                hits = remote.candidates(word)
            except KnowledgeError as exc:
                log.warning("remote source %s failed for %r: %s",
                            remote.source_id, word, exc)
                continue
            if hits:
                return hits
        return []

    def candidates_by_class(self, word: str) -> dict[str, list[Candidate]]:
        return {
            issue: self.candidates_for(issue, word)
            for issue in (ISSUE_JARGON, ISSUE_ABBREVIATION, ISSUE_MISSPELLING)
        }


def classify_issue(feature: FeatureRecord, sources: SourceRegistry) -> tuple[str, list[Candidate]]:
    """Decide the issue class of a keyword feature.

    Dictionary words with no jargon hit are fine as they are. Everything
    else is tried against jargon, abbreviation and spelling sources in that
    order; an OOV word no source can explain is still a misspelling, just
    one without suggestions.
    """
    if feature.kind != KEYWORD:
        raise ValueError("classify_issue expects a keyword feature")
    word = feature.surface
    jargon_hits = sources.candidates_for(ISSUE_JARGON, word)
    if word.casefold() in sources.spell and not jargon_hits:
        return ISSUE_NONE, []
    if jargon_hits:
        return ISSUE_JARGON, jargon_hits
    abbrev_hits = sources.candidates_for(ISSUE_ABBREVIATION, word)
    if abbrev_hits:
        return ISSUE_ABBREVIATION, abbrev_hits
    return ISSUE_MISSPELLING, sources.candidates_for(ISSUE_MISSPELLING, word)


def auto_correct_corpus(features: list[FeatureRecord], sources: SourceRegistry,
                        config: AutoCorrectConfig = AutoCorrectConfig()) -> list[FeatureRecord]:
    """Annotate every keyword feature as clean, auto-corrected or
    crowd-bound. Non-keyword features pass through untouched; source
    failures degrade the affected feature to the crowd path."""
    out = []
    for feat in features:
        if feat.kind != KEYWORD:
            out.append(feat)
            continue
        try:
            issue, cands = classify_issue(feat, sources)
        except KnowledgeError:
            out.append(feat.with_(status=STATUS_NEEDS_CROWD, issue_class=ISSUE_MISSPELLING))
            continue
        if issue == ISSUE_NONE:
            out.append(feat.with_(status=STATUS_CLEAN, issue_class=ISSUE_NONE))
            continue
        top = cands[0].score if cands else 0.0
        second = cands[1].score if len(cands) > 1 else 0.0
        if cands and top >= config.accept_threshold and (top - second) >= config.accept_margin:
            out.append(
                feat.with_(
                    status=STATUS_AUTO,
                    issue_class=issue,
                    correction=cands[0].replacement,
                    provenance={
                        "method": "auto",
                        "source_id": cands[0].source_id,
                        "score": cands[0].score,
                    },
                )
            )
        else:
            out.append(
                feat.with_(
                    status=STATUS_NEEDS_CROWD,
                    issue_class=issue,
                    candidates=tuple((c.replacement, c.score, c.source_id) for c in cands),
                )
            )
    return out


def transfer_case(surface: str, replacement: str) -> str:
    """Replacement starts uppercase iff the surface did."""
    if not replacement:
        return replacement
    if surface[:1].isupper():
        return replacement[0].upper() + replacement[1:]
    return replacement[0].lower() + replacement[1:]


def apply_corrections(post: RawPost, features: list[FeatureRecord]) -> str:
    """Rewrite the post text with every corrected span replaced, working
    right to left so earlier offsets stay valid."""
    corrected = [
        f for f in features
        if f.post_id == post.id and f.correction is not None and f.span != (0, 0)
    ]
    corrected.sort(key=lambda f: f.span)
    for prev, nxt in zip(corrected, corrected[1:]):
        if nxt.span[0] < prev.span[1]:
            raise OverlappingSpans(f"{prev.feature_id} overlaps {nxt.feature_id}")
    text = post.text
    for feat in reversed(corrected):
        start, end = feat.span
        text = text[:start] + transfer_case(feat.surface, feat.correction) + text[end:]
    return text
