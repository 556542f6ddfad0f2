"""Synthetic benchmark corpus with injected, ground-truthed noise.

Generates short health/other posts over a 300-word vocabulary and corrupts
a controlled share of word occurrences: random-edit misspellings plus
abbreviation and jargon substitutions drawn from the bundled lexicons.
Every injected corruption is recorded with the feature id it will get at
extraction time, so pipeline output can be scored against ground truth.
"""

from __future__ import annotations

import csv
import json
import random
import string
from dataclasses import dataclass
from pathlib import Path

from .autocorrect import ISSUE_ABBREVIATION, ISSUE_JARGON, ISSUE_MISSPELLING, SourceRegistry

MISSPELL_RATE = 0.10
ABBREV_RATE = 0.05
JARGON_RATE = 0.05

HEALTH_WORDS = """
health hospital doctor nurse patient medicine medical clinic surgery cancer
diabetes vaccine virus infection therapy treatment symptom diagnosis prescription pharmacy
ambulance emergency injury disease illness wellness fitness cardio dental mental
anxiety depression obesity nutrition vitamin protein exercise workout yoga meditation
insulin asthma allergy arthritis migraine fever cough influenza pandemic epidemic
immunity antibiotic painkiller dosage recovery rehabilitation checkup screening biopsy tumor
radiology pediatric maternity midwife dentist surgeon physician therapist psychologist psychiatrist
paramedic caregiver hospice outpatient inpatient medicare prognosis relapse remission transplant
donor cholesterol bandage fracture concussion stroke seizure appointment referral specialist
telehealth wellbeing hygiene sanitizer ward triage vaccination booster clinical healthcare
""".split()

OTHER_WORDS = """
budget economy finance taxation deficit surplus parliament senate minister policy
election campaign voter ballot legislation reform infrastructure highway railway transport
aviation tourism trade export import tariff currency inflation mortgage housing
rental construction mining agriculture farming harvest drought climate energy solar
petroleum pension welfare employment unemployment wages salary industry manufacturing retail
commerce startup investor shares stocks dividend banking education school university
student teacher curriculum literacy defence military security border immigration refugee
citizenship council mayor governor premier treasurer opposition coalition referendum protest
rally football cricket stadium athlete olympics tournament concert festival museum
gallery theatre cinema airport freight logistics customs diplomat embassy treaty
""".split()

SHARED_WORDS = """
people public community national federal state local service system program
project funding money cost price value report announcement statement decision
meeting conference review update change support help care plan group
team leader member family children parents workers business company market
growth future today tomorrow yesterday week month year time news
media social online digital website internet mobile phone video photo
story issue problem crisis risk safety quality access equity benefit
impact result outcome demand supply increase decrease improvement development research
science data analysis study survey question answer opinion discussion agreement
region city town street event government department chance effort progress
""".split()

VOCABULARY = HEALTH_WORDS + OTHER_WORDS + SHARED_WORDS

# small function-word filler so posts read like sentences; never corrupted,
# never keywords
FILLER_WORDS = "the to of in on for and at with from this that".split()

HASHTAG_POOL = {
    "health": ["health", "medicare", "auspol", "budget2016"],
    "other": ["ausbudget", "budget2016", "auspol"],
}

GEO_POOL = ["Sydney, Australia", "Melbourne, Australia", "Brisbane, Australia",
            "Perth, Australia", "Utah, USA"]

SPECIFIC_SHARE = 0.34  # of non-filler draws
FILLER_SHARE = 0.25
INJECTABLE_BOOST = 3  # sampling weight for words that have abbrev/jargon forms

VOCAB_SET = set(VOCABULARY)


@dataclass(frozen=True)
class Corruption:
    post_id: str
    feature_id: str
    surface: str  # as it appears in the corrupted text
    original: str
    issue: str


@dataclass
class Benchmark:
    posts: list[dict]
    labels: dict[str, str]
    corruptions: list[Corruption]

    def truth_rows(self) -> list[tuple[str, str, str]]:
        rows = [("identification", pid, label) for pid, label in sorted(self.labels.items())]
        for c in self.corruptions:
            rows.append(("suggestion", c.feature_id, c.issue))
            rows.append(("correction", c.feature_id, c.original))
        return rows


def _reverse_abbreviations(sources: SourceRegistry) -> dict[str, list[str]]:
    """original word -> abbreviation keys whose first expansion is it."""
    table: dict[str, list[str]] = {}
    for key, expansions in sorted(sources.abbrev.entries.items()):
        if expansions and " " not in expansions[0]:
            table.setdefault(expansions[0].casefold(), []).append(key)
    return table


def _reverse_jargon(sources: SourceRegistry) -> dict[str, list[str]]:
    table: dict[str, list[str]] = {}
    for term, canonical in sorted(sources.jargon.entries.items()):
        table.setdefault(canonical.casefold(), []).append(term)
    return table


def _random_edit(word: str, rng: random.Random) -> str:
    letters = string.ascii_lowercase
    kind = rng.choice(["insert", "delete", "substitute", "transpose"])
    i = rng.randrange(len(word))
    if kind == "insert":
        return word[:i] + rng.choice(letters) + word[i:]
    if kind == "delete" and len(word) > 3:
        return word[:i] + word[i + 1:]
    if kind == "transpose" and len(word) > 3 and i < len(word) - 1:
        return word[:i] + word[i + 1] + word[i] + word[i + 2:]
    repl = rng.choice([c for c in letters if c != word[i]])
    return word[:i] + repl + word[i + 1:]


def _misspell(word: str, rng: random.Random, forbidden) -> str | None:
    for _ in range(25):
        bad = _random_edit(word, rng)
        if bad != word and not forbidden(bad):
            return bad
    return None


def generate_benchmark(n_posts: int = 500, seed: int = 42,
                       sources: SourceRegistry | None = None) -> Benchmark:
    rng = random.Random(seed)
    sources = sources or SourceRegistry.from_lexicon_dir()
    abbrev_for = _reverse_abbreviations(sources)
    jargon_for = _reverse_jargon(sources)
    injectable = set(abbrev_for) | set(jargon_for)

    def forbidden(token: str) -> bool:
        return (
            token.casefold() in sources.spell
            or token.casefold() in sources.abbrev.entries
            or token.casefold() in sources.jargon.entries
            or len(token) < 3
        )

    def weighted(pool: list[str]) -> str:
        weights = [INJECTABLE_BOOST if w in injectable else 1 for w in pool]
        return rng.choices(pool, weights=weights, k=1)[0]

    # pass 1: draw every post's word list
    labels = {}
    word_lists: list[list[str]] = []
    for n in range(n_posts):
        post_id = f"p{n:04d}"
        label = "health" if rng.random() < 0.5 else "other"
        specific = HEALTH_WORDS if label == "health" else OTHER_WORDS
        words = []
        for _ in range(rng.randint(8, 14)):
            r = rng.random()
            if r < FILLER_SHARE:
                words.append(rng.choice(FILLER_WORDS))
            elif r < FILLER_SHARE + (1 - FILLER_SHARE) * SPECIFIC_SHARE:
                words.append(weighted(specific))
            else:
                words.append(weighted(SHARED_WORDS))
        labels[post_id] = label
        word_lists.append(words)

    # pass 2: pick corruption targets over the whole corpus so the rates
    # hold globally (per post the quotas would round to zero)
    eligible = [
        (n, i) for n, words in enumerate(word_lists)
        for i, w in enumerate(words) if w in VOCAB_SET
    ]
    rng.shuffle(eligible)
    quota = {
        ISSUE_MISSPELLING: round(MISSPELL_RATE * len(eligible)),
        ISSUE_ABBREVIATION: round(ABBREV_RATE * len(eligible)),
        ISSUE_JARGON: round(JARGON_RATE * len(eligible)),
    }
    planned: dict[tuple[int, int], tuple[str, str]] = {}  # (post, pos) -> (issue, token)
    for n, i in eligible:
        word = word_lists[n][i]
        if quota[ISSUE_JARGON] > 0 and word in jargon_for:
            planned[(n, i)] = (ISSUE_JARGON, rng.choice(jargon_for[word]))
            quota[ISSUE_JARGON] -= 1
        elif quota[ISSUE_ABBREVIATION] > 0 and word in abbrev_for:
            key = rng.choice(abbrev_for[word])
            if len(key) <= 6 and rng.random() < 0.5:
                key = key + "."
            planned[(n, i)] = (ISSUE_ABBREVIATION, key)
            quota[ISSUE_ABBREVIATION] -= 1
        elif quota[ISSUE_MISSPELLING] > 0:
            bad = _misspell(word, rng, forbidden)
            if bad is not None:
                planned[(n, i)] = (ISSUE_MISSPELLING, bad)
                quota[ISSUE_MISSPELLING] -= 1

    # pass 3: assemble corrupted texts and record ground truth spans
    posts, corruptions = [], []
    for n, words in enumerate(word_lists):
        post_id = f"p{n:04d}"
        originals = {}
        for i in range(len(words)):
            if (n, i) in planned:
                originals[i] = words[i]
                words[i] = planned[(n, i)][1]

        hashtags = []
        if rng.random() < 0.5:
            hashtags.append(rng.choice(HASHTAG_POOL[labels[post_id]]))
        text = " ".join(words)
        if hashtags:
            text += " #" + hashtags[0]

        offset = 0
        for i, w in enumerate(words):
            if i in originals:
                issue, token = planned[(n, i)]
                feature_id = f"{post_id}:{offset}-{offset + len(w)}:keyword"
                corruptions.append(
                    Corruption(post_id, feature_id, token, originals[i], issue)
                )
            offset += len(w) + 1

        posts.append(
            {
                "id": post_id,
                "text": text,
                "hashtags": hashtags,
                "links": [],
                "user": f"user{n % 97:02d}",
                "geo": rng.choice(GEO_POOL) if rng.random() < 0.3 else None,
                "created_at": f"2016-05-{(n % 28) + 1:02d}T12:00:00+00:00",
            }
        )
    return Benchmark(posts=posts, labels=labels, corruptions=corruptions)


def write_benchmark(bench: Benchmark, out_dir: str | Path) -> dict[str, Path]:
    """Write corpus.jsonl (ingestable), labels.csv and truth.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "corpus": out / "corpus.jsonl",
        "labels": out / "labels.csv",
        "truth": out / "truth.csv",
    }
    with open(paths["corpus"], "w", encoding="utf-8") as fh:
        for post in bench.posts:
            fh.write(json.dumps(post, ensure_ascii=False, sort_keys=True) + "\n")
    with open(paths["labels"], "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["post_id", "label"])
        for post_id in sorted(bench.labels):
            writer.writerow([post_id, bench.labels[post_id]])
    with open(paths["truth"], "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "ref_id", "truth"])
        writer.writerows(bench.truth_rows())
    return paths


def load_truth_rows(path: str | Path) -> list[tuple[str, str, str]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        assert header == ["kind", "ref_id", "truth"], f"bad truth header {header}"
        return [(k, r, t) for k, r, t in reader]


def load_labels(path: str | Path) -> dict[str, str]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        return {pid: label for pid, label in reader}
