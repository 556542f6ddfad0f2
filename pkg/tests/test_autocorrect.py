import pytest

from crowdcorrect.autocorrect import (
    ISSUE_ABBREVIATION,
    ISSUE_JARGON,
    ISSUE_MISSPELLING,
    ISSUE_NONE,
    AutoCorrectConfig,
    OverlappingSpans,
    SourceRegistry,
    apply_corrections,
    auto_correct_corpus,
    classify_issue,
    transfer_case,
)
from crowdcorrect.extract import (
    STATUS_AUTO,
    STATUS_CLEAN,
    STATUS_NEEDS_CROWD,
    extract_features,
)
from crowdcorrect.knowledge import AbbreviationSource, JargonSource, SpellSource

from conftest import make_post


@pytest.fixture()
def mini_sources():
    return SourceRegistry(
        spell=SpellSource({"health": 5000, "heal": 120, "wealth": 200,
                           "card": 800, "cardio": 150, "plan": 900}),
        abbrev=AbbreviationSource({"hosp": ["hospital"], "aus": ["Australia"]}),
        jargon=JargonSource({"cardiologist": "doctor", "neurologist": "doctor"}),
    )


def _keyword(surface, post_id="p", span=(0, None)):
    start, end = span[0], span[1] if span[1] is not None else span[0] + len(surface)
    from crowdcorrect.extract import KEYWORD, FeatureRecord

    return FeatureRecord(
        feature_id=f"{post_id}:{start}-{end}:keyword",
        post_id=post_id, kind=KEYWORD, surface=surface, span=(start, end),
    )


def test_classify_misspelling(mini_sources):
    issue, cands = classify_issue(_keyword("healht"), mini_sources)
    assert issue == ISSUE_MISSPELLING
    assert cands[0].replacement == "health" and cands[0].score == pytest.approx(1.0)


def test_classify_abbreviation(mini_sources):
    issue, cands = classify_issue(_keyword("Hosp."), mini_sources)
    assert issue == ISSUE_ABBREVIATION
    assert ("hospital", 1.0) in [(c.replacement, c.score) for c in cands]


def test_classify_clean_word(mini_sources):
    assert classify_issue(_keyword("health"), mini_sources) == (ISSUE_NONE, [])


def test_classify_jargon_overrides_dictionary():
    sources = SourceRegistry(
        spell=SpellSource({"cardiologist": 50, "doctor": 500}),
        abbrev=AbbreviationSource({}),
        jargon=JargonSource({"cardiologist": "doctor"}),
    )
    issue, cands = classify_issue(_keyword("cardiologist"), sources)
    assert issue == ISSUE_JARGON and cands[0].replacement == "doctor"


def test_classify_oov_without_candidates(mini_sources):
    issue, cands = classify_issue(_keyword("zzqqk"), mini_sources)
    assert issue == ISSUE_MISSPELLING and cands == []


def test_auto_correct_statuses(mini_sources, stopwords):
    post = make_post("p", "healht cardo cardiologist plan Hosp.")
    features = extract_features(post, stopwords)
    annotated = auto_correct_corpus(features, mini_sources)
    by_surface = {f.surface: f for f in annotated}

    healht = by_surface["healht"]  # top candidate 1.0 with clear margin
    assert healht.status == STATUS_AUTO and healht.correction == "health"
    assert healht.provenance["method"] == "auto"

    cardo = by_surface["cardo"]  # card and cardio both clamp to 1.0: no margin
    assert cardo.status == STATUS_NEEDS_CROWD
    assert cardo.issue_class == ISSUE_MISSPELLING
    assert cardo.candidates  # cached for task generation

    assert by_surface["cardiologist"].status == STATUS_AUTO
    assert by_surface["cardiologist"].correction == "doctor"
    assert by_surface["plan"].status == STATUS_CLEAN
    assert by_surface["Hosp."].status == STATUS_AUTO
    assert by_surface["Hosp."].correction == "hospital"


def test_partition_after_pass(mini_sources, stopwords):
    post = make_post("p", "healht cardo zzqqk plan wealth cardiologist")
    annotated = auto_correct_corpus(extract_features(post, stopwords), mini_sources)
    keyword_statuses = {f.status for f in annotated if f.kind == "keyword"}
    assert keyword_statuses <= {STATUS_CLEAN, STATUS_AUTO, STATUS_NEEDS_CROWD}


def test_threshold_monotonicity(mini_sources, stopwords):
    post = make_post("p", "healht cardo zzqqk plan wealht cardiologist Hosp.")
    features = extract_features(post, stopwords)

    def auto_set(threshold):
        annotated = auto_correct_corpus(
            features, mini_sources, AutoCorrectConfig(accept_threshold=threshold)
        )
        return {f.feature_id for f in annotated if f.status == STATUS_AUTO}

    previous = auto_set(0.5)
    for threshold in (0.6, 0.7, 0.8, 0.9, 1.0):
        current = auto_set(threshold)
        assert current <= previous  # raising the bar never auto-corrects more
        previous = current


def test_non_keyword_features_untouched(mini_sources, stopwords):
    post = make_post("p", "healht #ausbudget")
    annotated = auto_correct_corpus(extract_features(post, stopwords), mini_sources)
    hashtag = [f for f in annotated if f.kind == "hashtag"][0]
    assert hashtag.status == "untouched"


def test_transfer_case():
    assert transfer_case("Healht", "health") == "Health"
    assert transfer_case("healht", "Health") == "health"
    assert transfer_case("x", "") == ""


def test_apply_corrections_capitalization(mini_sources, stopwords):
    post = make_post("b", "Healht insurers given all clear")
    annotated = auto_correct_corpus(extract_features(post, stopwords), mini_sources)
    assert apply_corrections(post, annotated) == "Health insurers given all clear"


def test_apply_corrections_identity(stopwords, mini_sources):
    post = make_post("b2", "plan health wealth")
    annotated = auto_correct_corpus(extract_features(post, stopwords), mini_sources)
    assert apply_corrections(post, annotated) == post.text


def test_apply_two_corrections_rebuild():
    post = make_post("b3", "healht plan cardo")
    f1 = _keyword("healht", "b3", (0, 6)).with_(status=STATUS_AUTO, correction="health")
    f2 = _keyword("cardo", "b3", (12, 17)).with_(status=STATUS_AUTO, correction="cardio")
    # independent rebuild: slice concatenation by hand
    expected = "health" + post.text[6:12] + "cardio"
    assert apply_corrections(post, [f1, f2]) == expected == "health plan cardio"


def test_apply_length_identity():
    post = make_post("b4", "healht plan cardo")
    f1 = _keyword("healht", "b4", (0, 6)).with_(status=STATUS_AUTO, correction="health")
    f2 = _keyword("cardo", "b4", (12, 17)).with_(status=STATUS_AUTO, correction="cardiology")
    out = apply_corrections(post, [f1, f2])
    delta = (len("health") - 6) + (len("cardiology") - 5)
    assert len(out) == len(post.text) + delta


def test_apply_overlapping_spans_rejected():
    post = make_post("b5", "abcdef")
    f1 = _keyword("abcd", "b5", (0, 4)).with_(status=STATUS_AUTO, correction="x")
    f2 = _keyword("cdef", "b5", (2, 6)).with_(status=STATUS_AUTO, correction="y")
    with pytest.raises(OverlappingSpans):
        apply_corrections(post, [f1, f2])


def test_determinism_byte_identical(mini_sources, stopwords):
    post = make_post("p", "healht cardo cardiologist plan Hosp.")
    features = extract_features(post, stopwords)
    one = [f.to_json() for f in auto_correct_corpus(features, mini_sources)]
    two = [f.to_json() for f in auto_correct_corpus(features, mini_sources)]
    assert one == two


def test_config_validation():
    with pytest.raises(ValueError):
        AutoCorrectConfig(accept_threshold=0.0)
    with pytest.raises(ValueError):
        AutoCorrectConfig(accept_margin=-0.1)


class _FakeRemote:
    def __init__(self, issue_class, result=None, error=None):
        self.issue_class = issue_class
        self.source_id = f"remote-{issue_class}"
        self.result = result or []
        self.error = error

    def candidates(self, word):
        if self.error is not None:
            raise self.error
        return self.result


def test_remote_fallback_fills_local_miss(mini_sources):
    from crowdcorrect.knowledge import Candidate

    mini_sources.extra.append(_FakeRemote(
        ISSUE_ABBREVIATION, result=[Candidate("emergency", 1.0, "remote-abbrev")],
    ))
    issue, cands = classify_issue(_keyword("er"), mini_sources)
    assert issue == ISSUE_ABBREVIATION
    assert cands[0].replacement == "emergency"
    mini_sources.extra.clear()


def test_remote_failure_treated_as_empty(mini_sources, caplog):
    from crowdcorrect.knowledge import NetworkError

    mini_sources.extra.append(_FakeRemote(ISSUE_MISSPELLING,
                                          error=NetworkError("timeout")))
    with caplog.at_level("WARNING"):
        issue, cands = classify_issue(_keyword("zzqqk"), mini_sources)
    assert (issue, cands) == (ISSUE_MISSPELLING, [])
    assert any("remote-misspelling" in r.message for r in caplog.records)
    mini_sources.extra.clear()
