import json

import pytest

from crowdcorrect.autocorrect import SourceRegistry
from crowdcorrect.extract import load_stopwords
from crowdcorrect.ingest import PostStore, parse_post


@pytest.fixture(scope="session")
def sources():
    return SourceRegistry.from_lexicon_dir()


@pytest.fixture(scope="session")
def stopwords():
    return load_stopwords()


@pytest.fixture()
def post_store(tmp_path):
    return PostStore(tmp_path / "store")


def make_post(post_id="p1", text="hello world", **kw):
    payload = {"id": post_id, "text": text, **kw}
    return parse_post(json.dumps(payload))


@pytest.fixture()
def jazz_post():
    return make_post(
        "jazz1",
        "Get fit with the team: nba.com/jazz/get-fit-3 #JazzFit",
        hashtags=["JazzFit"],
        links=["nba.com/jazz/get-fit-3"],
        user="UtahJazz",
        geo="Utah, USA",
        created_at="2019-06-14T10:00:00+00:00",
    )
