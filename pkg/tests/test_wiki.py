import json
from pathlib import Path

import pytest

from routinemotifs.events import parse_timestamp, serialize_event_log
from routinemotifs.wiki import (
    ArticleNotFoundError,
    FetchError,
    FetchSpec,
    RateLimiter,
    RevisionMeta,
    WikiClient,
    export_event_log,
    revisions_to_events,
)

CUTOFF = parse_timestamp("2012-12-31T23:59:59Z")


class RecordedApi:
    """Replays recorded responses; counts calls and supports pagination."""

    def __init__(self, fixtures):
        self.fixtures = fixtures
        self.calls = 0
        self._page_cursor = {}

    def __call__(self, url, params):
        self.calls += 1
        if params.get("prop") == "revisions":
            title = params["titles"]
            pages = self.fixtures["revisions"].get(title)
            if pages is None:
                return {"query": {"pages": [{"title": title, "missing": True}]}}
            if "rvcontinue" in params:
                return pages[1]
            return pages[0]
        if params.get("list") == "usercontribs":
            return self.fixtures["usercontribs"].get(
                params["ucuser"], {"query": {"usercontribs": []}}
            )
        raise AssertionError(f"unexpected request {params}")


@pytest.fixture
def fixtures(testdata):
    return json.loads(testdata.joinpath("wiki_fixtures.json").read_text())


@pytest.fixture
def client(fixtures, tmp_path):
    spec = FetchSpec(titles=["Flying Car"], cutoff=CUTOFF, cache_dir=tmp_path / "cache",
                     rate_limit=1000.0)
    api = RecordedApi(fixtures)
    return WikiClient(spec, http_get=api), api


def test_pagination_stitches_pages(client):
    wiki, api = client
    revisions = wiki.fetch_revisions("Flying Car")
    assert [r.revision_id for r in revisions] == [101, 102, 104, 105]
    timestamps = [r.timestamp for r in revisions]
    assert timestamps == sorted(timestamps)
    assert len(set(r.revision_id for r in revisions)) == len(revisions)
    assert api.calls == 2
    assert wiki.skipped_suppressed == 1


def test_cache_hit_makes_no_network_calls(client):
    wiki, api = client
    first = wiki.fetch_revisions("Flying Car")
    calls_after_first = api.calls
    second = wiki.fetch_revisions("Flying Car")
    assert second == first
    assert api.calls == calls_after_first


def test_missing_article_raises_not_found(client):
    wiki, _ = client
    with pytest.raises(ArticleNotFoundError):
        wiki.fetch_revisions("Ghost Article")


def test_future_cutoff_rejected(tmp_path):
    with pytest.raises(ValueError):
        FetchSpec(titles=[], cutoff=2**33, cache_dir=tmp_path)


def test_retries_then_fetch_error(tmp_path):
    def failing(url, params):
        raise ConnectionError("boom")

    spec = FetchSpec(titles=["X"], cutoff=CUTOFF, cache_dir=tmp_path, rate_limit=1000.0,
                     max_retries=3)
    wiki = WikiClient(spec, http_get=failing)
    with pytest.raises(FetchError, match="3 retries"):
        wiki.fetch_revisions("X")


def test_first_edit_registered_user(client):
    wiki, _ = client
    assert wiki.fetch_first_edit("Alice") == parse_timestamp("2004-03-15T12:00:00Z")


def test_first_edit_empty_history_unknown(client):
    wiki, _ = client
    assert wiki.fetch_first_edit("Bob") is None


def test_first_edit_ip_performer_unknown(client):
    wiki, api = client
    before = api.calls
    assert wiki.fetch_first_edit("192.0.2.7") is None
    assert wiki.fetch_first_edit("2001:db8::1") is None
    assert api.calls == before  # policy decision, no lookup


def test_first_edit_cached(client):
    wiki, api = client
    wiki.fetch_first_edit("Alice")
    calls = api.calls
    wiki.fetch_first_edit("Alice")
    assert api.calls == calls


def test_rate_limiter_honors_bound():
    t = [0.0]
    sleeps = []

    def clock():
        return t[0]

    def sleep(seconds):
        sleeps.append(seconds)
        t[0] += seconds

    limiter = RateLimiter(2.0, clock=clock, sleep=sleep)
    stamps = []
    for _ in range(5):
        limiter.wait()
        stamps.append(t[0])
        t[0] += 0.1  # the request itself takes 100 ms
    gaps = [b - a for a, b in zip(stamps, stamps[1:])]
    assert all(g >= 0.5 - 1e-9 for g in gaps)


def _rev(title, rid, user, ts, size):
    return RevisionMeta(title=title, revision_id=rid, performer_id=user,
                        timestamp=parse_timestamp(ts), size_bytes=size)


def test_size_delta_derivation():
    revs = [
        _rev("X", 1, "U1", "2012-01-01T00:00:00Z", 100),
        _rev("X", 2, "U2", "2012-01-01T01:00:00Z", 250),
        _rev("X", 3, "U1", "2012-01-01T02:00:00Z", 200),
    ]
    log = revisions_to_events({"X": revs})
    assert [e.size_delta for e in log.events] == [100, 150, -50]


def test_export_row_count_and_determinism(tmp_path):
    by_title = {
        "A": [_rev("A", i, "U1", f"2012-01-01T0{i}:00:00Z", 100 * i) for i in range(1, 4)],
        "B": [_rev("B", i, "U2", f"2012-01-02T0{i}:00:00Z", 50 * i) for i in range(1, 3)],
    }
    out1 = tmp_path / "events1.csv"
    out2 = tmp_path / "events2.csv"
    export_event_log(by_title, out1)
    export_event_log(by_title, out2)
    assert out1.read_bytes() == out2.read_bytes()
    assert len(out1.read_text().splitlines()) == 1 + 5


def test_cache_roundtrip_equals_fetch(client, fixtures, tmp_path):
    wiki, _ = client
    fetched = wiki.fetch_revisions("Flying Car")
    # A fresh client over the same cache dir reads identical results offline.
    spec = FetchSpec(titles=["Flying Car"], cutoff=CUTOFF,
                     cache_dir=wiki.spec.cache_dir, rate_limit=1000.0)

    def no_network(url, params):
        raise AssertionError("offline client must not touch the network")

    offline = WikiClient(spec, http_get=no_network)
    assert offline.fetch_revisions("Flying Car") == fetched


def test_export_then_parse_roundtrip(tmp_path):
    revs = [_rev("X", 1, "U1", "2012-01-01T00:00:00Z", 10)]
    out = tmp_path / "events.csv"
    log = export_event_log({"X": revs}, out)
    assert out.read_text() == serialize_event_log(log, "csv")
