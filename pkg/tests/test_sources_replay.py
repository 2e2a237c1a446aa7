import pytest

from agora.collect import RetryPolicy, get_followers, search_tweets
from agora.errors import FileMissing, MalformedLine, SourceExhaustedRetries, UnknownAccount
from agora.sources import open_replay

from conftest import api_tweet, api_user, make_page, write_ndjson


def fast_retry(max_retries=5):
    sleeps = []
    return RetryPolicy(max_retries=max_retries, sleep=sleeps.append), sleeps


def five_tweet_pages():
    return [
        make_page([api_tweet(10 + i, 1 + i, offset=i) for i in range(3)],
                  users=[api_user(1 + i) for i in range(3)], next_token="n1"),
        make_page([api_tweet(13 + i, 4 + i, offset=3 + i) for i in range(2)],
                  users=[api_user(4 + i) for i in range(2)]),
    ]


class TestOpenReplay:
    def test_pages_replay_in_file_order(self, tmp_path):
        pages = [make_page([api_tweet(10 + i, 1, offset=i)]) for i in range(10)]
        source = open_replay(write_ndjson(tmp_path / "r.ndjson", pages))
        retry, _ = fast_retry()
        report = search_tweets(source, "#q", sink=None, retry=retry)
        assert report.fetched == 10

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileMissing):
            open_replay(tmp_path / "nope.ndjson")

    def test_malformed_line_reports_number(self, tmp_path):
        path = tmp_path / "bad.ndjson"
        lines = ['{"data": []}', '{"data": []}', "{not json"]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(MalformedLine) as err:
            open_replay(path)
        assert err.value.line_no == 3

    def test_bad_tweet_in_page_reports_line(self, tmp_path):
        good = make_page([api_tweet(10, 1)])
        bad = make_page([{"id": "x", "text": "t"}])
        path = write_ndjson(tmp_path / "bad.ndjson", [good, bad])
        with pytest.raises(MalformedLine) as err:
            open_replay(path)
        assert err.value.line_no == 2


class TestSearchReplay:
    def test_five_tweets_no_filter(self, tmp_path):
        source = open_replay(write_ndjson(tmp_path / "r.ndjson", five_tweet_pages()))
        retry, _ = fast_retry()
        report = search_tweets(source, "#q", retry=retry)
        assert report.fetched == 5
        assert report.stored_new == 5
        assert report.duplicates == 0
        assert report.retries == 0

    def test_since_id_max_filters_everything(self, tmp_path):
        source = open_replay(write_ndjson(tmp_path / "r.ndjson", five_tweet_pages()))
        retry, _ = fast_retry()
        report = search_tweets(source, "#q", since_id="14", retry=retry)
        assert report.fetched == 0

    def test_since_id_partial(self, tmp_path):
        source = open_replay(write_ndjson(tmp_path / "r.ndjson", five_tweet_pages()))
        retry, _ = fast_retry()
        report = search_tweets(source, "#q", since_id="12", retry=retry)
        assert report.fetched == 2

    def test_injected_429_mid_stream_retries_and_completes(self, tmp_path):
        lines = five_tweet_pages()
        lines.insert(0, {"fault": "429@2:1"})
        source = open_replay(write_ndjson(tmp_path / "r.ndjson", lines))
        retry, sleeps = fast_retry()
        delivered = []
        report = search_tweets(
            source, "#q", sink=lambda b: delivered.extend(t.id for t in b.tweets) or len(b.tweets),
            retry=retry,
        )
        assert report.fetched == 5
        assert report.retries == 1
        assert sleeps == [1.0]  # retry-after honored
        assert delivered == ["10", "11", "12", "13", "14"]

    def test_fault_argument_equivalent_to_directive(self, tmp_path):
        source = open_replay(
            write_ndjson(tmp_path / "r.ndjson", five_tweet_pages()), faults="500@1"
        )
        retry, sleeps = fast_retry()
        report = search_tweets(source, "#q", retry=retry)
        assert report.fetched == 5
        assert report.retries == 1
        assert sleeps == [1.0]  # first exponential back-off step

    def test_exactly_once_under_any_fault_schedule(self, tmp_path):
        pages = five_tweet_pages()
        for schedule in ("429@1", "reset@2", "429@1:0.1,500@2,429@2"):
            source = open_replay(write_ndjson(tmp_path / "r.ndjson", pages), faults=schedule)
            retry, _ = fast_retry()
            seen = []
            search_tweets(
                source, "#q",
                sink=lambda b: seen.extend(t.id for t in b.tweets) or len(b.tweets),
                retry=retry,
            )
            assert sorted(seen) == ["10", "11", "12", "13", "14"], schedule

    def test_retries_exhausted(self, tmp_path):
        faults = ",".join("429@1" for _ in range(6))
        source = open_replay(write_ndjson(tmp_path / "r.ndjson", five_tweet_pages()),
                             faults=faults)
        retry, _ = fast_retry(max_retries=3)
        with pytest.raises(SourceExhaustedRetries):
            search_tweets(source, "#q", retry=retry)

    def test_backoff_is_exponential_and_capped(self, tmp_path):
        faults = ",".join(f"500@1" for _ in range(5))
        source = open_replay(write_ndjson(tmp_path / "r.ndjson", five_tweet_pages()),
                             faults=faults)
        retry, sleeps = fast_retry(max_retries=5)
        search_tweets(source, "#q", retry=retry)
        assert sleeps == [1.0, 2.0, 4.0, 8.0, 16.0]


class TestFollowersReplay:
    def follower_file(self, tmp_path):
        pages = [
            {"data": [api_user(1), api_user(2)], "meta": {"next_token": "f1"}, "account": "seed_a"},
            {"data": [api_user(3)], "meta": {}, "account": "seed_a"},
            {"data": [], "meta": {}, "account": "empty_seed"},
        ]
        return open_replay(write_ndjson(tmp_path / "f.ndjson", pages))

    def test_pagination_across_pages(self, tmp_path):
        retry, _ = fast_retry()
        ids = list(get_followers(self.follower_file(tmp_path), "seed_a", retry=retry))
        assert ids == ["1", "2", "3"]

    def test_zero_followers(self, tmp_path):
        retry, _ = fast_retry()
        assert list(get_followers(self.follower_file(tmp_path), "empty_seed", retry=retry)) == []

    def test_unknown_account(self, tmp_path):
        retry, _ = fast_retry()
        with pytest.raises(UnknownAccount):
            list(get_followers(self.follower_file(tmp_path), "ghost", retry=retry))

    def test_account_lookup_case_insensitive(self, tmp_path):
        retry, _ = fast_retry()
        ids = list(get_followers(self.follower_file(tmp_path), "SEED_A", retry=retry))
        assert ids == ["1", "2", "3"]
