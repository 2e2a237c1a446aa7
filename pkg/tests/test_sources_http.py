import pytest

from agora.collect import RetryPolicy, get_followers, search_tweets
from agora.errors import (
    AuthError,
    QuerySyntaxError,
    SourceExhaustedRetries,
    UnknownAccount,
)
from agora.sources import HttpTweetSource

from conftest import api_tweet, api_user, make_page
from stub_api import StubApi, StubServer


@pytest.fixture
def stub():
    api = StubApi()
    api.search_pages = [
        make_page([api_tweet(10 + i, 1, offset=i) for i in range(3)],
                  users=[api_user(1)], next_token="p1"),
        make_page([api_tweet(13, 2, offset=3), api_tweet(14, 2, offset=4)],
                  users=[api_user(2)]),
    ]
    api.users["seed_a"] = api_user(500, "seed_a", followers=3)
    api.followers["500"] = [
        {"data": [api_user(1), api_user(2)], "meta": {"next_token": "p1"}},
        {"data": [api_user(3)], "meta": {}},
    ]
    with StubServer(api) as server:
        yield api, server


def client(server, token="secret-token", page_size=100):
    return HttpTweetSource(base_url=server.base_url, token=token, page_size=page_size)


def fast_retry(max_retries=5):
    sleeps = []
    return RetryPolicy(max_retries=max_retries, sleep=sleeps.append), sleeps


class TestSearch:
    def test_paginates_to_exhaustion(self, stub):
        api, server = stub
        retry, _ = fast_retry()
        report = search_tweets(client(server), "#topic", retry=retry)
        assert report.fetched == 5
        search_calls = [p for p, _ in api.requests if p.endswith("/search/recent")]
        assert len(search_calls) == 2

    def test_since_id_forwarded_and_applied(self, stub):
        api, server = stub
        retry, _ = fast_retry()
        report = search_tweets(client(server), "#topic", since_id="12", retry=retry)
        assert report.fetched == 2
        params = [q for p, q in api.requests if p.endswith("/search/recent")][0]
        assert params["since_id"] == "12"

    def test_429_retry_after_honored(self, stub):
        api, server = stub
        api.faults.append({"path": "/search/recent", "status": 429, "retry_after": "1"})
        retry, sleeps = fast_retry()
        report = search_tweets(client(server), "#topic", retry=retry)
        assert report.fetched == 5
        assert report.retries == 1
        assert sleeps == [1.0]

    def test_500_then_success(self, stub):
        api, server = stub
        api.faults.append({"path": "/search/recent", "status": 503})
        retry, sleeps = fast_retry()
        report = search_tweets(client(server), "#topic", retry=retry)
        assert report.fetched == 5 and report.retries == 1
        assert sleeps == [1.0]

    def test_connection_reset_recovered(self, stub):
        api, server = stub
        api.faults.append({"path": "/search/recent", "reset": True})
        retry, _ = fast_retry()
        report = search_tweets(client(server), "#topic", retry=retry)
        assert report.fetched == 5
        assert report.retries == 1

    def test_mid_stream_fault_preserves_exactly_once(self, stub):
        api, server = stub
        # fault targets the second page fetch via its pagination token
        api.faults.append({"path": "next_token=p1", "status": 429, "retry_after": "0"})
        delivered = []
        retry, _ = fast_retry()
        report = search_tweets(
            client(server), "#topic",
            sink=lambda b: delivered.extend(t.id for t in b.tweets) or len(b.tweets),
            retry=retry,
        )
        assert sorted(delivered) == ["10", "11", "12", "13", "14"]
        assert report.retries == 1
        assert report.duplicates == 0

    def test_bad_token_not_retried(self, stub):
        api, server = stub
        retry, sleeps = fast_retry()
        with pytest.raises(AuthError):
            search_tweets(client(server, token="wrong"), "#topic", retry=retry)
        assert sleeps == []

    def test_query_syntax_error(self, stub):
        api, server = stub
        retry, _ = fast_retry()
        with pytest.raises(QuerySyntaxError):
            search_tweets(client(server), "!broken", retry=retry)

    def test_exhausted_retries(self, stub):
        api, server = stub
        for _ in range(10):
            api.faults.append({"path": "/search/recent", "status": 503})
        retry, _ = fast_retry(max_retries=3)
        with pytest.raises(SourceExhaustedRetries):
            search_tweets(client(server), "#topic", retry=retry)

    def test_garbage_body_retried(self, stub):
        api, server = stub
        api.faults.append({"path": "/search/recent", "garbage": True})
        retry, _ = fast_retry()
        report = search_tweets(client(server), "#topic", retry=retry)
        assert report.fetched == 5 and report.retries == 1

    def test_empty_token_rejected_up_front(self, stub):
        _, server = stub
        with pytest.raises(AuthError):
            HttpTweetSource(base_url=server.base_url, token="")


class TestFollowers:
    def test_streams_all_pages(self, stub):
        _, server = stub
        retry, _ = fast_retry()
        ids = list(get_followers(client(server), "seed_a", retry=retry))
        assert ids == ["1", "2", "3"]

    def test_unknown_account(self, stub):
        _, server = stub
        retry, _ = fast_retry()
        with pytest.raises(UnknownAccount):
            list(get_followers(client(server), "ghost", retry=retry))

    def test_fault_during_follower_pages(self, stub):
        api, server = stub
        api.faults.append({"path": "/followers", "status": 429, "retry_after": "2"})
        retry, sleeps = fast_retry()
        ids = list(get_followers(client(server), "seed_a", retry=retry))
        assert ids == ["1", "2", "3"]
        assert sleeps == [2.0]
