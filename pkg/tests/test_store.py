import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agora.errors import UnknownAccount, UnknownDiscussion
from agora.records import TweetBatch, TweetRecord, UserStub
from agora.store import Store

from conftest import api_tweet, api_user


def batch_of(ids, offsets=None, users=()):
    offsets = offsets or list(range(len(ids)))
    return TweetBatch(
        tweets=[TweetRecord.from_api(api_tweet(i, 1, offset=o)) for i, o in zip(ids, offsets)],
        users={str(u): UserStub.from_api(api_user(u)) for u in users},
    )


class TestUpsert:
    def test_idempotent_by_id(self, store):
        assert store.upsert_tweets("#t", batch_of([1, 2])) == 2
        assert store.upsert_tweets("#t", batch_of([2, 3])) == 1

    def test_same_batch_twice_is_noop(self, store):
        batch = batch_of([1, 2, 3])
        assert store.upsert_tweets("#t", batch) == 3
        assert store.upsert_tweets("#t", batch) == 0

    def test_key_lookup_is_case_insensitive(self, store):
        store.upsert_tweets("#Test", batch_of([1]))
        assert store.newest_tweet_id("#test") == "1"

    def test_user_stub_last_write_wins(self, store):
        first = TweetBatch(tweets=[], users={"9": UserStub("9", "old", "Old", 1)})
        second = TweetBatch(tweets=[], users={"9": UserStub("9", "new", "New", 2)})
        store.upsert_tweets("#t", first)
        store.upsert_tweets("#t", second)
        assert store.users("#t")["9"].username == "new"

    def test_large_batch_round_trip_in_order(self, store):
        ids = list(range(1000, 2000))
        store.upsert_tweets("#t", batch_of(ids, offsets=list(range(1000))))
        out = list(store.iter_tweets("#t"))
        assert len(out) == 1000
        assert [t.id for t in out] == [str(i) for i in ids]


class TestNewestId:
    def test_absent_discussion(self, store):
        assert store.newest_tweet_id("#nothing") is None

    def test_max_of_ids(self, store):
        store.upsert_tweets("#t", batch_of([5, 9, 7]))
        assert store.newest_tweet_id("#t") == "9"

    def test_numeric_not_lexicographic(self, store):
        store.upsert_tweets("#t", batch_of([90, 1000]))
        assert store.newest_tweet_id("#t") == "1000"


class TestOrdering:
    def test_created_at_then_id(self, store):
        batch = TweetBatch(
            tweets=[
                TweetRecord.from_api(api_tweet(30, 1, offset=1)),
                TweetRecord.from_api(api_tweet(20, 1, offset=0)),
                TweetRecord.from_api(api_tweet(10, 1, offset=1)),
            ]
        )
        store.upsert_tweets("#t", batch)
        assert [t.id for t in store.iter_tweets("#t")] == ["20", "10", "30"]


class TestDurability:
    def test_survives_reopen(self, store, tmp_path):
        store.upsert_tweets("#t", batch_of([1, 2], users=[7]))
        store.save_followers("acct", {"1", "2"})
        reopened = Store(store.root)
        assert [t.id for t in reopened.iter_tweets("#t")] == ["1", "2"]
        assert reopened.users("#t")["7"].username == "user7"
        assert reopened.load_followers("acct") == {"1", "2"}

    def test_torn_final_line_ignored(self, store):
        store.upsert_tweets("#t", batch_of([1]))
        log = store.root / "discussions" / "%23t" / "log.ndjson"
        with log.open("ab") as fh:
            fh.write(b'{"tweets": [{"id": "99"')  # crash mid-append
        reopened = Store(store.root)
        assert [t.id for t in reopened.iter_tweets("#t")] == ["1"]
        assert reopened.upsert_tweets("#t", batch_of([2])) == 1

    def test_corrupted_interior_line_is_storage_error(self, store):
        from agora.errors import StorageIO

        store.upsert_tweets("#t", batch_of([1]))
        log = store.root / "discussions" / "%23t" / "log.ndjson"
        content = log.read_bytes()
        log.write_bytes(b"{broken}\n" + content)
        with pytest.raises(StorageIO, match="line 1"):
            list(Store(store.root).iter_tweets("#t"))


class TestFollowers:
    def test_union_semantics(self, store):
        store.save_followers("a", {"1", "2"})
        store.save_followers("a", {"2", "3"})
        assert store.load_followers("a") == {"1", "2", "3"}

    def test_unknown_account(self, store):
        with pytest.raises(UnknownAccount):
            store.load_followers("ghost")

    def test_ten_thousand_ids(self, store):
        ids = {str(i) for i in range(10_000)}
        store.save_followers("big", ids)
        assert len(store.load_followers("big")) == 10_000

    @settings(max_examples=25, deadline=None)
    @given(
        first=st.sets(st.integers(min_value=0, max_value=500)),
        second=st.sets(st.integers(min_value=0, max_value=500)),
    )
    def test_save_is_set_union(self, tmp_path_factory, first, second):
        store = Store(tmp_path_factory.mktemp("fstore"))
        store.save_followers("x", {str(i) for i in first})
        store.save_followers("x", {str(i) for i in second})
        assert store.load_followers("x") == {str(i) for i in first | second}


class TestIntrospection:
    def test_require_discussion(self, store):
        with pytest.raises(UnknownDiscussion):
            store.require_discussion("#missing")

    def test_stats(self, store):
        store.upsert_tweets("#a", batch_of([1, 2]))
        store.upsert_tweets("#b", batch_of([3]))
        store.save_followers("acct", {"1"})
        stats = store.stats()
        assert stats.discussions == 2
        assert stats.tweets_per_discussion == {"#a": 2, "#b": 1}
        assert stats.follower_sets == {"acct": 1}
