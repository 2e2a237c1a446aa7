from datetime import timezone

import pytest

from agora.records import (
    TweetRecord,
    UserStub,
    parse_search_page,
    parse_timestamp,
    snowflake_warnings,
)

from conftest import api_tweet, api_user, make_page


class TestTweetParsing:
    def test_minimal_tweet(self):
        rec = TweetRecord.from_api(api_tweet(10, 1))
        assert rec.id == "10"
        assert rec.author_id == "1"
        assert rec.created_at.tzinfo == timezone.utc
        assert rec.referenced == ()
        assert rec.mentions == ()

    def test_references_and_mentions(self):
        obj = api_tweet(
            10, 1,
            referenced=[("retweeted", 5), ("replied_to", 6)],
            mentions=[(2, "bob"), (3, "carol")],
            reply_to=6,
        )
        rec = TweetRecord.from_api(obj)
        assert rec.referenced == (("retweeted", "5"), ("replied_to", "6"))
        assert rec.mentions == (("2", "bob"), ("3", "carol"))
        assert rec.reply_to_user_id == "6"

    def test_unknown_reference_kind_ignored(self):
        obj = api_tweet(10, 1)
        obj["referenced_tweets"] = [{"type": "bookmarked", "id": "9"}]
        assert TweetRecord.from_api(obj).referenced == ()

    def test_bad_reference_id_rejected(self):
        obj = api_tweet(10, 1, referenced=[("retweeted", 5)])
        obj["referenced_tweets"][0]["id"] = ""
        with pytest.raises(ValueError):
            TweetRecord.from_api(obj)

    def test_non_decimal_id_rejected(self):
        obj = api_tweet(10, 1)
        obj["id"] = "abc"
        with pytest.raises(ValueError):
            TweetRecord.from_api(obj)

    def test_json_round_trip(self):
        rec = TweetRecord.from_api(
            api_tweet(10, 1, referenced=[("quoted", 4)], mentions=[(2, "bob")], reply_to=2)
        )
        assert TweetRecord.from_json(rec.to_json()) == rec

    def test_zulu_timestamp(self):
        dt = parse_timestamp("2023-03-01T12:34:56.000Z")
        assert dt.hour == 12 and dt.tzinfo == timezone.utc


class TestUserParsing:
    def test_fields(self):
        stub = UserStub.from_api(api_user(1, "alice", "Alice A", followers=7))
        assert stub == UserStub("1", "alice", "Alice A", 7)

    def test_empty_username_rejected(self):
        with pytest.raises(ValueError):
            UserStub.from_api({"id": "1", "username": ""})

    def test_negative_followers_clamped(self):
        stub = UserStub.from_api(
            {"id": "1", "username": "a", "public_metrics": {"followers_count": -3}}
        )
        assert stub.followers_count == 0


class TestPageParsing:
    def test_full_page(self):
        page = make_page(
            [api_tweet(10, 1), api_tweet(11, 2)],
            users=[api_user(1), api_user(2)],
            ref_tweets=[api_tweet(5, 3)],
        )
        batch = parse_search_page(page)
        assert [t.id for t in batch.tweets] == ["10", "11"]
        assert set(batch.users) == {"1", "2"}
        assert set(batch.ref_tweets) == {"5"}
        assert batch.raw is page

    def test_empty_page(self):
        batch = parse_search_page({"meta": {"result_count": 0}})
        assert batch.tweets == []


class TestSnowflakeWarnings:
    def test_consistent_order_is_quiet(self):
        records = [
            TweetRecord.from_api(api_tweet(10, 1, offset=0)),
            TweetRecord.from_api(api_tweet(11, 1, offset=1)),
        ]
        assert snowflake_warnings(records) == []

    def test_inversion_warns_without_raising(self):
        records = [
            TweetRecord.from_api(api_tweet(20, 1, offset=0)),
            TweetRecord.from_api(api_tweet(10, 1, offset=5)),
        ]
        warnings = snowflake_warnings(records)
        assert len(warnings) == 1 and "10" in warnings[0]
