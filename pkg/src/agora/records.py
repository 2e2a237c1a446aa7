"""Tweet and user record types plus parsers for API-shaped page payloads.

The page shape mirrors the public v2 search response: ``data`` is a list of
tweet objects, ``includes.users`` / ``includes.tweets`` carry the expansions
needed to resolve interaction targets offline, and ``meta.next_token`` drives
pagination.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any

log = logging.getLogger(__name__)

# referenced_tweets.type values that become graph interactions
REFERENCE_KINDS = ("retweeted", "quoted", "replied_to")


def parse_timestamp(value: str) -> datetime:
    """Parse an RFC 3339 timestamp into an aware UTC datetime."""
    dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    """Render a datetime as the RFC 3339 `Z` form the API uses."""
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def _require_decimal_id(value: Any, what: str) -> str:
    if not isinstance(value, str) or not value or not value.isdigit():
        raise ValueError(f"{what} must be a nonempty decimal string, got {value!r}")
    return value


@dataclass(frozen=True)
class TweetRecord:
    """One collected post with the references needed to build edges."""

    id: str
    text: str
    author_id: str
    created_at: datetime
    referenced: tuple[tuple[str, str], ...] = ()  # (kind, tweet_id)
    reply_to_user_id: str | None = None
    mentions: tuple[tuple[str, str], ...] = ()  # (user_id, username)
    lang: str | None = None

    @classmethod
    def from_api(cls, obj: dict[str, Any]) -> "TweetRecord":
        tweet_id = _require_decimal_id(obj.get("id"), "tweet id")
        author = _require_decimal_id(obj.get("author_id"), "author_id")
        created = parse_timestamp(obj["created_at"])

        referenced = []
        for ref in obj.get("referenced_tweets") or ():
            kind = ref.get("type")
            if kind not in REFERENCE_KINDS:
                continue
            referenced.append((kind, _require_decimal_id(ref.get("id"), "referenced tweet id")))

        mentions = []
        for m in (obj.get("entities") or {}).get("mentions") or ():
            username = m.get("username") or ""
            uid = m.get("id")
            if not uid:
                continue  # old-style mention entity without user id; nothing to link
            mentions.append((_require_decimal_id(uid, "mention user id"), username))

        return cls(
            id=tweet_id,
            text=obj.get("text") or "",
            author_id=author,
            created_at=created,
            referenced=tuple(referenced),
            reply_to_user_id=obj.get("in_reply_to_user_id"),
            mentions=tuple(mentions),
            lang=obj.get("lang"),
        )

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "id": self.id,
            "text": self.text,
            "author_id": self.author_id,
            "created_at": format_timestamp(self.created_at),
        }
        if self.referenced:
            out["referenced"] = [list(r) for r in self.referenced]
        if self.reply_to_user_id:
            out["reply_to_user_id"] = self.reply_to_user_id
        if self.mentions:
            out["mentions"] = [list(m) for m in self.mentions]
        if self.lang:
            out["lang"] = self.lang
        return out

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "TweetRecord":
        return cls(
            id=obj["id"],
            text=obj["text"],
            author_id=obj["author_id"],
            created_at=parse_timestamp(obj["created_at"]),
            referenced=tuple((k, t) for k, t in obj.get("referenced", ())),
            reply_to_user_id=obj.get("reply_to_user_id"),
            mentions=tuple((u, n) for u, n in obj.get("mentions", ())),
            lang=obj.get("lang"),
        )

    def to_api(self) -> dict[str, Any]:
        """Back to the wire shape, suitable for replay files."""
        obj: dict[str, Any] = {
            "id": self.id,
            "text": self.text,
            "author_id": self.author_id,
            "created_at": format_timestamp(self.created_at),
        }
        if self.referenced:
            obj["referenced_tweets"] = [{"type": k, "id": t} for k, t in self.referenced]
        if self.reply_to_user_id:
            obj["in_reply_to_user_id"] = self.reply_to_user_id
        if self.mentions:
            obj["entities"] = {
                "mentions": [{"id": uid, "username": name} for uid, name in self.mentions]
            }
        if self.lang:
            obj["lang"] = self.lang
        return obj


@dataclass(frozen=True)
class UserStub:
    """Minimal user profile carried in page expansions."""

    id: str
    username: str
    display_name: str = ""
    followers_count: int = 0

    @classmethod
    def from_api(cls, obj: dict[str, Any]) -> "UserStub":
        uid = _require_decimal_id(obj.get("id"), "user id")
        username = obj.get("username") or ""
        if not username:
            raise ValueError(f"user {uid} has an empty username")
        metrics = obj.get("public_metrics") or {}
        return cls(
            id=uid,
            username=username,
            display_name=obj.get("name") or "",
            followers_count=max(0, int(metrics.get("followers_count", 0))),
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "username": self.username,
            "display_name": self.display_name,
            "followers_count": self.followers_count,
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "UserStub":
        return cls(
            id=obj["id"],
            username=obj["username"],
            display_name=obj.get("display_name", ""),
            followers_count=obj.get("followers_count", 0),
        )

    def to_api(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "username": self.username,
            "name": self.display_name,
            "public_metrics": {"followers_count": self.followers_count},
        }


@dataclass
class TweetBatch:
    """One page worth of parsed records plus their expansions."""

    tweets: list[TweetRecord] = field(default_factory=list)
    users: dict[str, UserStub] = field(default_factory=dict)
    ref_tweets: dict[str, TweetRecord] = field(default_factory=dict)
    raw: dict[str, Any] | None = None


@dataclass
class CollectionReport:
    """Outcome of one collection run for a discussion."""

    discussion: str
    fetched: int = 0
    stored_new: int = 0
    duplicates: int = 0
    retries: int = 0
    resumed_from_id: str | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "discussion": self.discussion,
            "fetched": self.fetched,
            "stored_new": self.stored_new,
            "duplicates": self.duplicates,
            "retries": self.retries,
            "resumed_from_id": self.resumed_from_id,
        }


def parse_search_page(obj: dict[str, Any]) -> TweetBatch:
    """Parse one search-response page object into records and expansions."""
    if not isinstance(obj, dict):
        raise ValueError("page must be a JSON object")
    batch = TweetBatch(raw=obj)
    for item in obj.get("data") or ():
        batch.tweets.append(TweetRecord.from_api(item))
    includes = obj.get("includes") or {}
    for item in includes.get("users") or ():
        stub = UserStub.from_api(item)
        batch.users[stub.id] = stub
    for item in includes.get("tweets") or ():
        rec = TweetRecord.from_api(item)
        batch.ref_tweets[rec.id] = rec
    return batch


def parse_follower_page(obj: dict[str, Any]) -> list[UserStub]:
    """Parse one followers-response page into user stubs."""
    if not isinstance(obj, dict):
        raise ValueError("page must be a JSON object")
    return [UserStub.from_api(item) for item in obj.get("data") or ()]


def snowflake_warnings(records: list[TweetRecord]) -> list[str]:
    """Check that numeric id order matches created_at order.

    Violations are reported as warnings, never failures: replayed or
    hand-built fixtures may not honor the snowflake property.
    """
    ordered = sorted(records, key=lambda r: (r.created_at, int(r.id)))
    warnings = []
    prev = None
    for rec in ordered:
        if prev is not None and int(rec.id) < int(prev.id):
            warnings.append(
                f"tweet {rec.id} created after {prev.id} but has a smaller id"
            )
        prev = rec
    return warnings
