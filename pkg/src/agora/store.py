"""Durable, idempotent on-disk persistence for tweets and follower sets.

Layout under the store root (private; use the export surface for anything
downstream):

    discussions/<slug>/meta.json   original discussion name
    discussions/<slug>/log.ndjson  append-log, one committed batch per line
    followers/<slug>.json          {"account": ..., "ids": [...]}

A batch line is committed once its trailing newline is on disk; readers skip
a torn final line, so a crash mid-append never exposes partial data.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator
from urllib.parse import quote, unquote

from .errors import StorageIO, UnknownAccount, UnknownDiscussion
from .records import TweetBatch, TweetRecord, UserStub

log = logging.getLogger(__name__)


def normalize_key(name: str) -> str:
    key = name.strip().lower()
    if not key:
        raise ValueError("discussion key must be nonempty")
    return key


def _slug(key: str) -> str:
    return quote(key, safe="")


@dataclass
class StoreStats:
    discussions: int
    tweets_per_discussion: dict[str, int]
    follower_sets: dict[str, int]

    def to_json(self) -> dict:
        return {
            "discussions": self.discussions,
            "tweets_per_discussion": self.tweets_per_discussion,
            "follower_sets": self.follower_sets,
        }


class _DiscussionState:
    """Parsed view of one discussion's append-log."""

    def __init__(self):
        self.tweets: dict[str, TweetRecord] = {}
        self.users: dict[str, UserStub] = {}
        self.ref_tweets: dict[str, TweetRecord] = {}


class Store:
    """Filesystem-backed tweet and follower persistence."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._states: dict[str, _DiscussionState] = {}
        try:
            (self.root / "discussions").mkdir(parents=True, exist_ok=True)
            (self.root / "followers").mkdir(parents=True, exist_ok=True)
        except OSError as err:
            raise StorageIO(f"cannot create store root {self.root}: {err}") from err

    # -- tweets ---------------------------------------------------------------

    def _discussion_dir(self, key: str) -> Path:
        return self.root / "discussions" / _slug(key)

    def _load_state(self, key: str) -> _DiscussionState:
        key = normalize_key(key)
        if key in self._states:
            return self._states[key]
        state = _DiscussionState()
        log_path = self._discussion_dir(key) / "log.ndjson"
        if log_path.exists():
            try:
                data = log_path.read_bytes()
            except OSError as err:
                raise StorageIO(f"cannot read {log_path}: {err}") from err
            for line_no, line in enumerate(data.split(b"\n")[:-1], start=1):
                # a torn trailing line has no newline and is not in this list
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line.decode("utf-8"))
                except (ValueError, UnicodeDecodeError) as err:
                    raise StorageIO(
                        f"corrupted log line {line_no} in {log_path}: {err}"
                    ) from err
                for item in obj.get("tweets", ()):
                    rec = TweetRecord.from_json(item)
                    state.tweets.setdefault(rec.id, rec)
                for item in obj.get("users", ()):
                    stub = UserStub.from_json(item)
                    state.users[stub.id] = stub  # last write wins
                for item in obj.get("ref_tweets", ()):
                    rec = TweetRecord.from_json(item)
                    state.ref_tweets[rec.id] = rec
        self._states[key] = state
        return state

    def upsert_tweets(self, key: str, batch: TweetBatch) -> int:
        """Insert a batch once by tweet id; returns the number newly stored."""
        key = normalize_key(key)
        state = self._load_state(key)
        fresh = [t for t in batch.tweets if t.id not in state.tweets]
        line = {
            "tweets": [t.to_json() for t in fresh],
            "users": [u.to_json() for u in batch.users.values()],
            "ref_tweets": [t.to_json() for t in batch.ref_tweets.values()],
        }
        if batch.raw is not None:
            line["raw"] = batch.raw
        directory = self._discussion_dir(key)
        try:
            directory.mkdir(parents=True, exist_ok=True)
            meta = directory / "meta.json"
            if not meta.exists():
                meta.write_text(json.dumps({"name": key}), encoding="utf-8")
            with (directory / "log.ndjson").open("ab") as fh:
                fh.write(json.dumps(line, ensure_ascii=False).encode("utf-8") + b"\n")
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as err:
            raise StorageIO(f"cannot append to {directory}: {err}") from err
        for rec in fresh:
            state.tweets[rec.id] = rec
        state.users.update(batch.users)
        state.ref_tweets.update(batch.ref_tweets)
        return len(fresh)

    def sink(self, key: str):
        """A collection sink bound to one discussion."""
        return lambda batch: self.upsert_tweets(key, batch)

    def has_discussion(self, key: str) -> bool:
        key = normalize_key(key)
        return key in self._states or (self._discussion_dir(key) / "log.ndjson").exists()

    def newest_tweet_id(self, key: str) -> str | None:
        state = self._load_state(key)
        if not state.tweets:
            return None
        return max(state.tweets, key=int)

    def iter_tweets(self, key: str) -> Iterator[TweetRecord]:
        """Stored records ordered by created_at, ties broken by id."""
        state = self._load_state(key)
        yield from sorted(state.tweets.values(), key=lambda r: (r.created_at, int(r.id)))

    def users(self, key: str) -> dict[str, UserStub]:
        return dict(self._load_state(key).users)

    def referenced_tweets(self, key: str) -> dict[str, TweetRecord]:
        return dict(self._load_state(key).ref_tweets)

    def require_discussion(self, key: str) -> None:
        if not self.has_discussion(key):
            raise UnknownDiscussion(f"no stored discussion {key!r}")

    # -- followers ------------------------------------------------------------

    def _followers_path(self, account: str) -> Path:
        return self.root / "followers" / (_slug(account.strip().lower()) + ".json")

    def save_followers(self, account: str, ids) -> int:
        """Union `ids` into the stored set; returns the new total."""
        if not account.strip():
            raise ValueError("account must be nonempty")
        path = self._followers_path(account)
        existing: set[str] = set()
        if path.exists():
            existing = set(json.loads(path.read_text(encoding="utf-8"))["ids"])
        merged = existing | {str(i) for i in ids}
        payload = {"account": account.strip().lower(), "ids": sorted(merged, key=int)}
        tmp = path.with_suffix(".json.tmp")
        try:
            tmp.write_text(json.dumps(payload), encoding="utf-8")
            os.replace(tmp, path)
        except OSError as err:
            raise StorageIO(f"cannot write {path}: {err}") from err
        return len(merged)

    def load_followers(self, account: str) -> set[str]:
        path = self._followers_path(account)
        if not path.exists():
            raise UnknownAccount(f"no stored follower set for {account!r}")
        try:
            return set(json.loads(path.read_text(encoding="utf-8"))["ids"])
        except OSError as err:
            raise StorageIO(f"cannot read {path}: {err}") from err

    # -- export -----------------------------------------------------------------

    def export_pages(self, key: str, page_size: int = 100):
        """Stored discussion as search-response-shaped pages, oldest first.

        The output is a valid replay source: collecting it into a fresh store
        reproduces this discussion exactly. This is the supported way to get
        data out; the on-disk layout stays private.
        """
        self.require_discussion(key)
        records = list(self.iter_tweets(key))
        stubs = self.users(key)
        refs = self.referenced_tweets(key)
        pages = [records[i:i + page_size] for i in range(0, len(records), page_size)] or [[]]
        for page_no, chunk in enumerate(pages):
            users: dict[str, UserStub] = {}
            ref_tweets: dict[str, TweetRecord] = {}
            for rec in chunk:
                if rec.author_id in stubs:
                    users[rec.author_id] = stubs[rec.author_id]
                for uid, _ in rec.mentions:
                    if uid in stubs:
                        users[uid] = stubs[uid]
                for _, ref_id in rec.referenced:
                    ref = refs.get(ref_id)
                    if ref is not None:
                        ref_tweets[ref_id] = ref
                        if ref.author_id in stubs:
                            users[ref.author_id] = stubs[ref.author_id]
            page = {
                "data": [rec.to_api() for rec in chunk],
                "includes": {
                    "users": [users[uid].to_api() for uid in sorted(users, key=int)],
                    "tweets": [ref_tweets[tid].to_api() for tid in sorted(ref_tweets, key=int)],
                },
                "meta": {"result_count": len(chunk)},
            }
            if page_no + 1 < len(pages):
                page["meta"]["next_token"] = f"t{page_no + 1}"
            yield page

    # -- introspection ----------------------------------------------------------

    def discussions(self) -> list[str]:
        out = []
        for child in sorted((self.root / "discussions").iterdir()):
            if (child / "log.ndjson").exists():
                out.append(unquote(child.name))
        return out

    def follower_accounts(self) -> list[str]:
        return sorted(
            unquote(p.name[: -len(".json")])
            for p in (self.root / "followers").glob("*.json")
        )

    def stats(self) -> StoreStats:
        per_discussion = {}
        for key in self.discussions():
            per_discussion[key] = sum(1 for _ in self.iter_tweets(key))
        follower_sets = {a: len(self.load_followers(a)) for a in self.follower_accounts()}
        return StoreStats(
            discussions=len(per_discussion),
            tweets_per_discussion=per_discussion,
            follower_sets=follower_sets,
        )
