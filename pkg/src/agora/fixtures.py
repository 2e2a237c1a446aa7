"""Synthetic two-community discussion fixtures for desk-scale runs.

Produces a tweets replay file, a followers replay file for the two seed
accounts, and a manifest. Interaction targets stay within the author's side
with probability 1 - p_cross and cross over with probability p_cross, so
p_cross = 0 yields two disconnected camps and p_cross = 0.5 a well-mixed
discussion. Output is a pure function of the parameters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .records import format_timestamp

SEED_ACCOUNTS = ("seed_a", "seed_b")
PAGE_SIZE = 100

_START = datetime(2023, 1, 1, tzinfo=timezone.utc)
_TWEET_ID_BASE = 1_100_000_000_000

# tweet category mix: original, retweet, quote, reply, mention-only
_CATEGORIES = ("original", "retweet", "quote", "reply", "mention")
_CATEGORY_P = (0.12, 0.62, 0.08, 0.10, 0.08)


@dataclass(frozen=True)
class FixtureSpec:
    users: int = 40
    per_side: int | None = None  # seed followers per side; default: whole side
    p_cross: float = 0.1
    tweets: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.users < 2:
            raise ValueError("need at least 2 users")
        if not 0.0 <= self.p_cross <= 1.0:
            raise ValueError("p_cross must be in [0, 1]")
        if self.tweets < 1:
            raise ValueError("need at least 1 tweet")


def _user_obj(uid: str, username: str, name: str, followers: int) -> dict:
    return {
        "id": uid,
        "username": username,
        "name": name,
        "public_metrics": {"followers_count": followers},
    }


def generate_fixture(spec: FixtureSpec, out_dir: str | Path) -> dict:
    """Write tweets.ndjson, followers.ndjson, and manifest.json into `out_dir`."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)

    side_size = [(spec.users + 1) // 2, spec.users // 2]
    sides: list[list[dict]] = []
    for side, prefix, base in ((0, "a", 100000), (1, "b", 200000)):
        members = []
        for i in range(side_size[side]):
            uid = str(base + i + 1)
            username = f"{prefix}_user_{i + 1:03d}"
            members.append(
                _user_obj(uid, username, username.replace("_", " ").title(),
                          int(rng.integers(0, 5000)))
            )
        sides.append(members)
    user_by_id = {u["id"]: u for side in sides for u in side}

    per_side = spec.per_side if spec.per_side is not None else max(side_size)
    follower_ids: list[list[str]] = []
    for side in (0, 1):
        count = min(per_side, len(sides[side]))
        chosen = rng.choice(len(sides[side]), size=count, replace=False)
        follower_ids.append(sorted(sides[side][i]["id"] for i in chosen))

    tweets: list[dict] = []
    by_side_tweets: list[list[int]] = [[], []]  # indices into `tweets`

    def side_of(uid: str) -> int:
        return 0 if int(uid) < 200000 else 1

    for i in range(spec.tweets):
        author_side = int(rng.integers(0, 2)) if side_size[1] else 0
        author = sides[author_side][int(rng.integers(0, len(sides[author_side])))]
        tweet_id = str(_TWEET_ID_BASE + i)
        created = format_timestamp(_START + timedelta(seconds=i))
        category = _CATEGORIES[int(rng.choice(len(_CATEGORIES), p=_CATEGORY_P))]

        target_side = author_side
        if rng.random() < spec.p_cross:
            target_side = 1 - author_side
        if not sides[target_side]:
            target_side = author_side

        obj: dict = {
            "id": tweet_id,
            "author_id": author["id"],
            "created_at": created,
            "lang": "en",
        }
        pool = by_side_tweets[target_side]
        if category in ("retweet", "quote", "reply") and pool:
            ref = tweets[pool[int(rng.integers(0, len(pool)))]]
            if ref["author_id"] == author["id"]:
                category = "original"  # no self-interactions in the fixture
        elif category in ("retweet", "quote", "reply"):
            category = "original"

        if category == "retweet":
            ref_user = user_by_id[ref["author_id"]]
            obj["text"] = f"RT @{ref_user['username']}: {ref['text'][:80]}"
            obj["referenced_tweets"] = [{"type": "retweeted", "id": ref["id"]}]
            obj["entities"] = {
                "mentions": [{"id": ref_user["id"], "username": ref_user["username"]}]
            }
        elif category == "quote":
            obj["text"] = f"adding context to this take #{i}"
            obj["referenced_tweets"] = [{"type": "quoted", "id": ref["id"]}]
        elif category == "reply":
            obj["text"] = f"disagree, see point {i}"
            obj["referenced_tweets"] = [{"type": "replied_to", "id": ref["id"]}]
            obj["in_reply_to_user_id"] = ref["author_id"]
        elif category == "mention":
            others = [u for u in sides[target_side] if u["id"] != author["id"]]
            if others:
                target = others[int(rng.integers(0, len(others)))]
                obj["text"] = f"talking to @{target['username']} about topic {i}"
                obj["entities"] = {
                    "mentions": [{"id": target["id"], "username": target["username"]}]
                }
            else:
                obj["text"] = f"thought number {i}"
        else:
            obj["text"] = f"original take number {i} on the topic"

        tweets.append(obj)
        by_side_tweets[side_of(author["id"])].append(i)

    tweets_path = out_dir / "tweets.ndjson"
    with tweets_path.open("w", encoding="utf-8") as fh:
        for start in range(0, len(tweets), PAGE_SIZE):
            chunk = tweets[start:start + PAGE_SIZE]
            include_users: dict[str, dict] = {}
            include_tweets: dict[str, dict] = {}
            for obj in chunk:
                include_users[obj["author_id"]] = user_by_id[obj["author_id"]]
                for m in obj.get("entities", {}).get("mentions", ()):
                    include_users[m["id"]] = user_by_id[m["id"]]
                for ref in obj.get("referenced_tweets", ()):
                    ref_obj = tweets[int(ref["id"]) - _TWEET_ID_BASE]
                    include_tweets[ref["id"]] = ref_obj
                    include_users[ref_obj["author_id"]] = user_by_id[ref_obj["author_id"]]
            page_no = start // PAGE_SIZE
            last = start + PAGE_SIZE >= len(tweets)
            page = {
                "data": chunk,
                "includes": {
                    "users": sorted(include_users.values(), key=lambda u: int(u["id"])),
                    "tweets": sorted(include_tweets.values(), key=lambda t: int(t["id"])),
                },
                "meta": {"result_count": len(chunk)},
            }
            if not last:
                page["meta"]["next_token"] = f"t{page_no + 1}"
            fh.write(json.dumps(page, ensure_ascii=False) + "\n")

    followers_path = out_dir / "followers.ndjson"
    with followers_path.open("w", encoding="utf-8") as fh:
        for side, account in enumerate(SEED_ACCOUNTS):
            ids = follower_ids[side]
            pages = [ids[i:i + PAGE_SIZE] for i in range(0, len(ids), PAGE_SIZE)] or [[]]
            for page_no, chunk in enumerate(pages):
                page = {
                    "data": [user_by_id[uid] for uid in chunk],
                    "meta": {"result_count": len(chunk)},
                    "account": account,
                }
                if page_no + 1 < len(pages):
                    page["meta"]["next_token"] = f"f{page_no + 1}"
                fh.write(json.dumps(page, ensure_ascii=False) + "\n")

    manifest = {
        "users": spec.users,
        "per_side": per_side,
        "p_cross": spec.p_cross,
        "tweets": spec.tweets,
        "seed": spec.seed,
        "seeds": list(SEED_ACCOUNTS),
        "authors": sorted({t["author_id"] for t in tweets}, key=int),
        "files": {"tweets": tweets_path.name, "followers": followers_path.name},
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    return manifest
