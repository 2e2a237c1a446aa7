"""Tweet and follower sources: live HTTP client and NDJSON replay.

Both expose the same single-page fetch surface; the retry loop lives in
:mod:`agora.collect` so replayed faults and live faults take the same path.

Replay files are NDJSON: each line is one search-response page object
(``data`` / ``includes`` / ``meta.next_token``, field names bit-exact with the
public v2 search response). Follower pages additionally carry a top-level
``account`` key scoping them to a seed account. Lines of the form
``{"fault": "429@2"}`` are harness directives, not pages: they inject one
transient failure (``429``/``500``/``503``/``reset``) before the 1-based page
index, with an optional retry-after suffix (``"429@2:1"``). The directive
``kill@N`` terminates the process abruptly to simulate a mid-run crash.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Protocol

import requests

from .errors import AuthError, FileMissing, MalformedLine, QuerySyntaxError, UnknownAccount
from .records import TweetBatch, UserStub, parse_follower_page, parse_search_page

log = logging.getLogger(__name__)

DEFAULT_PAGE_SIZE = 100

TWEET_FIELDS = "created_at,author_id,referenced_tweets,in_reply_to_user_id,entities,lang"
USER_FIELDS = "username,name,public_metrics"
SEARCH_EXPANSIONS = "author_id,referenced_tweets.id,referenced_tweets.id.author_id"


class TransientFault(Exception):
    """Recoverable fetch failure (429/5xx/connection reset)."""

    def __init__(self, reason: str, retry_after: float | None = None):
        self.reason = reason
        self.retry_after = retry_after
        super().__init__(reason)


@dataclass
class SearchPage:
    batch: TweetBatch
    next_token: str | None


@dataclass
class FollowerPage:
    users: list[UserStub]
    next_token: str | None


class TweetSource(Protocol):
    """One-page-at-a-time fetch surface shared by live and replay sources."""

    def fetch_search_page(
        self, query: str, since_id: str | None, next_token: str | None
    ) -> SearchPage: ...

    def fetch_follower_page(self, account: str, next_token: str | None) -> FollowerPage: ...


# -- replay ------------------------------------------------------------------


@dataclass
class _Fault:
    kind: str  # "429", "500", "503", "reset", "kill"
    page: int  # 1-based page index the fault precedes
    retry_after: float | None = None
    fired: bool = False


def _parse_fault(directive: str, line_no: int) -> _Fault:
    head, sep, rest = directive.partition("@")
    if not sep:
        raise MalformedLine(line_no, f"bad fault directive {directive!r}")
    page_part, _, after_part = rest.partition(":")
    try:
        page = int(page_part)
        retry_after = float(after_part) if after_part else None
    except ValueError:
        raise MalformedLine(line_no, f"bad fault directive {directive!r}") from None
    if head not in ("429", "500", "503", "reset", "kill"):
        raise MalformedLine(line_no, f"unsupported fault kind {head!r}")
    return _Fault(kind=head, page=page, retry_after=retry_after)


class ReplaySource:
    """Replays captured pages from an NDJSON file in file order."""

    def __init__(self, search_pages, follower_pages, faults):
        self._search = search_pages  # list[TweetBatch-producing dicts]
        self._followers = follower_pages  # account -> list[dict]
        self._faults = faults
        self._served = 0  # count of successful page serves, for fault indexing

    def _maybe_fault(self) -> None:
        page_index = self._served + 1
        for fault in self._faults:
            if fault.fired or fault.page != page_index:
                continue
            fault.fired = True
            if fault.kind == "kill":
                log.error("replay fault: killing process before page %d", page_index)
                os._exit(137)
            if fault.kind == "reset":
                raise TransientFault("connection reset (injected)")
            raise TransientFault(
                f"HTTP {fault.kind} (injected)", retry_after=fault.retry_after
            )

    def fetch_search_page(
        self, query: str, since_id: str | None, next_token: str | None
    ) -> SearchPage:
        index = int(next_token) if next_token else 0
        if index >= len(self._search):
            return SearchPage(batch=TweetBatch(raw={}), next_token=None)
        self._maybe_fault()
        self._served += 1
        batch = parse_search_page(self._search[index])
        more = index + 1 < len(self._search)
        return SearchPage(batch=batch, next_token=str(index + 1) if more else None)

    def fetch_follower_page(self, account: str, next_token: str | None) -> FollowerPage:
        pages = self._followers.get(account.lower())
        if pages is None:
            raise UnknownAccount(f"no follower pages for {account!r} in replay file")
        index = int(next_token) if next_token else 0
        if index >= len(pages):
            return FollowerPage(users=[], next_token=None)
        self._maybe_fault()
        self._served += 1
        users = parse_follower_page(pages[index])
        more = index + 1 < len(pages)
        return FollowerPage(users=users, next_token=str(index + 1) if more else None)


def open_replay(path: str | Path, faults: str | None = None) -> ReplaySource:
    """Open an NDJSON replay file; validates every line eagerly.

    `faults` adds directives beyond those embedded in the file, same syntax.
    """
    path = Path(path)
    if not path.exists():
        raise FileMissing(f"replay file not found: {path}")
    search_pages: list[dict] = []
    follower_pages: dict[str, list[dict]] = {}
    fault_list: list[_Fault] = []
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as err:
                raise MalformedLine(line_no, str(err)) from err
            if not isinstance(obj, dict):
                raise MalformedLine(line_no, "page must be a JSON object")
            if set(obj) == {"fault"}:
                fault_list.append(_parse_fault(obj["fault"], line_no))
                continue
            try:
                if "account" in obj:
                    parse_follower_page(obj)
                    follower_pages.setdefault(str(obj["account"]).lower(), []).append(obj)
                else:
                    parse_search_page(obj)
                    search_pages.append(obj)
            except (ValueError, TypeError, KeyError) as err:
                raise MalformedLine(line_no, str(err)) from err
    for directive in (faults or "").split(","):
        directive = directive.strip()
        if directive:
            fault_list.append(_parse_fault(directive, 0))
    return ReplaySource(search_pages, follower_pages, fault_list)


# -- live HTTP ---------------------------------------------------------------


@dataclass
class HttpTweetSource:
    """Client for the remote search/followers endpoints.

    Maps HTTP semantics onto the shared fetch surface: 401/403 raise
    :class:`AuthError`, 429/5xx and connection failures raise
    :class:`TransientFault` (with the retry-after header when present), other
    4xx raise :class:`QuerySyntaxError` or :class:`UnknownAccount`.
    """

    base_url: str
    token: str
    page_size: int = DEFAULT_PAGE_SIZE
    timeout: float = 30.0
    session: requests.Session = field(default_factory=requests.Session)

    def __post_init__(self):
        if not self.token:
            raise AuthError("no bearer token configured")
        self.base_url = self.base_url.rstrip("/")
        self._user_ids: dict[str, str] = {}

    def _get(self, path: str, params: dict[str, Any]) -> dict[str, Any]:
        url = f"{self.base_url}{path}"
        headers = {"Authorization": f"Bearer {self.token}"}
        try:
            resp = self.session.get(url, params=params, headers=headers, timeout=self.timeout)
        except requests.RequestException as err:
            raise TransientFault(f"connection failure: {err}") from err
        if resp.status_code in (401, 403):
            raise AuthError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        if resp.status_code == 429 or resp.status_code >= 500:
            retry_after = None
            header = resp.headers.get("retry-after")
            if header:
                try:
                    retry_after = float(header)
                except ValueError:
                    retry_after = None
            raise TransientFault(f"HTTP {resp.status_code}", retry_after=retry_after)
        if resp.status_code == 404:
            raise UnknownAccount(f"HTTP 404: {resp.text[:200]}")
        if resp.status_code >= 400:
            raise QuerySyntaxError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()
        except ValueError as err:
            # a 200 with a garbage body is treated as transient: bounded
            # retries surface a persistent server bug as exhausted retries
            raise TransientFault(f"malformed response body: {err}") from err

    def fetch_search_page(
        self, query: str, since_id: str | None, next_token: str | None
    ) -> SearchPage:
        params: dict[str, Any] = {
            "query": query,
            "max_results": self.page_size,
            "tweet.fields": TWEET_FIELDS,
            "user.fields": USER_FIELDS,
            "expansions": SEARCH_EXPANSIONS,
        }
        if since_id:
            params["since_id"] = since_id
        if next_token:
            params["next_token"] = next_token
        obj = self._get("/2/tweets/search/recent", params)
        batch = parse_search_page(obj)
        return SearchPage(batch=batch, next_token=(obj.get("meta") or {}).get("next_token"))

    def _resolve_user_id(self, account: str) -> str:
        key = account.lower()
        if key not in self._user_ids:
            obj = self._get(f"/2/users/by/username/{account}", {"user.fields": USER_FIELDS})
            data = obj.get("data") or {}
            if not data.get("id"):
                raise UnknownAccount(f"no such account: {account}")
            self._user_ids[key] = data["id"]
        return self._user_ids[key]

    def fetch_follower_page(self, account: str, next_token: str | None) -> FollowerPage:
        user_id = self._resolve_user_id(account)
        params: dict[str, Any] = {
            "max_results": min(self.page_size * 10, 1000),
            "user.fields": USER_FIELDS,
        }
        if next_token:
            params["pagination_token"] = next_token
        obj = self._get(f"/2/users/{user_id}/followers", params)
        users = parse_follower_page(obj)
        return FollowerPage(users=users, next_token=(obj.get("meta") or {}).get("next_token"))
