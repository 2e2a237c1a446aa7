"""Collection runs: pagination, retry with back-off, exactly-once delivery."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .errors import SourceExhaustedRetries
from .records import CollectionReport, TweetBatch, snowflake_warnings
from .sources import TransientFault, TweetSource

log = logging.getLogger(__name__)

# sink receives one page worth of records; returns how many were newly stored
# (None means "all of them", for sinks that do not track duplicates)
Sink = Callable[[TweetBatch], int | None]


@dataclass
class RetryPolicy:
    """Bounded exponential back-off; honors retry-after when the source has one."""

    max_retries: int = 5
    base_delay: float = 1.0
    max_delay: float = 60.0
    sleep: Callable[[float], None] = field(default=time.sleep)

    def delay(self, attempt: int, retry_after: float | None) -> float:
        if retry_after is not None:
            return min(retry_after, self.max_delay)
        return min(self.base_delay * (2 ** attempt), self.max_delay)


def _fetch_with_retry(fetch: Callable, retry: RetryPolicy, counter: list[int]):
    attempt = 0
    while True:
        try:
            return fetch()
        except TransientFault as fault:
            if attempt >= retry.max_retries:
                raise SourceExhaustedRetries(
                    f"gave up after {attempt} retries: {fault.reason}"
                ) from fault
            delay = retry.delay(attempt, fault.retry_after)
            log.warning("transient fault (%s); retry %d in %.1fs", fault.reason, attempt + 1, delay)
            retry.sleep(delay)
            attempt += 1
            counter[0] += 1


def search_tweets(
    source: TweetSource,
    query: str,
    since_id: str | None = None,
    sink: Sink | None = None,
    retry: RetryPolicy | None = None,
) -> CollectionReport:
    """Fetch every tweet matching `query` newer than `since_id` into `sink`.

    Pagination is followed to exhaustion; each page is delivered exactly once
    even when the fetch needed retries, because a failed fetch never yields a
    partial page.
    """
    if not query:
        raise ValueError("query must be nonempty")
    retry = retry or RetryPolicy()
    report = CollectionReport(discussion=query, resumed_from_id=since_id)
    retries = [0]
    floor = int(since_id) if since_id else None
    token: str | None = None
    while True:
        page = _fetch_with_retry(
            lambda: source.fetch_search_page(query, since_id, token), retry, retries
        )
        batch = page.batch
        if floor is not None:
            batch.tweets = [t for t in batch.tweets if int(t.id) > floor]
        for warning in snowflake_warnings(batch.tweets):
            log.warning("%s", warning)
        if batch.tweets:
            report.fetched += len(batch.tweets)
            stored = len(batch.tweets)
            if sink is not None:
                result = sink(batch)
                if result is not None:
                    stored = result
            report.stored_new += stored
        if page.next_token is None:
            break
        token = page.next_token
    report.duplicates = report.fetched - report.stored_new
    report.retries = retries[0]
    return report


def get_followers(
    source: TweetSource,
    account: str,
    retry: RetryPolicy | None = None,
) -> Iterator[str]:
    """Stream the follower ids of `account`, with the same retry semantics."""
    if not account:
        raise ValueError("account must be nonempty")
    retry = retry or RetryPolicy()
    retries = [0]
    token: str | None = None
    while True:
        page = _fetch_with_retry(
            lambda: source.fetch_follower_page(account, token), retry, retries
        )
        for stub in page.users:
            yield stub.id
        if page.next_token is None:
            return
        token = page.next_token
