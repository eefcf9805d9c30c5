"""Paged source adapters with a strict rolling-hour request budget.

The live tag-search endpoints this pipeline was shaped around are gone;
any paged source (file replay, synthetic fixture) plugs in through the
SourceAdapter protocol.  The budget guarantee is strict: never more than
`per_hour` requests in ANY rolling hour, which a classic burst-refill
token bucket does not give, so the limiter keeps a sliding window log.
"""
from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Protocol

from .model import Post

log = logging.getLogger(__name__)

HOUR = 3600.0


class SourceError(RuntimeError):
    pass


@dataclass(frozen=True)
class SourcePage:
    posts: tuple[Post, ...]
    next_cursor: str | None = None


class SourceAdapter(Protocol):
    def fetch(self, cursor: str | None) -> SourcePage: ...


class Clock(Protocol):
    def now(self) -> float: ...

    def sleep(self, seconds: float) -> None: ...


class SystemClock:
    def now(self) -> float:
        return time.monotonic()

    def sleep(self, seconds: float) -> None:
        time.sleep(seconds)


class SimClock:
    """Manually advanced clock for deterministic budget tests."""

    def __init__(self, start: float = 0.0):
        self._t = start

    def now(self) -> float:
        return self._t

    def sleep(self, seconds: float) -> None:
        self._t += max(0.0, seconds)


class RequestBudget:
    """Sliding-window limiter: at most per_hour acquisitions per rolling hour."""

    def __init__(self, per_hour: int, clock: Clock | None = None):
        if per_hour <= 0:
            raise ValueError("budget must be positive")
        self.per_hour = per_hour
        self.clock = clock or SystemClock()
        self._stamps: deque[float] = deque()

    def acquire(self) -> float:
        now = self.clock.now()
        while self._stamps and now - self._stamps[0] >= HOUR:
            self._stamps.popleft()
        if len(self._stamps) >= self.per_hour:
            wake = self._stamps[0] + HOUR
            self.clock.sleep(wake - now)
            now = self.clock.now()
            while self._stamps and now - self._stamps[0] >= HOUR:
                self._stamps.popleft()
        self._stamps.append(now)
        return now


def fetch_all(
    adapter: SourceAdapter,
    budget: int,
    clock: Clock | None = None,
    max_retries: int = 5,
    backoff_base: float = 1.0,
) -> Iterator[Post]:
    """Drain an adapter's cursor chain under the rolling-hour budget.

    Adapter failures are retried with exponential backoff up to
    max_retries per page, then surfaced as SourceError.  Posts are yielded
    in page order; a repeated cursor (a broken chain) is an error.
    """
    clock = clock or SystemClock()
    limiter = RequestBudget(budget, clock)
    cursor: str | None = None
    seen_cursors: set[str] = set()
    while True:
        page = None
        for attempt in range(max_retries + 1):
            limiter.acquire()
            try:
                page = adapter.fetch(cursor)
                break
            except Exception as exc:
                if attempt == max_retries:
                    raise SourceError(
                        f"adapter failed after {max_retries} retries at cursor {cursor!r}"
                    ) from exc
                delay = backoff_base * (2**attempt)
                log.warning(
                    "retry %d for cursor %r after error: %s", attempt + 1, cursor, exc
                )
                clock.sleep(delay)
        assert page is not None
        yield from page.posts
        if page.next_cursor is None:
            return
        if page.next_cursor in seen_cursors:
            raise SourceError(f"cursor chain repeats cursor {page.next_cursor!r}")
        seen_cursors.add(page.next_cursor)
        cursor = page.next_cursor


class ListAdapter:
    """Replay a fixed list of pages; optionally fail the first N fetches."""

    def __init__(self, pages: list[SourcePage], fail_first: int = 0):
        self._pages = {None: pages[0]} if pages else {}
        for i, page in enumerate(pages[:-1]):
            if page.next_cursor is None:
                raise ValueError("non-final page missing next_cursor")
            self._pages[page.next_cursor] = pages[i + 1]
        self.fetch_count = 0
        self._failures_left = fail_first

    def fetch(self, cursor: str | None) -> SourcePage:
        self.fetch_count += 1
        if self._failures_left > 0:
            self._failures_left -= 1
            raise ConnectionError("simulated fetch failure")
        if cursor not in self._pages:
            raise KeyError(f"unknown cursor: {cursor!r}")
        return self._pages[cursor]


def pages_from_posts(posts: list[Post], page_size: int) -> list[SourcePage]:
    """Chunk posts into a cursor chain, mostly for fixtures and tests."""
    if page_size <= 0:
        raise ValueError("page_size must be positive")
    chunks = [posts[i : i + page_size] for i in range(0, len(posts), page_size)] or [[]]
    pages = []
    for i, chunk in enumerate(chunks):
        nxt = f"c{i + 1}" if i + 1 < len(chunks) else None
        pages.append(SourcePage(posts=tuple(chunk), next_cursor=nxt))
    return pages
