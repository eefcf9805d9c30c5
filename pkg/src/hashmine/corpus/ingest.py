"""JSONL corpus ingestion: skip-and-count for dirty records, keep-first dedup."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import IO, Iterable

from .model import Corpus, IngestReport, Post, post_from_json, post_to_json

log = logging.getLogger(__name__)


def _iter_lines(source) -> Iterable[str]:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            yield from fh
    else:
        yield from source


def ingest(source: str | Path | IO[str] | Iterable[str]) -> tuple[Corpus, IngestReport]:
    """Build a corpus from a stream of post documents.

    Duplicate media ids keep the first occurrence; malformed documents are
    counted and skipped, never aborting the stream.
    """
    read = kept = dup_dropped = malformed = 0
    posts: list[Post] = []
    seen: set[str] = set()
    for line in _iter_lines(source):
        line = line.strip()
        if not line:
            continue
        read += 1
        try:
            post = post_from_json(line)
        except Exception as exc:
            malformed += 1
            log.debug("skipping malformed document: %s", exc)
            continue
        if post.media_id in seen:
            dup_dropped += 1
            continue
        seen.add(post.media_id)
        posts.append(post)
        kept += 1
    report = IngestReport(read=read, kept=kept, dup_dropped=dup_dropped, malformed=malformed)
    return Corpus(posts), report


def write_corpus(corpus: Corpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for post in corpus:
            fh.write(post_to_json(post) + "\n")


def corpus_lines(corpus: Corpus) -> list[str]:
    return [post_to_json(post) for post in corpus]
