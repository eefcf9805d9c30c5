"""Versioned dictionary of drug-related hashtag terms.

A Lexicon is an immutable snapshot: seed terms come from the shipped
dictionary document, mined candidates enter as "pending", and a human
decision batch (accept / reject / ban) produces the next version.  The
full history is an append-only log from which any version can be
replayed bit-for-bit.
"""
from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

from .tags import is_valid_term_text

CATEGORIES = ("weed", "syrup", "pills", "general")
STATUSES = ("seed", "pending", "accepted", "rejected", "banned")
ACTIVE_STATUSES = frozenset({"seed", "accepted"})
VERDICTS = ("accept", "reject", "ban")
DEFAULT_SELFIE_TAGS = frozenset({"selfie", "weedselfie", "selfportrait", "selfy"})


class LexiconError(ValueError):
    pass


class SeedParseError(LexiconError):
    pass


class CurationError(LexiconError):
    pass


def _norm(text: str) -> str:
    return unicodedata.normalize("NFC", text).lower()


@dataclass(frozen=True)
class Term:
    text: str
    category: str = "general"
    status: str = "seed"
    support_at_proposal: float | None = None
    version_added: int = 1

    def __post_init__(self):
        if not is_valid_term_text(self.text):
            raise LexiconError(f"invalid term text: {self.text!r}")
        if self.category not in CATEGORIES:
            raise LexiconError(f"unknown category: {self.category!r}")
        if self.status not in STATUSES:
            raise LexiconError(f"unknown status: {self.status!r}")

    @property
    def active(self) -> bool:
        return self.status in ACTIVE_STATUSES


@dataclass(frozen=True)
class CurationDecision:
    term_text: str
    verdict: str
    category: str | None = None
    decided_at: int = 0
    actor: str = "curator"

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise CurationError(f"unknown verdict: {self.verdict!r}")
        if self.verdict == "accept":
            if self.category not in ("weed", "syrup", "pills", "general"):
                raise CurationError(f"accept requires a category: {self.term_text}")
        elif self.category is not None:
            raise CurationError(f"{self.verdict} forbids a category: {self.term_text}")


@dataclass(frozen=True)
class LogRecord:
    """One append-only history line: a mined proposal or a curation decision."""

    kind: str  # "propose" | "accept" | "reject" | "ban"
    term: str
    category: str | None = None
    support: float | None = None
    decided_at: int = 0
    actor: str = ""
    run_id: str | None = None
    batch: int | None = None  # lexicon version produced by a decision batch

    def to_json(self) -> str:
        doc = {"kind": self.kind, "term": self.term}
        if self.category is not None:
            doc["category"] = self.category
        if self.support is not None:
            doc["support"] = self.support
        doc["decided_at"] = self.decided_at
        doc["actor"] = self.actor
        if self.run_id is not None:
            doc["run_id"] = self.run_id
        if self.batch is not None:
            doc["batch"] = self.batch
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "LogRecord":
        doc = json.loads(line)
        return cls(
            kind=doc["kind"],
            term=doc["term"],
            category=doc.get("category"),
            support=doc.get("support"),
            decided_at=doc.get("decided_at", 0),
            actor=doc.get("actor", ""),
            run_id=doc.get("run_id"),
            batch=doc.get("batch"),
        )


@dataclass(frozen=True)
class Lexicon:
    version: int
    terms: Mapping[str, Term]
    selfie_tags: frozenset[str] = DEFAULT_SELFIE_TAGS
    log: tuple[LogRecord, ...] = ()

    def get(self, text: str) -> Term | None:
        return self.terms.get(_norm(text))

    def active_terms(self) -> dict[str, Term]:
        return {t: term for t, term in self.terms.items() if term.active}

    def pending_terms(self) -> list[Term]:
        pend = [t for t in self.terms.values() if t.status == "pending"]
        pend.sort(key=lambda t: (-(t.support_at_proposal or 0.0), t.text))
        return pend

    def with_pending(
        self,
        candidates: Sequence[Term],
        run_id: str | None = None,
        decided_at: int = 0,
        actor: str = "miner",
    ) -> "Lexicon":
        """Register mined candidates as pending terms (no version bump)."""
        terms = dict(self.terms)
        records = list(self.log)
        for cand in candidates:
            key = _norm(cand.text)
            if key in terms:
                continue
            term = replace(cand, text=key, status="pending", version_added=self.version)
            terms[key] = term
            records.append(
                LogRecord(
                    kind="propose",
                    term=key,
                    support=term.support_at_proposal,
                    decided_at=decided_at,
                    actor=actor,
                    run_id=run_id,
                )
            )
        return replace(self, terms=terms, log=tuple(records))


def load_seed(
    source: str | Path | IO[str] | Iterable[str],
    overlay: Mapping[str, str] | None = None,
) -> Lexicon:
    """Parse the seed dictionary document into a version-1 lexicon.

    Plain text, one term per line, '#' starts a comment.  Duplicate
    entries (the shipped document repeats e.g. "nodsquadd" and "gg249")
    collapse to a single term.  An overlay maps term text to a drug class;
    unlisted terms stay "general".
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    elif hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        lines = [str(line).rstrip("\n") for line in source]

    overlay = overlay or {}
    terms: dict[str, Term] = {}
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        normalized = _norm(text)
        if not is_valid_term_text(normalized):
            raise SeedParseError(f"line {lineno}: malformed term {raw!r}")
        if normalized in terms:
            continue
        category = overlay.get(normalized, "general")
        if category not in CATEGORIES:
            raise SeedParseError(f"line {lineno}: unknown category {category!r}")
        terms[normalized] = Term(text=normalized, category=category, status="seed")
    if not terms:
        raise SeedParseError("seed document contains no terms")
    return Lexicon(version=1, terms=terms)


def load_overlay(source: str | Path | IO[str] | Iterable[str]) -> dict[str, str]:
    """Parse the category overlay: lines of "term<TAB>category"."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    elif hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        lines = list(source)
    overlay: dict[str, str] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise SeedParseError(f"line {lineno}: expected term<TAB>category, got {raw!r}")
        term, category = _norm(parts[0].strip()), parts[1].strip()
        if category not in CATEGORIES:
            raise SeedParseError(f"line {lineno}: unknown category {category!r}")
        overlay[term] = category
    return overlay


def packaged_seed_path() -> Path:
    return Path(str(resources.files("hashmine").joinpath("data/seed_terms.txt")))


def packaged_overlay_path() -> Path:
    return Path(str(resources.files("hashmine").joinpath("data/categories.tsv")))


def load_packaged_seed() -> Lexicon:
    """The shipped seed dictionary with its category overlay applied."""
    return load_seed(packaged_seed_path(), overlay=load_overlay(packaged_overlay_path()))


def match_terms(hashtags: Iterable[str], lexicon: Lexicon) -> set[Term]:
    """Exact, case-insensitive match of hashtags against active terms."""
    matched: set[Term] = set()
    for tag in hashtags:
        term = lexicon.terms.get(_norm(tag))
        if term is not None and term.active:
            matched.add(term)
    return matched


def propose_candidates(itemsets, min_support: float, lexicon: Lexicon) -> list[Term]:
    """Turn frequent itemsets into pending term candidates.

    Every hashtag that appears in an itemset at or above min_support and
    is absent from the lexicon (any status, so rejected and banned terms
    never resurface) becomes one pending Term carrying the highest support
    among the qualifying itemsets that contain it.
    """
    if not 0 < min_support <= 1:
        raise LexiconError(f"min_support must be in (0, 1]: {min_support}")
    best: dict[str, float] = {}
    for itemset in itemsets:
        support = float(itemset.support)
        if support < min_support:
            continue
        for item in itemset.items:
            key = _norm(item)
            if key in lexicon.terms:
                continue
            if not is_valid_term_text(key):
                continue
            if support > best.get(key, -1.0):
                best[key] = support
    candidates = [
        Term(text=text, category="general", status="pending",
             support_at_proposal=support, version_added=lexicon.version)
        for text, support in best.items()
    ]
    candidates.sort(key=lambda t: (-t.support_at_proposal, t.text))
    return candidates


def apply_decisions(decisions: Sequence[CurationDecision], lexicon: Lexicon) -> Lexicon:
    """Apply one curation batch atomically, producing the next version.

    Every decision must target a pending term; otherwise the whole batch
    is rejected and the lexicon is unchanged.  An empty batch is a no-op
    (no version bump).
    """
    if not decisions:
        return lexicon
    seen: set[str] = set()
    for dec in decisions:
        key = _norm(dec.term_text)
        term = lexicon.terms.get(key)
        if term is None:
            raise CurationError(f"decision on unknown term: {dec.term_text!r}")
        if term.status != "pending":
            raise CurationError(
                f"decision on non-pending term {dec.term_text!r} (status={term.status})"
            )
        if key in seen:
            raise CurationError(f"duplicate decision in batch: {dec.term_text!r}")
        seen.add(key)

    new_version = lexicon.version + 1
    terms = dict(lexicon.terms)
    records = list(lexicon.log)
    for dec in decisions:
        key = _norm(dec.term_text)
        term = terms[key]
        if dec.verdict == "accept":
            terms[key] = replace(
                term, status="accepted", category=dec.category, version_added=new_version
            )
        else:
            status = "rejected" if dec.verdict == "reject" else "banned"
            terms[key] = replace(term, status=status, version_added=new_version)
        records.append(
            LogRecord(
                kind=dec.verdict,
                term=key,
                category=dec.category,
                support=term.support_at_proposal,
                decided_at=dec.decided_at,
                actor=dec.actor,
                batch=new_version,
            )
        )
    return replace(lexicon, version=new_version, terms=terms, log=tuple(records))


def replay(seed: Lexicon, records: Iterable[LogRecord]) -> Lexicon:
    """Rebuild the current lexicon from the seed plus the append-only log.

    Decision records sharing a batch number are applied as one version
    bump, so replay reproduces the original version sequence exactly.
    """
    lexicon = seed
    batch: list[CurationDecision] = []
    batch_id: int | None = None

    def flush():
        nonlocal lexicon, batch, batch_id
        if batch:
            lexicon = apply_decisions(batch, lexicon)
            batch = []
        batch_id = None

    for rec in records:
        if rec.kind == "propose":
            flush()
            lexicon = lexicon.with_pending(
                [
                    Term(
                        text=rec.term,
                        status="pending",
                        support_at_proposal=rec.support,
                        version_added=lexicon.version,
                    )
                ],
                run_id=rec.run_id,
                decided_at=rec.decided_at,
                actor=rec.actor,
            )
        else:
            if batch and rec.batch != batch_id:
                flush()
            batch_id = rec.batch
            batch.append(
                CurationDecision(
                    term_text=rec.term,
                    verdict=rec.kind,
                    category=rec.category if rec.kind == "accept" else None,
                    decided_at=rec.decided_at,
                    actor=rec.actor,
                )
            )
    flush()
    return lexicon


def write_log(records: Iterable[LogRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")


def read_log(path: str | Path) -> list[LogRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(LogRecord.from_json(line))
    return records
