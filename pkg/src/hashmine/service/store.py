"""Directory-backed persistence for lexicon history, corpora and runs.

Everything is plain JSON/JSONL in a directory-per-run layout so every
pipeline artifact can be inspected and diffed; there is no database.
Mutations (curation decisions, proposals, request ledger) go through one
lock: single writer, many readers.
"""
from __future__ import annotations

import hashlib
import json
import shutil
import threading
from pathlib import Path
from typing import Sequence

from ..lexicon import (
    CurationDecision,
    Lexicon,
    LogRecord,
    Term,
    apply_decisions,
    load_overlay,
    load_seed,
    packaged_overlay_path,
    packaged_seed_path,
    read_log,
    replay,
)


class StoreError(RuntimeError):
    pass


class Store:
    def __init__(
        self,
        root: str | Path,
        seed_path: str | Path | None = None,
        overlay_path: str | Path | None = None,
    ):
        self.root = Path(root)
        self._lock = threading.RLock()
        for sub in ("lexicon", "corpora", "runs", "candidates"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)

        seed_dst = self.root / "lexicon" / "seed_terms.txt"
        overlay_dst = self.root / "lexicon" / "categories.tsv"
        if not seed_dst.exists():
            shutil.copyfile(seed_path or packaged_seed_path(), seed_dst)
        if not overlay_dst.exists():
            shutil.copyfile(overlay_path or packaged_overlay_path(), overlay_dst)
        self._log_path = self.root / "lexicon" / "log.jsonl"
        self._requests_path = self.root / "requests.jsonl"
        self._seed = load_seed(seed_dst, overlay=load_overlay(overlay_dst))
        self._lexicon = self._load_lexicon()
        self._requests = self._load_requests()

    # ------------------------------------------------------------------
    # lexicon

    def _load_lexicon(self) -> Lexicon:
        if self._log_path.exists():
            return replay(self._seed, read_log(self._log_path))
        return self._seed

    def lexicon(self) -> Lexicon:
        with self._lock:
            return self._lexicon

    def _append_log(self, records: Sequence[LogRecord]) -> None:
        with open(self._log_path, "a", encoding="utf-8") as fh:
            for rec in records:
                fh.write(rec.to_json() + "\n")

    def add_pending(
        self, candidates: Sequence[Term], run_id: str | None = None, decided_at: int = 0
    ) -> list[Term]:
        """Register mined candidates; terms already housed are skipped."""
        with self._lock:
            before = len(self._lexicon.log)
            updated = self._lexicon.with_pending(
                candidates, run_id=run_id, decided_at=decided_at
            )
            new_records = updated.log[before:]
            self._append_log(new_records)
            self._lexicon = updated
            return [self._lexicon.terms[r.term] for r in new_records]

    def decide(self, decisions: Sequence[CurationDecision]) -> Lexicon:
        """Apply one curation batch atomically and persist it."""
        with self._lock:
            before = len(self._lexicon.log)
            updated = apply_decisions(decisions, self._lexicon)
            self._append_log(updated.log[before:])
            self._lexicon = updated
            for dec in decisions:
                card = self.root / "candidates" / f"{dec.term_text}.json"
                if card.exists():
                    card.unlink()
            return updated

    # ------------------------------------------------------------------
    # candidate cards (review-queue context for the console)

    def write_candidate_card(self, card: dict) -> None:
        path = self.root / "candidates" / f"{card['term']}.json"
        path.write_text(json.dumps(card, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    def candidate_card(self, term: str) -> dict | None:
        path = self.root / "candidates" / f"{term}.json"
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def candidate_cards(self) -> list[dict]:
        """Cards for currently pending terms, queue-ordered (support desc)."""
        cards = []
        for term in self.lexicon().pending_terms():
            card = self.candidate_card(term.text)
            if card is None:
                card = {
                    "term": term.text,
                    "support": term.support_at_proposal,
                    "run_id": None,
                    "cooccurring": [],
                    "samples": [],
                }
            cards.append(card)
        return cards

    # ------------------------------------------------------------------
    # corpora

    def register_corpus(self, source: str | Path, corpus_id: str | None = None) -> str:
        source = Path(source)
        if not source.exists():
            raise StoreError(f"corpus file not found: {source}")
        corpus_id = corpus_id or source.stem
        dst = self.root / "corpora" / f"{corpus_id}.jsonl"
        if source.resolve() != dst.resolve():
            shutil.copyfile(source, dst)
        return corpus_id

    def corpus_path(self, ref: str) -> Path:
        registered = self.root / "corpora" / f"{ref}.jsonl"
        if registered.exists():
            return registered
        path = Path(ref)
        if path.exists():
            return path
        raise StoreError(f"unknown corpus ref: {ref}")

    def corpus_hash(self, ref: str) -> str:
        digest = hashlib.sha256()
        with open(self.corpus_path(ref), "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 20), b""):
                digest.update(chunk)
        return digest.hexdigest()

    # ------------------------------------------------------------------
    # runs

    def run_dir(self, run_id: str, create: bool = False) -> Path:
        path = self.root / "runs" / run_id
        if create:
            path.mkdir(parents=True, exist_ok=True)
            (path / "reports").mkdir(exist_ok=True)
        return path

    def list_runs(self) -> list[str]:
        return sorted(p.name for p in (self.root / "runs").iterdir() if p.is_dir())

    def write_run_json(self, run_id: str, name: str, doc) -> None:
        path = self.run_dir(run_id, create=True) / name
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    def write_run_jsonl(self, run_id: str, name: str, docs) -> None:
        path = self.run_dir(run_id, create=True) / name
        with open(path, "w", encoding="utf-8") as fh:
            for doc in docs:
                fh.write(json.dumps(doc, sort_keys=True) + "\n")

    def read_run_json(self, run_id: str, name: str):
        path = self.run_dir(run_id) / name
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def read_report(self, run_id: str, kind: str):
        return self.read_run_json(run_id, f"reports/{kind}.json")

    # ------------------------------------------------------------------
    # request-id idempotency ledger

    def _load_requests(self) -> dict[str, dict]:
        out: dict[str, dict] = {}
        if self._requests_path.exists():
            with open(self._requests_path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        doc = json.loads(line)
                        out[doc["request_id"]] = doc["response"]
        return out

    def request_response(self, request_id: str) -> dict | None:
        with self._lock:
            return self._requests.get(request_id)

    def save_request(self, request_id: str, response: dict) -> None:
        with self._lock:
            self._requests[request_id] = response
            with open(self._requests_path, "a", encoding="utf-8") as fh:
                fh.write(
                    json.dumps({"request_id": request_id, "response": response}, sort_keys=True)
                    + "\n"
                )
