"""Command-line entry points: synth, ingest, run, report, serve, lexicon."""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from ..corpus import GeneratorSpec, generate, ingest
from ..lexicon import CurationDecision, CurationError
from .api import serve
from .runs import RunConfig, execute_run
from .store import Store


def _print_json(doc) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True))


def cmd_synth(args) -> int:
    spec = GeneratorSpec.from_json(args.spec) if args.spec else GeneratorSpec()
    result = generate(spec, seed=args.seed)
    paths = result.write(args.out_dir)
    _print_json({"paths": paths, "summary": result.summary})
    return 0


def cmd_ingest(args) -> int:
    corpus, report = ingest(args.corpus)
    doc = report.to_doc()
    if args.store:
        store = Store(args.store)
        doc["corpus_ref"] = store.register_corpus(args.corpus, corpus_id=args.corpus_id)
    _print_json(doc)
    return 0


def cmd_run(args) -> int:
    store = Store(args.store)
    config = RunConfig.from_doc(json.loads(Path(args.config).read_text())) if args.config else RunConfig()
    corpus_ref = args.corpus
    if Path(corpus_ref).exists():
        corpus_ref = store.register_corpus(corpus_ref)
    run, _ = execute_run(store, corpus_ref, config)
    _print_json(
        {
            "run_id": run.run_id,
            "status": run.status,
            "lexicon_version_used": run.lexicon_version_used,
            "stages": run.stages,
            "metrics": run.metrics,
        }
    )
    return 0 if run.status == "done" else 1


def cmd_report(args) -> int:
    store = Store(args.store)
    if args.kind == "geojson":
        doc = store.read_run_json(args.run_id, "reports/clusters.geojson")
    else:
        doc = store.read_report(args.run_id, args.kind)
    if doc is None:
        print(f"no {args.kind} report for run {args.run_id}", file=sys.stderr)
        return 1
    _print_json(doc)
    return 0


def cmd_serve(args) -> int:
    serve(args.store, host=args.host, port=args.port, console_dir=args.console_dir)
    return 0


def cmd_lexicon_list(args) -> int:
    store = Store(args.store)
    lexicon = store.lexicon()
    terms = sorted(lexicon.terms.values(), key=lambda t: t.text)
    if args.status:
        terms = [t for t in terms if t.status == args.status]
    _print_json(
        {
            "lexicon_version": lexicon.version,
            "terms": [
                {
                    "text": t.text,
                    "category": t.category,
                    "status": t.status,
                    "support_at_proposal": t.support_at_proposal,
                }
                for t in terms
            ],
        }
    )
    return 0


def cmd_lexicon_decide(args) -> int:
    store = Store(args.store)
    try:
        updated = store.decide(
            [
                CurationDecision(
                    term_text=args.term,
                    verdict=args.verdict,
                    category=args.category,
                    decided_at=int(time.time()),
                    actor=args.actor,
                )
            ]
        )
    except CurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    term = updated.terms[args.term]
    _print_json(
        {
            "lexicon_version": updated.version,
            "term": {"text": term.text, "status": term.status, "category": term.category},
        }
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hashmine", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic corpus with ground truth")
    p.add_argument("--spec", help="generator spec JSON (defaults to a small demo spec)")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out-dir", default="synth_out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", help="ingest a JSONL corpus and print the report")
    p.add_argument("--corpus", required=True)
    p.add_argument("--store", help="also register the corpus in this store")
    p.add_argument("--corpus-id")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("run", help="execute a full mining round")
    p.add_argument("--store", required=True)
    p.add_argument("--corpus", required=True, help="corpus ref or JSONL path")
    p.add_argument("--config", help="run config JSON path")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="print a stored report")
    p.add_argument("--store", required=True)
    p.add_argument("--run-id", required=True)
    p.add_argument(
        "--kind",
        required=True,
        choices=["popularity", "temporal", "demographics", "interests", "network", "geo", "geojson"],
    )
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--store", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8337)
    p.add_argument("--console-dir", help="static console bundle to mount at /console")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("lexicon", help="inspect or curate the lexicon")
    lex_sub = p.add_subparsers(dest="lexicon_command", required=True)
    pl = lex_sub.add_parser("list")
    pl.add_argument("--store", required=True)
    pl.add_argument("--status", choices=["seed", "pending", "accepted", "rejected", "banned"])
    pl.set_defaults(func=cmd_lexicon_list)
    pd = lex_sub.add_parser("decide")
    pd.add_argument("--store", required=True)
    pd.add_argument("--term", required=True)
    pd.add_argument("--verdict", required=True, choices=["accept", "reject", "ban"])
    pd.add_argument("--category", choices=["weed", "syrup", "pills", "general"])
    pd.add_argument("--actor", default="cli")
    pd.set_defaults(func=cmd_lexicon_decide)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
