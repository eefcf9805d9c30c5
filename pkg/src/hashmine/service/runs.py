"""End-to-end mining rounds: ingest -> classify -> mine -> propose -> reports.

A run binds exactly one lexicon version (the snapshot taken at start) and
persists every artifact under a content-addressed run id, so re-running
identical inputs reproduces the same id and byte-identical reports.
Timestamps live only in run.json, never inside report files.
"""
from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from typing import Sequence

from .. import classify, geospatial, itemsets, network, temporal
from ..corpus import ingest as corpus_ingest
from ..corpus.model import Corpus, Post
from ..demographics import StubFaceProvider, aggregate_user, cohort_report
from ..lexicon import Lexicon, propose_candidates
from .store import Store

log = logging.getLogger(__name__)

REPORT_KINDS = ("popularity", "temporal", "demographics", "interests", "network", "geo")
STAGES = ("ingest", "classify", "mine", "propose", "reports")


class RunConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    min_drug_tags: int = 2
    min_selfie_posts: int = 2
    nondrug_probe_tag: str = "instapic"
    mining_min_support: float = 0.2
    mining_max_k: int | None = 3
    min_confidence: float = 0.6
    proposal_min_support: float = 0.2
    follows_min_support: float = 0.1
    peak_prominence: float = 0.02
    provider_sigma: float = 5.0
    geo_eps_m: float = 150.0
    geo_min_points: int = 5
    top_k: int = 10
    survey_shares: dict | None = None
    region_bbox: tuple | None = None  # lat_min, lon_min, lat_max, lon_max
    baseline_profile_path: str | None = None
    follows_path: str | None = None
    nodes_path: str | None = None
    faces_path: str | None = None
    geocoder_path: str | None = None

    def classification(self) -> classify.ClassificationConfig:
        return classify.ClassificationConfig(
            min_drug_tags=self.min_drug_tags,
            min_selfie_posts=self.min_selfie_posts,
            nondrug_probe_tag=self.nondrug_probe_tag,
        )

    def to_doc(self) -> dict:
        doc = {
            "min_drug_tags": self.min_drug_tags,
            "min_selfie_posts": self.min_selfie_posts,
            "nondrug_probe_tag": self.nondrug_probe_tag,
            "mining_min_support": self.mining_min_support,
            "mining_max_k": self.mining_max_k,
            "min_confidence": self.min_confidence,
            "proposal_min_support": self.proposal_min_support,
            "follows_min_support": self.follows_min_support,
            "peak_prominence": self.peak_prominence,
            "provider_sigma": self.provider_sigma,
            "geo_eps_m": self.geo_eps_m,
            "geo_min_points": self.geo_min_points,
            "top_k": self.top_k,
            "survey_shares": self.survey_shares,
            "region_bbox": list(self.region_bbox) if self.region_bbox else None,
            "baseline_profile_path": self.baseline_profile_path,
            "follows_path": self.follows_path,
            "nodes_path": self.nodes_path,
            "faces_path": self.faces_path,
            "geocoder_path": self.geocoder_path,
        }
        return doc

    @classmethod
    def from_doc(cls, doc: dict | None) -> "RunConfig":
        if not doc:
            return cls()
        kwargs = dict(doc)
        if kwargs.get("region_bbox"):
            kwargs["region_bbox"] = tuple(kwargs["region_bbox"])
        known = {f for f in cls.__dataclass_fields__}  # noqa: C416
        unknown = set(kwargs) - known
        if unknown:
            raise RunConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**kwargs)


@dataclass
class Run:
    run_id: str
    corpus_ref: str
    corpus_hash: str
    lexicon_version_used: int
    config: RunConfig
    stages: list[dict] = field(default_factory=list)
    metrics: dict = field(default_factory=dict)
    started_at: float = 0.0
    finished_at: float = 0.0
    status: str = "running"

    def to_doc(self) -> dict:
        return {
            "run_id": self.run_id,
            "corpus_ref": self.corpus_ref,
            "corpus_hash": self.corpus_hash,
            "lexicon_version_used": self.lexicon_version_used,
            "config": self.config.to_doc(),
            "stages": self.stages,
            "metrics": self.metrics,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "status": self.status,
        }


@dataclass
class ReportBundle:
    run_id: str
    lexicon_version: int
    reports: dict  # kind -> report doc (plus "geojson")

    def get(self, kind: str):
        return self.reports.get(kind)


def make_run_id(corpus_hash: str, lexicon_version: int, config: RunConfig) -> str:
    payload = json.dumps(
        {"corpus": corpus_hash, "lexicon_version": lexicon_version, "config": config.to_doc()},
        sort_keys=True,
    )
    return "r" + hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def popularity_report(
    attributions: Sequence[classify.ClassAttribution],
    survey_shares: dict | None = None,
) -> dict:
    """Per-class drug-post counts; multi-class posts count once per class
    (stated convention).  Survey comparison columns are share x total."""
    counts = {cls: 0 for cls in classify.DRUG_CLASSES}
    unattributed = 0
    for att in attributions:
        for cls in att.classes:
            counts[cls] += 1
        if att.unattributed:
            unattributed += 1
    total = len(attributions)
    doc = {
        "counts": counts,
        "unattributed": unattributed,
        "total_drug_posts": total,
        "convention": "a post counts once per attributed class",
        "survey_comparison": None,
    }
    if survey_shares is not None:
        share_sum = sum(survey_shares.values())
        if share_sum > 1 + 1e-9:
            raise RunConfigError(f"survey shares sum to {share_sum}, above 1")
        doc["survey_comparison"] = {
            cls: round(share * total, 2) for cls, share in sorted(survey_shares.items())
        }
    return doc


def geolocation_validation(
    confirmed: Sequence, corpus: Corpus, lexicon: Lexicon,
    config: classify.ClassificationConfig, bbox: tuple,
) -> dict:
    """Share of geo-bearing confirmed users whose geotagged drug posts fall
    inside the target bounding box (lat_min, lon_min, lat_max, lon_max)."""
    lat_min, lon_min, lat_max, lon_max = bbox
    geo_users = 0
    inside_users = 0
    for user in confirmed:
        geo_posts = [
            p
            for p in corpus.user_posts(user.user_id)
            if p.geo is not None and classify.is_drug_post(p, lexicon, config)[0]
        ]
        if not geo_posts:
            continue
        geo_users += 1
        if any(
            lat_min <= p.geo.lat <= lat_max and lon_min <= p.geo.lon <= lon_max
            for p in geo_posts
        ):
            inside_users += 1
    return {
        "geo_users": geo_users,
        "inside_region": inside_users,
        "share_inside": (inside_users / geo_users) if geo_users else None,
    }


def _candidate_cards(
    candidates, transactions, corpus: Corpus, lexicon: Lexicon, run_id: str
) -> list[dict]:
    n = len(transactions)
    active = frozenset(lexicon.active_terms())
    cards = []
    for cand in candidates:
        joint: dict[str, int] = {}
        containing = [t for t in transactions if cand.text in t.items]
        for t in containing:
            for item in t.items & active:
                joint[item] = joint.get(item, 0) + 1
        top = sorted(joint.items(), key=lambda kv: (-kv[1], kv[0]))[:5]
        samples = []
        for t in containing[:3]:
            post = corpus.get(t.id)
            if post is not None:
                samples.append(
                    {
                        "media_id": post.media_id,
                        "caption": post.caption,
                        "hashtags": list(post.hashtags),
                    }
                )
        cards.append(
            {
                "term": cand.text,
                "support": cand.support_at_proposal,
                "run_id": run_id,
                "cooccurring": [
                    {"term": term, "support": round(count / n, 3)} for term, count in top
                ],
                "samples": samples,
            }
        )
    return cards


def execute_run(store: Store, corpus_ref: str, config: RunConfig | None = None) -> tuple[Run, ReportBundle]:
    config = config or RunConfig()
    lexicon = store.lexicon()  # snapshot: decisions applied later do not leak in
    cls_config = config.classification()
    corpus_hash = store.corpus_hash(corpus_ref)
    run_id = make_run_id(corpus_hash, lexicon.version, config)
    run = Run(
        run_id=run_id,
        corpus_ref=corpus_ref,
        corpus_hash=corpus_hash,
        lexicon_version_used=lexicon.version,
        config=config,
        started_at=time.time(),
    )
    store.run_dir(run_id, create=True)
    bundle = ReportBundle(run_id=run_id, lexicon_version=lexicon.version, reports={})

    stage = "ingest"
    try:
        corpus, ingest_report = corpus_ingest(store.corpus_path(corpus_ref))
        run.metrics["ingest"] = ingest_report.to_doc()
        run.stages.append({"name": "ingest", "status": "done"})

        stage = "classify"
        positives: list[Post] = []
        attributions: list[classify.ClassAttribution] = []
        audit_docs = []
        for post in corpus:
            att = classify.attribute_classes(post, lexicon, cls_config)
            if len(att.matched_terms) >= cls_config.min_drug_tags:
                positives.append(post)
                attributions.append(att)
                audit_docs.append(
                    {
                        "media_id": att.media_id,
                        "matched_terms": sorted(t.text for t in att.matched_terms),
                        "classes": sorted(att.classes),
                    }
                )
        candidates_users = classify.extract_candidate_users(corpus, lexicon, cls_config)
        confirmed = classify.selfie_filter(candidates_users, corpus, lexicon, cls_config)
        nondrug = classify.build_nondrug_cohort(corpus, lexicon, cls_config)
        store.write_run_jsonl(run_id, "classification.jsonl", audit_docs)
        store.write_run_jsonl(run_id, "cohort_drug.jsonl", [u.to_doc() for u in confirmed])
        store.write_run_jsonl(run_id, "cohort_nondrug.jsonl", [u.to_doc() for u in nondrug])
        run.metrics["classify"] = {
            "drug_posts": len(positives),
            "candidate_users": len(candidates_users),
            "confirmed_users": len(confirmed),
            "nondrug_users": len(nondrug),
        }
        run.stages.append({"name": "classify", "status": "done"})

        stage = "mine"
        transactions = [
            itemsets.Transaction(id=p.media_id, items=frozenset(p.hashtags)) for p in positives
        ]
        frequent: list[itemsets.ItemSet] = []
        mined_rules: list[itemsets.AssociationRule] = []
        if transactions:
            frequent = itemsets.apriori(
                transactions, config.mining_min_support, max_k=config.mining_max_k
            )
            mined_rules = itemsets.rules(frequent, config.min_confidence)
        store.write_run_jsonl(run_id, "itemsets.jsonl", [itemsets.itemset_doc(s) for s in frequent])
        store.write_run_jsonl(run_id, "rules.jsonl", [itemsets.rule_doc(r) for r in mined_rules])
        run.metrics["mine"] = {
            "transactions": len(transactions),
            "frequent_itemsets": len(frequent),
            "rules": len(mined_rules),
        }
        run.stages.append({"name": "mine", "status": "done"})

        stage = "propose"
        candidates = propose_candidates(frequent, config.proposal_min_support, lexicon)
        cards = _candidate_cards(candidates, transactions, corpus, lexicon, run_id)
        added = store.add_pending(candidates, run_id=run_id, decided_at=0)
        added_texts = {t.text for t in added}
        for card in cards:
            if card["term"] in added_texts:
                store.write_candidate_card(card)
        store.write_run_jsonl(run_id, "candidates.jsonl", cards)
        run.metrics["propose"] = {"proposed": len(candidates), "newly_pending": len(added)}
        run.stages.append({"name": "propose", "status": "done"})

        stage = "reports"
        reports = _build_reports(
            store, run_id, corpus, positives, attributions, confirmed, nondrug,
            lexicon, cls_config, config,
        )
        bundle.reports = reports
        run.metrics["reports"] = {"kinds": sorted(k for k in reports if k != "geojson")}
        run.stages.append({"name": "reports", "status": "done"})
        run.status = "done"
    except Exception as exc:
        log.exception("run %s failed at stage %s", run_id, stage)
        run.stages.append({"name": stage, "status": "failed", "error": str(exc)})
        run.status = f"failed:{stage}"

    run.finished_at = time.time()
    store.write_run_json(run_id, "run.json", run.to_doc())
    return run, bundle


def _build_reports(
    store: Store,
    run_id: str,
    corpus: Corpus,
    positives: list[Post],
    attributions: list[classify.ClassAttribution],
    confirmed,
    nondrug,
    lexicon: Lexicon,
    cls_config: classify.ClassificationConfig,
    config: RunConfig,
) -> dict:
    provenance = {"run_id": run_id, "lexicon_version": lexicon.version}
    reports: dict = {}

    pop = popularity_report(attributions, config.survey_shares)
    pop.update(provenance)
    reports["popularity"] = pop

    baseline = (
        temporal.BaselineProfile.from_json(config.baseline_profile_path)
        if config.baseline_profile_path
        else temporal.BaselineProfile.uniform()
    )
    temp = temporal.temporal_report(
        corpus.posts, lexicon, cls_config, baseline, config.peak_prominence
    )
    if config.region_bbox is not None:
        temp["geolocation_validation"] = geolocation_validation(
            confirmed, corpus, lexicon, cls_config, config.region_bbox
        )
    temp.update(provenance)
    reports["temporal"] = temp

    if config.faces_path:
        provider = StubFaceProvider(config.faces_path, sigma=config.provider_sigma)
        demos = []
        excluded = 0
        drug_posts_by_user: dict[str, list[Post]] = {}
        for user in confirmed:
            selfies = [
                p
                for p in corpus.user_posts(user.user_id)
                if any(tag in lexicon.selfie_tags for tag in p.hashtags)
            ]
            demo = aggregate_user(user, selfies, provider)
            if demo is None:
                excluded += 1
                continue
            demos.append(demo)
            drug_posts_by_user[user.user_id] = [
                p
                for p in corpus.user_posts(user.user_id)
                if classify.is_drug_post(p, lexicon, cls_config)[0]
            ]
        demo_report = cohort_report(demos, drug_posts_by_user, excluded_no_faces=excluded)
        demo_report.update(provenance)
        reports["demographics"] = demo_report

    if config.follows_path:
        edges = network.read_edges_csv(config.follows_path)
        node_meta = (
            network.read_node_meta_jsonl(config.nodes_path) if config.nodes_path else []
        )
        reports["interests"] = _interests_report(confirmed, edges, config)
        reports["interests"].update(provenance)
        reports["network"] = _network_report(confirmed, nondrug, edges, node_meta, config)
        reports["network"].update(provenance)

    geo_posts = [p for p in positives if p.geo is not None]
    unique_geo, dedup_report = geospatial.dedup(geo_posts)
    clusters = geospatial.cluster_hotspots(
        unique_geo, eps_m=config.geo_eps_m, min_points=config.geo_min_points
    )
    if config.geocoder_path:
        geocoder = geospatial.StubGeocoder(config.geocoder_path)
        clusters, venue_report = geospatial.categorize_venues(clusters, geocoder)
    else:
        venue_report = None
    geo = {
        "n_geo_posts": len(unique_geo),
        "dedup": dedup_report,
        "clusters": [
            {
                "members": list(c.members),
                "centroid": {"lat": c.centroid[0], "lon": c.centroid[1]},
                "venue_category": c.venue_category,
            }
            for c in clusters
        ],
        "venues": venue_report,
    }
    geo.update(provenance)
    reports["geo"] = geo
    reports["geojson"] = geospatial.clusters_geojson(clusters)

    for kind in REPORT_KINDS:
        if kind in reports:
            store.write_run_json(run_id, f"reports/{kind}.json", reports[kind])
    store.write_run_json(run_id, "reports/clusters.geojson", reports["geojson"])
    return reports


def _interests_report(confirmed, edges, config: RunConfig) -> dict:
    transactions = itemsets.followed_accounts_transactions(confirmed, edges)
    if not transactions:
        return {"n_users": 0, "itemsets": [], "rules": []}
    frequent = itemsets.apriori(transactions, config.follows_min_support, max_k=4)
    followed_rules = itemsets.rules(frequent, config.min_confidence)
    return {
        "n_users": len(transactions),
        "itemsets": [itemsets.itemset_doc(s) for s in frequent[:50]],
        "rules": [itemsets.rule_doc(r) for r in followed_rules[:50]],
    }


def _network_report(confirmed, nondrug, edges, node_meta, config: RunConfig) -> dict:
    drug_ids = {u.user_id for u in confirmed}
    nondrug_ids = {u.user_id for u in nondrug}
    meta_by_id = {m["id"]: m for m in node_meta}

    def cohort_graph(member_ids: set[str]) -> network.DirectedGraph:
        touching = [e for e in edges if e[0] in member_ids or e[1] in member_ids]
        involved = {n for e in touching for n in e} | member_ids
        meta = [meta_by_id[n] for n in sorted(involved) if n in meta_by_id]
        return network.build_graph(touching, meta)

    graph_drug = cohort_graph(drug_ids)
    graph_nondrug = cohort_graph(nondrug_ids)
    dealers = [n for n in graph_drug.nodes() if graph_drug.role(n) == "dealer"]

    drug_members = sorted(n for n in drug_ids if graph_drug.has_node(n))
    nondrug_members = sorted(n for n in nondrug_ids if graph_nondrug.has_node(n))
    report = {
        "table2": {
            "drug": {"n_nodes": graph_drug.n_nodes, "n_edges": graph_drug.n_edges},
            "nondrug": {"n_nodes": graph_nondrug.n_nodes, "n_edges": graph_nondrug.n_edges},
        },
        "drug": network.network_report(
            graph_drug,
            {
                "drug_user_group": drug_members,
                "regular_drug_accounts": network.regular_filter(graph_drug, drug_members),
                "drug_dealer": dealers,
            },
            top_k=config.top_k,
        ),
        "nondrug": network.network_report(
            graph_nondrug,
            {
                "nondrug_user_group": nondrug_members,
                "regular_nondrug_accounts": network.regular_filter(
                    graph_nondrug, nondrug_members
                ),
            },
            top_k=config.top_k,
        ),
        "note": "avg_total_degree is avg_in + avg_out by definition",
    }
    return report
