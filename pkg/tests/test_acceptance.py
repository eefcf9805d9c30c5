"""Acceptance suite: the release gate.

One test per criterion, each at its stated tolerance, each printing a
PASS line (run with -s to see them).  Numbers compared against published
tables are arithmetic checks; everything data-dependent runs on seeded
synthetic corpora with planted ground truth.
"""
from __future__ import annotations

import math
import random
import time
from fractions import Fraction

import pytest

from hashmine.corpus import (
    GeneratorSpec,
    GeoClusterSpec,
    PlantedSlang,
    generate,
    ingest,
)
from hashmine.corpus.model import Geo, Post, UserRecord
from hashmine.demographics import StubFaceProvider, aggregate_user, cohort_report
from hashmine.classify import extract_candidate_users, selfie_filter
from hashmine.geospatial import (
    StubGeocoder,
    categorize_venues,
    cluster_hotspots,
    haversine,
    parse_circle,
    plan_cover,
)
from hashmine.itemsets import Transaction, apriori, brute_force_itemsets, rules
from hashmine.lexicon import CurationDecision
from hashmine.network import build_graph, display_ratio, triangle_count, triangle_count_oracle
from hashmine.service import RunConfig, Store, execute_run

SUPPORT_SWEEP = [round(0.05 * k, 2) for k in range(1, 11)]  # 0.05 .. 0.5


def ok(n, name):
    print(f"ACCEPTANCE {n} PASS: {name}")


def test_01_apriori_equals_brute_force_oracle():
    started = time.monotonic()
    rng = random.Random(20150823)
    for case in range(200):
        max_items = 20 if case % 40 == 0 else 14  # a few full-width universes
        n_items = rng.randint(3, max_items)
        universe = [f"i{k:02d}" for k in range(n_items)]
        n_tx = rng.randint(1, 60)
        transactions = [
            Transaction(
                id=f"t{t}",
                items=frozenset(rng.sample(universe, rng.randint(0, min(n_items, 8)))),
            )
            for t in range(n_tx)
        ]
        for min_support in SUPPORT_SWEEP:
            fast = {(s.items, s.support, s.count) for s in apriori(transactions, min_support)}
            slow = {
                (s.items, s.support, s.count)
                for s in brute_force_itemsets(transactions, min_support)
            }
            assert fast == slow, f"case {case} min_support {min_support}"
    elapsed = time.monotonic() - started
    assert elapsed < 60.0, f"oracle sweep took {elapsed:.1f}s"
    ok(1, f"apriori == brute force on 200 instances x {len(SUPPORT_SWEEP)} thresholds "
          f"({elapsed:.1f}s)")


def test_02_association_rule_printed_confidence():
    base = {"sdryno", "coylecondenser"}
    full = base | {"oilbrothers", "elkthatrun"}
    groups = [full] * 3 + [base] * 2 + [set()] * 5
    transactions = [Transaction(id=f"t{i}", items=frozenset(g)) for i, g in enumerate(groups)]
    frequent = apriori(transactions, 0.2)
    emitted = rules(frequent, 0.6)
    target = [
        r
        for r in emitted
        if r.antecedent == frozenset(base)
        and r.consequent == frozenset({"oilbrothers", "elkthatrun"})
    ]
    assert len(target) == 1
    rule = target[0]
    assert rule.confidence == Fraction(3, 5)
    # re-verify from raw counts, not carried values
    count_full = sum(1 for g in groups if full <= g)
    count_base = sum(1 for g in groups if base <= g)
    assert Fraction(count_full, count_base) == Fraction(3, 5) == rule.confidence
    assert float(rule.confidence) == 0.6
    ok(2, "(sdryno, coylecondenser) => (oilbrothers, elkthatrun) at confidence exactly 0.6")


def test_03_group_ratio_arithmetic_matches_printed_table():
    rows = [
        (539.88, 799.48, 0.68),
        (554.17, 476.10, 1.16),
        (467.33, 483.07, 0.97),
        (495.15, 502.94, 0.98),
        (529.36, 463.31, 1.14),
    ]
    for avg_in, avg_out, printed in rows:
        assert display_ratio(avg_in, avg_out) == printed, (avg_in, avg_out)
    ok(3, "all five printed in/out-degree ratios reproduced at 2-decimal rounding")


def test_04_triangle_oracle_and_canonical_cases():
    cyclic = build_graph([("a", "b"), ("b", "c"), ("c", "a")])
    assert triangle_count(cyclic)[0] == 1
    symmetric = build_graph(
        [("a", "b"), ("b", "a"), ("b", "c"), ("c", "b"), ("a", "c"), ("c", "a")]
    )
    assert triangle_count(symmetric)[0] == 2

    rng = random.Random(406)
    for case in range(200):
        n = rng.randint(3, 50)
        edges = [
            (f"v{a}", f"v{b}")
            for a in range(n)
            for b in range(n)
            if a != b and rng.random() < 0.1
        ]
        graph = build_graph(edges, [{"id": f"v{i}"} for i in range(n)])
        fast_total, fast_per_node = triangle_count(graph)
        slow_total, slow_per_node = triangle_count_oracle(graph)
        assert fast_total == slow_total, f"case {case}"
        assert fast_per_node == slow_per_node, f"case {case}"
    ok(4, "directed 3-cycle counts equal O(n^3) enumeration on 200 digraphs; K3 cases 1 and 2")


BIMODAL = tuple(0.30 if h == 16 else (0.24 if h == 21 else 0.46 / 22) for h in range(24))


def test_05_planted_pattern_end_to_end(tmp_path):
    started = time.monotonic()
    total = 0.72 + 0.14 + 0.13
    weights = {"weed": 0.72 / total, "pills": 0.14 / total, "syrup": 0.13 / total}
    spec = GeneratorSpec(
        n_drug_users=500,
        n_nondrug_users=100,
        posts_per_user=20,
        class_weights=weights,
        hour_weights={"weed": BIMODAL, "syrup": BIMODAL, "pills": BIMODAL},
    )
    result = generate(spec, seed=420)
    paths = result.write(tmp_path / "synth")
    store = Store(tmp_path / "store")
    ref = store.register_corpus(paths["corpus"], "planted")
    run, bundle = execute_run(store, ref, RunConfig())
    assert run.status == "done"

    popularity = bundle.reports["popularity"]
    assert popularity["total_drug_posts"] == 10_000
    for cls, weight in weights.items():
        mined_share = popularity["counts"][cls] / popularity["total_drug_posts"]
        assert abs(mined_share - weight) <= 0.02, cls

    peaks = bundle.reports["temporal"]["hour"]["all"]["peaks"]
    assert set(peaks) == {16, 21}
    elapsed = time.monotonic() - started
    assert elapsed < 120.0, f"end-to-end run took {elapsed:.1f}s"
    ok(5, f"class shares within 2pp and hour peaks exactly {{16, 21}} ({elapsed:.1f}s)")


def test_06_feedback_loop_fixed_point(tmp_path):
    spec = GeneratorSpec(
        n_drug_users=40,
        n_nondrug_users=20,
        posts_per_user=10,
        planted_slang=(PlantedSlang(tag="newslang", fraction=0.25, extra_posts=40),),
    )
    result = generate(spec, seed=55)
    paths = result.write(tmp_path / "synth")
    store = Store(tmp_path / "store")
    ref = store.register_corpus(paths["corpus"], "loop")
    config = RunConfig()

    r1, _ = execute_run(store, ref, config)
    assert {t.text for t in store.lexicon().pending_terms()} == {"newslang"}
    store.decide(
        [CurationDecision(term_text="newslang", verdict="accept", category="weed")]
    )
    r2, _ = execute_run(store, ref, config)
    assert r2.metrics["classify"]["drug_posts"] > r1.metrics["classify"]["drug_posts"]
    r3, _ = execute_run(store, ref, config)
    assert r3.metrics["propose"]["proposed"] == 0
    ok(6, "run -> accept -> run strictly grows positives; third run proposes nothing")


def test_07_coverage_soundness():
    regions = [
        ((33.65, -118.35, 33.83, -118.13), 5000.0),
        ((45.48, -122.72, 45.58, -122.55), 2500.0),
        ((-0.05, 10.0, 0.05, 10.2), 3000.0),
    ]
    window = (1457615968, 1458220768)
    rng = random.Random(90210)
    for bbox, radius in regions:
        plan = plan_cover(bbox, radius, window)
        lat_min, lon_min, lat_max, lon_max = bbox
        uncovered = 0
        for _ in range(10_000):
            point = (rng.uniform(lat_min, lat_max), rng.uniform(lon_min, lon_max))
            if min(haversine(point, (c.lat, c.lon)) for c in plan.circles) > radius:
                uncovered += 1
        assert uncovered == 0, bbox
    circle = parse_circle([1458220768, 1457615968, 5000, 33.740675, -118.260497])
    assert (circle.min_time, circle.max_time) == (1457615968, 1458220768)
    assert circle.radius_m == 5000.0
    ok(7, "zero uncovered points in 10k-sample checks; example circle parses after "
          "time normalization")


def test_08_demographics_arithmetic_and_planted_genders(tmp_path, seed_lexicon):
    # standard-error arithmetic at sigma 5, n 32
    user = UserRecord(user_id="u1", username="u1")
    posts = [
        Post(
            media_id=f"m{i}", user_id="u1", username="u1", created_at=1_450_000_000,
            hashtags=("kush", "420", "selfie"), media_ref=f"img_m{i}",
        )
        for i in range(32)
    ]
    provider = StubFaceProvider(
        iter(
            {"media_ref": f"img_m{i}", "faces": [{"rect": [0, 0, 40, 40], "age": 24.0, "gender": "male"}]}
            for i in range(32)
        ),
        sigma=5.0,
    )
    demo = aggregate_user(user, posts, provider)
    assert demo.n_faces == 32
    expected = 5.0 / math.sqrt(32)
    assert abs(demo.age_stderr - expected) < 1e-6
    assert round(demo.age_stderr, 4) == 0.8839
    assert demo.age_stderr < 1.0

    # planted 145 female / 261 male primary faces across 406 confirmed users
    spec = GeneratorSpec(
        n_drug_users=406,
        n_nondrug_users=0,
        posts_per_user=4,
        selfie_user_fraction=1.0,
        female_fraction=145 / 406,
    )
    result = generate(spec, seed=41)
    corpus, _ = ingest(result.documents)
    confirmed = selfie_filter(
        extract_candidate_users(corpus, seed_lexicon), corpus, seed_lexicon
    )
    assert len(confirmed) == 406
    stub = StubFaceProvider(iter(result.faces), sigma=5.0)
    demos = []
    for u in confirmed:
        selfies = [
            p
            for p in corpus.user_posts(u.user_id)
            if any(t in seed_lexicon.selfie_tags for t in p.hashtags)
        ]
        demos.append(aggregate_user(u, selfies, stub))
    report = cohort_report([d for d in demos if d is not None])
    assert report["gender_counts"]["female"] == 145
    assert report["gender_counts"]["male"] == 261
    ok(8, "age stderr 5/sqrt(32) within 1e-6 (= 0.8839 < 1 year); gender counts exactly 145/261")


def test_09_clustering_recovery_and_venue_shares():
    rng = random.Random(3033)
    centers = [(33.74, -118.26), (33.80, -118.20), (33.70, -118.15)]
    sigma_deg = 50.0 / 111_195.0
    posts = []
    for c, (lat, lon) in enumerate(centers):
        for i in range(200):
            posts.append(
                Post(
                    media_id=f"h{c}_{i:03d}", user_id="u", username="u",
                    created_at=1_450_000_000, hashtags=("kush", "420"),
                    geo=Geo(lat=rng.gauss(lat, sigma_deg), lon=rng.gauss(lon, sigma_deg)),
                )
            )
    for i in range(1000):
        posts.append(
            Post(
                media_id=f"n{i:04d}", user_id="u", username="u",
                created_at=1_450_000_000, hashtags=("kush", "420"),
                geo=Geo(lat=rng.uniform(33.60, 33.90), lon=rng.uniform(-118.45, -118.05)),
            )
        )
    clusters = cluster_hotspots(posts, eps_m=150.0, min_points=5)
    assert len(clusters) == 3
    matched_centers = set()
    for cluster in clusters:
        nearest = min(centers, key=lambda ctr: haversine(cluster.centroid, ctr))
        assert haversine(cluster.centroid, nearest) <= 150.0
        matched_centers.add(nearest)
    assert len(matched_centers) == 3

    # stub geocoder over ten planted clusters reproduces the 60/10/30 shares
    spots = [(33.70 + 0.01 * i, -118.40) for i in range(10)]
    ten_clusters = []
    for i, (lat, lon) in enumerate(spots):
        members = [
            Post(
                media_id=f"v{i}_{j}", user_id="u", username="u",
                created_at=1_450_000_000, hashtags=("kush", "420"),
                geo=Geo(lat=lat, lon=lon),
            )
            for j in range(5)
        ]
        ten_clusters.extend(cluster_hotspots(members, 150.0, 5))
    rules_fixture = [
        {
            "lat": lat,
            "lon": lon,
            "radius_m": 300.0,
            "category": "residential" if i < 6 else ("club" if i == 6 else "restaurant"),
        }
        for i, (lat, lon) in enumerate(spots)
    ]
    _, venue_report = categorize_venues(ten_clusters, StubGeocoder(rules_fixture))
    shares = venue_report["shares_percent"]
    assert (shares["residential"], shares["club"], shares["restaurant"]) == (60.0, 10.0, 30.0)
    ok(9, "3 planted hotspots recovered exactly with centroids within 150 m; venue shares 60/10/30")


def test_10_determinism_and_persistence(tmp_path):
    spec = GeneratorSpec(
        n_drug_users=25,
        n_nondrug_users=10,
        posts_per_user=6,
        geo_fraction=0.5,
        geo_clusters=(GeoClusterSpec(lat=33.74, lon=-118.26, sigma_m=40.0),),
        planted_slang=(PlantedSlang(tag="newslang", fraction=0.3, extra_posts=8),),
    )
    result = generate(spec, seed=1010)
    paths = result.write(tmp_path / "synth")

    bundles = []
    run_ids = []
    for name in ("store_a", "store_b"):
        store = Store(tmp_path / name)
        ref = store.register_corpus(paths["corpus"], "det")
        run, _ = execute_run(store, ref, RunConfig())
        assert run.status == "done"
        run_ids.append(run.run_id)
        report_dir = store.run_dir(run.run_id) / "reports"
        bundles.append({p.name: p.read_bytes() for p in sorted(report_dir.iterdir())})
    assert run_ids[0] == run_ids[1]
    assert bundles[0] == bundles[1]

    # restart preserves decisions, runs and reports
    store = Store(tmp_path / "store_a")
    store.decide(
        [CurationDecision(term_text="newslang", verdict="accept", category="weed")]
    )
    version = store.lexicon().version
    reopened = Store(tmp_path / "store_a")
    assert reopened.lexicon().version == version == 2
    assert reopened.lexicon().get("newslang").status == "accepted"
    assert run_ids[0] in reopened.list_runs()
    assert reopened.read_report(run_ids[0], "popularity") is not None
    ok(10, "identical inputs give byte-identical report bundles; restart loses nothing")
