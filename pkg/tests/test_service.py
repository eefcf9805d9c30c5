from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from hashmine.corpus import GeneratorSpec, GeoClusterSpec, PlantedPage, PlantedSlang, generate
from hashmine.lexicon import CurationDecision
from hashmine.service import RunConfig, Store, execute_run, popularity_report
from hashmine.service.api import create_app
from hashmine.service.runs import RunConfigError, geolocation_validation, make_run_id


SLANG_SPEC = GeneratorSpec(
    n_drug_users=30,
    n_nondrug_users=15,
    posts_per_user=8,
    planted_slang=(PlantedSlang(tag="newslang", fraction=0.25, extra_posts=24),),
    planted_pages=(
        PlantedPage(page_id="elboglass", fraction=0.4),
        PlantedPage(page_id="saltglass", fraction=0.2),
    ),
    geo_fraction=0.6,
    geo_clusters=(
        GeoClusterSpec(lat=33.74, lon=-118.26, sigma_m=40.0, category="residential"),
        GeoClusterSpec(lat=33.80, lon=-118.20, sigma_m=40.0, category="club"),
    ),
    selfie_user_fraction=1.0,
)


@pytest.fixture()
def slang_setup(tmp_path):
    result = generate(SLANG_SPEC, seed=77)
    paths = result.write(tmp_path / "synth")
    store = Store(tmp_path / "store")
    ref = store.register_corpus(paths["corpus"], "slang")
    config = RunConfig(
        follows_path=paths["follows"],
        nodes_path=paths["nodes"],
        faces_path=paths["faces"],
        geocoder_path=paths["geocoder"],
        region_bbox=(33.0, -119.0, 34.5, -117.5),
    )
    return store, ref, config, paths


def test_execute_run_full_pipeline(slang_setup):
    store, ref, config, _ = slang_setup
    run, bundle = execute_run(store, ref, config)
    assert run.status == "done"
    assert [s["name"] for s in run.stages] == ["ingest", "classify", "mine", "propose", "reports"]
    assert run.metrics["propose"]["newly_pending"] >= 1
    assert {t.text for t in store.lexicon().pending_terms()} == {"newslang"}
    for kind in ("popularity", "temporal", "demographics", "interests", "network", "geo"):
        assert bundle.reports[kind]["run_id"] == run.run_id
        assert bundle.reports[kind]["lexicon_version"] == run.lexicon_version_used
        assert store.read_report(run.run_id, kind) is not None


def test_execute_run_empty_corpus(tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("", encoding="utf-8")
    store = Store(tmp_path / "store")
    ref = store.register_corpus(empty, "empty")
    run, bundle = execute_run(store, ref, RunConfig())
    assert run.status == "done"
    assert run.metrics["classify"]["drug_posts"] == 0
    assert run.metrics["propose"]["proposed"] == 0
    assert bundle.reports["popularity"]["total_drug_posts"] == 0
    assert bundle.reports["geo"]["clusters"] == []


def test_run_determinism_across_stores(tmp_path):
    result = generate(SLANG_SPEC, seed=78)
    paths = result.write(tmp_path / "synth")
    bundles = []
    run_ids = []
    for name in ("a", "b"):
        store = Store(tmp_path / name)
        ref = store.register_corpus(paths["corpus"], "c")
        config = RunConfig(
            follows_path=paths["follows"],
            nodes_path=paths["nodes"],
            faces_path=paths["faces"],
            geocoder_path=paths["geocoder"],
        )
        run, _ = execute_run(store, ref, config)
        assert run.status == "done"
        run_ids.append(run.run_id)
        report_dir = store.run_dir(run.run_id) / "reports"
        bundles.append(
            {p.name: p.read_bytes() for p in sorted(report_dir.iterdir())}
        )
    assert run_ids[0] == run_ids[1]
    assert bundles[0] == bundles[1]


def test_feedback_loop_converges(slang_setup):
    store, ref, config, _ = slang_setup
    r1, _ = execute_run(store, ref, config)
    assert r1.metrics["propose"]["newly_pending"] == 1
    store.decide(
        [CurationDecision(term_text="newslang", verdict="accept", category="weed")]
    )
    r2, _ = execute_run(store, ref, config)
    assert r2.metrics["classify"]["drug_posts"] > r1.metrics["classify"]["drug_posts"]
    r3, _ = execute_run(store, ref, config)
    assert r3.metrics["propose"]["proposed"] == 0
    assert r3.metrics["classify"]["drug_posts"] == r2.metrics["classify"]["drug_posts"]


def test_run_binds_lexicon_snapshot(slang_setup):
    store, ref, config, _ = slang_setup
    r1, bundle = execute_run(store, ref, config)
    assert r1.lexicon_version_used == 1
    store.decide(
        [CurationDecision(term_text="newslang", verdict="accept", category="weed")]
    )
    # the stored reports still carry the version used at run start
    assert store.read_report(r1.run_id, "popularity")["lexicon_version"] == 1
    assert store.lexicon().version == 2


def test_run_failure_keeps_earlier_outputs(slang_setup, tmp_path):
    store, ref, config, _ = slang_setup
    bad = RunConfig(faces_path=str(tmp_path / "missing_faces.jsonl"))
    run, _ = execute_run(store, ref, bad)
    assert run.status == "failed:reports"
    assert (store.run_dir(run.run_id) / "classification.jsonl").exists()
    doc = store.read_run_json(run.run_id, "run.json")
    assert doc["stages"][-1]["status"] == "failed"


# ---------------------------------------------------------------------------
# report arithmetic


def test_popularity_survey_comparison_arithmetic():
    class Att:
        def __init__(self, classes, unattributed=False):
            self.classes = classes
            self.unattributed = unattributed

    attributions = [Att(frozenset({"weed"}))] * 1000
    report = popularity_report(
        attributions, survey_shares={"weed": 0.72, "pills": 0.14, "syrup": 0.13}
    )
    assert report["survey_comparison"] == {"pills": 140.0, "syrup": 130.0, "weed": 720.0}
    assert report["counts"]["weed"] == 1000


def test_popularity_rejects_shares_above_one():
    with pytest.raises(RunConfigError):
        popularity_report([], survey_shares={"weed": 0.8, "pills": 0.4})


def test_popularity_zero_posts():
    report = popularity_report([], survey_shares={"weed": 0.72})
    assert report["total_drug_posts"] == 0
    assert report["survey_comparison"] == {"weed": 0.0}


def test_geolocation_validation_shape(seed_lexicon, tmp_path):
    # 176 geo users of whom 172 are inside the box: share ~97.7%
    from hashmine.corpus import ingest
    from hashmine.corpus.model import UserRecord

    spec = GeneratorSpec(
        n_drug_users=200,
        n_nondrug_users=0,
        posts_per_user=6,
        geo_fraction=1.0,
        geo_clusters=(GeoClusterSpec(lat=33.74, lon=-118.26, sigma_m=60.0),),
        out_region=(48.85, 2.35),
        out_region_user_fraction=0.05,
    )
    result = generate(spec, seed=79)
    corpus, _ = ingest(result.documents)
    users = [UserRecord(user_id=u, username=u) for u in corpus.user_ids()]
    from hashmine.classify import DEFAULT_CONFIG

    report = geolocation_validation(
        users, corpus, seed_lexicon, DEFAULT_CONFIG, (33.0, -119.0, 34.5, -117.5)
    )
    assert report["geo_users"] == 200
    share = report["share_inside"]
    assert abs(share - 0.95) <= 0.02
    assert report["inside_region"] == 190


def test_make_run_id_depends_on_inputs():
    a = make_run_id("hash1", 1, RunConfig())
    assert a == make_run_id("hash1", 1, RunConfig())
    assert a != make_run_id("hash2", 1, RunConfig())
    assert a != make_run_id("hash1", 2, RunConfig())
    assert a != make_run_id("hash1", 1, RunConfig(min_drug_tags=3))


def test_run_config_rejects_unknown_fields():
    with pytest.raises(RunConfigError):
        RunConfig.from_doc({"min_drug_tag": 2})


# ---------------------------------------------------------------------------
# persistence


def test_store_restart_preserves_everything(slang_setup, tmp_path):
    store, ref, config, _ = slang_setup
    run, _ = execute_run(store, ref, config)
    store.decide(
        [CurationDecision(term_text="newslang", verdict="accept", category="weed")]
    )
    store.save_request("req-1", {"ok": True})

    reopened = Store(store.root)
    assert reopened.lexicon().version == 2
    assert reopened.lexicon().get("newslang").status == "accepted"
    assert run.run_id in reopened.list_runs()
    assert reopened.read_report(run.run_id, "popularity") is not None
    assert reopened.request_response("req-1") == {"ok": True}
    assert reopened.lexicon() == store.lexicon()


# ---------------------------------------------------------------------------
# HTTP API


@pytest.fixture()
def client(slang_setup):
    store, ref, config, paths = slang_setup
    app = create_app(store)
    return TestClient(app), store, ref, config


def test_api_lexicon_endpoint(client):
    api, store, _, _ = client
    response = api.get("/api/lexicon")
    assert response.status_code == 200
    doc = response.json()
    assert doc["lexicon_version"] == 1
    assert "run_id" in doc
    assert any(t["text"] == "kush" for t in doc["terms"])
    seeds = api.get("/api/lexicon", params={"status": "seed"}).json()
    assert all(t["status"] == "seed" for t in seeds["terms"])
    assert api.get("/api/lexicon", params={"status": "bogus"}).status_code == 400


def test_api_run_and_reports(client):
    api, store, ref, config = client
    response = api.post(
        "/api/runs",
        json={"corpus_ref": ref, "config": config.to_doc(), "request_id": "run-1"},
    )
    assert response.status_code == 200
    doc = response.json()
    assert doc["status"] == "done"
    run_id = doc["run_id"]
    assert api.get(f"/api/runs/{run_id}").status_code == 200
    for kind in ("popularity", "temporal", "demographics", "interests", "network", "geo"):
        report = api.get(f"/api/reports/{run_id}/{kind}")
        assert report.status_code == 200
        body = report.json()
        assert body["run_id"] == run_id
        assert body["lexicon_version"] == 1
    geojson = api.get(f"/api/geo/{run_id}/clusters.geojson")
    assert geojson.status_code == 200
    assert geojson.json()["type"] == "FeatureCollection"
    assert api.get(f"/api/reports/{run_id}/bogus").status_code == 400
    assert api.get("/api/reports/nope/popularity").status_code == 404


def test_api_run_idempotent_by_request_id(client):
    api, store, ref, config = client
    body = {"corpus_ref": ref, "config": config.to_doc(), "request_id": "run-2"}
    first = api.post("/api/runs", json=body).json()
    second = api.post("/api/runs", json=body).json()
    assert second["replayed"] is True
    assert second["run_id"] == first["run_id"]


def test_api_candidates_and_decision_flow(client):
    api, store, ref, config = client
    api.post(
        "/api/runs",
        json={"corpus_ref": ref, "config": config.to_doc(), "request_id": "run-3"},
    )
    queue = api.get("/api/candidates").json()
    assert queue["lexicon_version"] == 1
    cards = queue["candidates"]
    assert [c["term"] for c in cards] == ["newslang"]
    card = cards[0]
    assert card["support"] >= 0.2
    assert card["run_id"]
    assert len(card["samples"]) <= 3 and card["samples"]
    assert all("support" in co for co in card["cooccurring"])

    decision = {"verdict": "accept", "category": "weed", "request_id": "dec-1"}
    first = api.post("/api/candidates/newslang/decision", json=decision)
    assert first.status_code == 200
    assert first.json()["lexicon_version"] == 2

    replay = api.post("/api/candidates/newslang/decision", json=decision)
    assert replay.status_code == 200
    assert replay.json()["replayed"] is True
    assert store.lexicon().version == 2  # exactly one decision applied

    # queue is now empty and the decision is visible in the lexicon
    assert api.get("/api/candidates").json()["candidates"] == []
    accepted = api.get("/api/lexicon", params={"status": "accepted"}).json()
    assert [t["text"] for t in accepted["terms"]] == ["newslang"]


def test_api_decision_on_non_pending_conflicts(client):
    api, _, _, _ = client
    response = api.post(
        "/api/candidates/kush/decision",
        json={"verdict": "reject", "request_id": "dec-2"},
    )
    assert response.status_code == 409


def test_api_decision_validation(client):
    api, _, _, _ = client
    response = api.post(
        "/api/candidates/whatever/decision",
        json={"verdict": "promote", "request_id": "dec-3"},
    )
    assert response.status_code == 400


def test_api_unknown_corpus_is_404(client):
    api, _, _, _ = client
    response = api.post(
        "/api/runs", json={"corpus_ref": "missing", "request_id": "run-4"}
    )
    assert response.status_code == 404
