// End-to-end console loop against a live service (secondary acceptance):
//
//  11. accepting a candidate increments the lexicon version, removes the
//      card, and the next run's drug-post count strictly increases;
//      retried decisions with one request id apply exactly once.
//  12. dashboard view-model values equal the report-JSON fields for a
//      fixed synthetic run (snapshot comparison).
//
// The suite generates a planted-slang corpus, boots `serve` in a child
// process and talks to it over HTTP exactly as the console does.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, newRequestId } from "../src/api.js";
import { clusterMap, networkSummary, temporalSeries } from "../src/dashboards.js";
import { renderBarChart, renderQueue } from "../src/render.js";
import { ReviewQueue } from "../src/queue.js";
import type { GeoReport, NetworkReport, TemporalReport } from "../src/types.js";

const PY = process.env.PYTHON ?? "python3";
const PORT = 8400 + Math.floor(Math.random() * 400);
const BASE = `http://127.0.0.1:${PORT}`;

const GENERATOR_SPEC = {
  n_drug_users: 30,
  n_nondrug_users: 15,
  posts_per_user: 8,
  planted_slang: [{ tag: "newslang", fraction: 0.25, extra_posts: 24 }],
  planted_pages: [
    { page_id: "elboglass", fraction: 0.4 },
    { page_id: "saltglass", fraction: 0.2 },
  ],
  geo_fraction: 0.6,
  geo_clusters: [
    { lat: 33.74, lon: -118.26, sigma_m: 40.0, category: "residential" },
    { lat: 33.8, lon: -118.2, sigma_m: 40.0, category: "club" },
  ],
};

let workDir = "";
let server: ChildProcess | null = null;
let api: ApiClient;
let runConfig: Record<string, unknown>;

function cli(args: string[]): void {
  const proc = spawnSync(PY, ["-m", "hashmine.service.cli", ...args], {
    cwd: workDir,
    encoding: "utf-8",
  });
  if (proc.status !== 0) {
    throw new Error(`cli ${args[0]} failed: ${proc.stderr}`);
  }
}

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const response = await fetch(`${BASE}/api/lexicon`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error("service never came up");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "console-e2e-"));
  writeFileSync(join(workDir, "spec.json"), JSON.stringify(GENERATOR_SPEC));
  cli(["synth", "--spec", "spec.json", "--seed", "77", "--out-dir", "data"]);
  cli(["ingest", "--corpus", "data/corpus.jsonl", "--store", "store"]);
  runConfig = {
    follows_path: join(workDir, "data/follows.csv"),
    nodes_path: join(workDir, "data/nodes.jsonl"),
    faces_path: join(workDir, "data/faces.jsonl"),
    geocoder_path: join(workDir, "data/geocoder.jsonl"),
  };
  server = spawn(
    PY,
    ["-m", "hashmine.service.cli", "serve", "--store", "store", "--port", String(PORT)],
    { cwd: workDir, stdio: "ignore" },
  );
  await waitForService();
  api = new ApiClient(BASE);
}, 120_000);

afterAll(() => {
  server?.kill();
});

describe("console loop against a live service", () => {
  let firstRunDrugPosts = 0;
  let runId = "";

  it("triggers a run and sees the planted candidate in the queue", async () => {
    const run = await api.postRun("corpus", runConfig, newRequestId());
    expect(run.status).toBe("done");
    runId = run.run_id;
    firstRunDrugPosts = run.metrics.classify!.drug_posts;
    expect(firstRunDrugPosts).toBeGreaterThan(0);

    const queue = new ReviewQueue(api);
    const state = await queue.refresh();
    expect(state.lexiconVersion).toBe(1);
    expect(state.cards.map((c) => c.term)).toEqual(["newslang"]);
    const card = state.cards[0]!;
    expect(card.support).toBeGreaterThanOrEqual(0.2);
    expect(card.run_id).toBe(runId);
    expect(card.samples.length).toBeGreaterThan(0);
    expect(renderQueue(state)).toContain('data-term="newslang"');
  });

  it("accept bumps the version badge, removes the card, applies exactly once under retry", async () => {
    const queue = new ReviewQueue(api);
    await queue.refresh();
    const requestId = newRequestId();

    const first = await api.postDecision("newslang", "accept", "weed", requestId);
    expect(first.replayed).toBe(false);
    expect(first.lexicon_version).toBe(2);

    // a console retry with the same request id must not double-apply
    const replay = await api.postDecision("newslang", "accept", "weed", requestId);
    expect(replay.replayed).toBe(true);
    expect(replay.lexicon_version).toBe(2);

    const state = await queue.refresh();
    expect(state.lexiconVersion).toBe(2); // badge increments
    expect(state.cards).toEqual([]); // card left the queue
    expect(renderQueue(state)).toContain("no pending candidates");

    const accepted = await api.getLexicon("accepted");
    expect(accepted.terms.map((t) => t.text)).toEqual(["newslang"]);
  });

  it("the next triggered run strictly increases the drug-post count", async () => {
    const rerun = await api.postRun("corpus", runConfig, newRequestId());
    expect(rerun.status).toBe("done");
    expect(rerun.run_id).not.toBe(runId);
    expect(rerun.metrics.classify!.drug_posts).toBeGreaterThan(firstRunDrugPosts);
  });

  it("dashboard values equal the report fields (snapshot comparison)", async () => {
    const temporal = await api.getReport<TemporalReport>(runId, "temporal");
    const [hourAll] = temporalSeries(temporal, "hour");
    expect(hourAll!.values).toEqual(temporal.hour.all!.bins);
    expect(hourAll!.peakMarkers).toEqual(temporal.hour.all!.peaks ?? []);
    // markers are drawn in bin order; the report lists peaks by height
    const svg = renderBarChart(hourAll!);
    const markerBins = [...svg.matchAll(/data-bin="(\d+)"/g)].map((m) => Number(m[1]));
    expect(markerBins).toEqual([...(temporal.hour.all!.peaks ?? [])].sort((a, b) => a - b));

    const [geojson, geo] = await Promise.all([
      api.getClustersGeoJson(runId),
      api.getReport<GeoReport>(runId, "geo"),
    ]);
    const map = clusterMap(geojson, geo.venues?.shares_percent ?? null);
    expect(map.points.length).toBe(geo.clusters.length);
    expect(map.points.length).toBe(geojson.features.length);

    const network = await api.getReport<NetworkReport>(runId, "network");
    const summary = networkSummary(network);
    const grid = summary.drugRows.find((r) => r.group === "drug_user_group")!;
    const reported = network.drug.groups.drug_user_group!;
    expect(grid.avgIn).toBe(reported.avg_in);
    expect(grid.avgOut).toBe(reported.avg_out);
    expect(grid.avgTotalDegree).toBe(reported.avg_total_degree);
    expect(grid.inOutRatio).toBe(reported.in_out_ratio);
    expect(summary.triangles[0]!.count).toBe(network.drug.triangles);

    // provenance: every rendered number came from a payload of this run
    expect(temporal.run_id).toBe(runId);
    expect(geo.run_id).toBe(runId);
    expect(network.run_id).toBe(runId);
  });
});
