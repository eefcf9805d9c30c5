// Console bootstrap: wires the review queue and the per-run dashboards
// to the service API.  Single analyst session; every mutation goes out
// with a request id and the UI refreshes from the server's answer.

import { ApiClient, newRequestId } from "./api.js";
import {
  clusterMap,
  networkSummary,
  popularityBars,
  temporalSeries,
} from "./dashboards.js";
import { ReviewQueue } from "./queue.js";
import {
  renderBarChart,
  renderClusterMap,
  renderError,
  renderPopularity,
  renderQueue,
  renderStatsGrid,
  renderVersionBadge,
} from "./render.js";
import type {
  Category,
  GeoReport,
  NetworkReport,
  PopularityReport,
  TemporalReport,
  Verdict,
} from "./types.js";

const api = new ApiClient("..");
const queue = new ReviewQueue(api);

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

async function refreshQueue(): Promise<void> {
  try {
    const state = await queue.refresh();
    el("version").innerHTML = renderVersionBadge(state.lexiconVersion);
    el("queue").innerHTML = renderQueue(state);
  } catch (error) {
    el("queue").innerHTML = renderError(String(error));
  }
}

async function refreshRunList(selected?: string): Promise<void> {
  const { runs } = await api.listRuns();
  const select = el("run-select") as HTMLSelectElement;
  select.innerHTML = runs
    .map(
      (run) =>
        `<option value="${run.run_id}">${run.run_id} (${run.status}, lexicon v${run.lexicon_version})</option>`,
    )
    .join("");
  if (runs.length > 0) {
    select.value = selected ?? runs[runs.length - 1]!.run_id;
    await showDashboards(select.value);
  }
}

async function showDashboards(runId: string): Promise<void> {
  const panel = el("dashboards");
  const sections: string[] = [];
  const load = async (title: string, build: () => Promise<string>) => {
    try {
      sections.push(`<section><h3>${title}</h3>${await build()}</section>`);
    } catch {
      sections.push(`<section><h3>${title}</h3><div class="placeholder">no ${title} report</div></section>`);
    }
  };

  await load("popularity", async () => {
    const report = await api.getReport<PopularityReport>(runId, "popularity");
    return renderPopularity(popularityBars(report));
  });
  await load("temporal", async () => {
    const report = await api.getReport<TemporalReport>(runId, "temporal");
    const hour = temporalSeries(report, "hour").map((s) => renderBarChart(s)).join("");
    const weekday = temporalSeries(report, "weekday").map((s) => renderBarChart(s)).join("");
    return `<div class="charts">${hour}</div><div class="charts">${weekday}</div>`;
  });
  await load("geo clusters", async () => {
    const [geojson, geo] = await Promise.all([
      api.getClustersGeoJson(runId),
      api.getReport<GeoReport>(runId, "geo"),
    ]);
    return renderClusterMap(clusterMap(geojson, geo.venues?.shares_percent ?? null));
  });
  await load("network", async () => {
    const report = await api.getReport<NetworkReport>(runId, "network");
    return renderStatsGrid(networkSummary(report));
  });
  panel.innerHTML = sections.join("\n");
}

function wireQueueActions(): void {
  el("queue").addEventListener("click", (event) => {
    const button = (event.target as HTMLElement).closest("button");
    if (!button) return;
    const card = button.closest("article.card") as HTMLElement | null;
    if (!card) return;
    const term = card.dataset.term!;
    const verdict = button.dataset.verdict as Verdict;
    const select = card.querySelector("select.category") as HTMLSelectElement;
    const category = verdict === "accept" ? (select.value as Category) : null;
    void queue
      .decide(term, verdict, category)
      .then(async () => {
        el("version").innerHTML = renderVersionBadge(queue.state.lexiconVersion);
        el("queue").innerHTML = renderQueue(queue.state);
      })
      .catch(() => {
        el("queue").innerHTML = renderError(queue.state.error ?? "decision failed") + renderQueue(queue.state);
      });
  });
}

function wireRunControls(): void {
  (el("run-select") as HTMLSelectElement).addEventListener("change", (event) => {
    void showDashboards((event.target as HTMLSelectElement).value);
  });
  el("trigger-run").addEventListener("click", () => {
    const corpusRef = (el("corpus-ref") as HTMLInputElement).value.trim();
    if (!corpusRef) return;
    el("run-status").textContent = "running...";
    void api
      .postRun(corpusRef, null, newRequestId())
      .then(async (run) => {
        el("run-status").textContent = `${run.run_id}: ${run.status}`;
        await refreshRunList(run.run_id);
        await refreshQueue();
      })
      .catch((error) => {
        el("run-status").textContent = String(error);
      });
  });
}

async function start(): Promise<void> {
  wireQueueActions();
  wireRunControls();
  await refreshQueue();
  await refreshRunList();
}

if (typeof document !== "undefined") {
  void start();
}
