// HTML-string renderers.  Pure functions of view-model data so the
// dashboard output is testable without a browser; main.ts injects the
// strings and wires events by delegation.

import type { BarSeries, ClusterMap, PopularityBar, NetworkSummary } from "./dashboards.js";
import type { QueueState } from "./queue.js";
import { CATEGORIES, type CandidateCard } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const fmt = (value: number | null): string =>
  value === null ? "–" : Number.isInteger(value) ? String(value) : value.toFixed(2);

export function renderVersionBadge(version: number): string {
  return `<span class="badge" id="lexicon-version" data-version="${version}">lexicon v${version}</span>`;
}

export function renderQueue(state: QueueState): string {
  if (state.cards.length === 0) {
    return `<div class="empty" id="queue-empty">no pending candidates</div>`;
  }
  return state.cards.map(renderCard).join("\n");
}

export function renderCard(card: CandidateCard): string {
  const support =
    card.support === null ? "–" : `${(card.support * 100).toFixed(1)}%`;
  const chips = card.cooccurring
    .slice(0, 5)
    .map(
      (co) =>
        `<span class="chip">${escapeHtml(co.term)} ${(co.support * 100).toFixed(1)}%</span>`,
    )
    .join(" ");
  const samples = card.samples
    .slice(0, 3)
    .map(
      (s) =>
        `<li><code>${escapeHtml(s.caption)}</code> <small>#${s.hashtags.map(escapeHtml).join(" #")}</small></li>`,
    )
    .join("\n");
  const options = CATEGORIES.map(
    (c) => `<option value="${c}">${c}</option>`,
  ).join("");
  return `
<article class="card" data-term="${escapeHtml(card.term)}">
  <header><strong>#${escapeHtml(card.term)}</strong>
    <span class="support">support ${support}</span>
    <small class="run">from ${escapeHtml(card.run_id ?? "?")}</small>
  </header>
  <div class="cooccurring">${chips || "<em>no co-occurring accepted terms</em>"}</div>
  <ul class="samples">${samples || "<li><em>no samples</em></li>"}</ul>
  <footer>
    <select class="category">${options}</select>
    <button class="accept" data-verdict="accept">accept</button>
    <button class="reject" data-verdict="reject">reject</button>
    <button class="ban" data-verdict="ban">ban</button>
  </footer>
</article>`;
}

export function renderBarChart(series: BarSeries, width = 480, height = 140): string {
  const n = series.values.length || 1;
  const peak = Math.max(...series.values, 1);
  const barWidth = width / n;
  const bars = series.values
    .map((value, i) => {
      const h = (value / peak) * (height - 24);
      const x = i * barWidth;
      const isPeak = series.peakMarkers.includes(i);
      const bar = `<rect class="bar${isPeak ? " peak" : ""}" x="${x.toFixed(1)}" y="${(
        height - 12 - h
      ).toFixed(1)}" width="${(barWidth - 2).toFixed(1)}" height="${h.toFixed(1)}"><title>${
        series.labels[i]
      }: ${value}</title></rect>`;
      const marker = isPeak
        ? `<text class="peak-marker" data-bin="${i}" x="${(x + barWidth / 2).toFixed(1)}" y="${(
            height - 16 - h
          ).toFixed(1)}" text-anchor="middle">▲</text>`
        : "";
      return bar + marker;
    })
    .join("");
  const labels = series.labels
    .map((label, i) =>
      n <= 7 || i % 4 === 0
        ? `<text class="axis" x="${(i * barWidth + barWidth / 2).toFixed(1)}" y="${height - 2}" text-anchor="middle">${label}</text>`
        : "",
    )
    .join("");
  return `<figure class="chart" data-series="${escapeHtml(series.title)}" data-total="${series.total}">
  <figcaption>${escapeHtml(series.title)} (n=${series.total})</figcaption>
  <svg viewBox="0 0 ${width} ${height}" width="${width}" height="${height}">${bars}${labels}</svg>
</figure>`;
}

export function renderPopularity(bars: PopularityBar[]): string {
  const peak = Math.max(...bars.map((b) => Math.max(b.mined, b.survey ?? 0)), 1);
  const rows = bars
    .map((b) => {
      const minedPct = ((b.mined / peak) * 100).toFixed(1);
      const surveyPct = b.survey === null ? null : ((b.survey / peak) * 100).toFixed(1);
      return `<div class="pop-row" data-class="${b.klass}" data-mined="${b.mined}">
  <span class="pop-label">${b.klass}</span>
  <div class="pop-bars">
    <div class="pop-bar mined" style="width:${minedPct}%">${b.mined}</div>
    ${surveyPct === null ? "" : `<div class="pop-bar survey" style="width:${surveyPct}%">${fmt(b.survey)}</div>`}
  </div>
</div>`;
    })
    .join("\n");
  return `<div class="popularity">${rows}</div>`;
}

export function renderStatsGrid(summary: NetworkSummary): string {
  const section = (title: string, rows: typeof summary.drugRows) => `
<table class="stats" data-cohort="${title}">
  <caption>${title}</caption>
  <thead><tr><th>group</th><th>avg in</th><th>avg out</th><th>avg total</th><th>in/out</th></tr></thead>
  <tbody>
    ${rows
      .map(
        (r) => `<tr data-group="${escapeHtml(r.group)}">
      <td>${escapeHtml(r.group)}</td>
      <td class="avg-in">${fmt(r.avgIn)}</td>
      <td class="avg-out">${fmt(r.avgOut)}</td>
      <td class="avg-total">${fmt(r.avgTotalDegree)}</td>
      <td class="ratio">${fmt(r.inOutRatio)}</td>
    </tr>`,
      )
      .join("\n")}
  </tbody>
</table>`;
  const table2 = summary.table2
    .map((t) => `<tr><td>${t.cohort}</td><td>${t.nodes}</td><td>${t.edges}</td></tr>`)
    .join("");
  const triangles = summary.triangles
    .map(
      (t) =>
        `<tr data-cohort="${t.cohort}"><td>${t.cohort}</td><td class="triangle-count">${t.count}</td><td>${escapeHtml(t.hub ?? "–")}</td></tr>`,
    )
    .join("");
  const topAccounts = summary.topAccounts
    .map(
      (t) =>
        `<tr data-cohort="${t.cohort}"><td>${t.cohort}</td><td class="accounts">${t.accounts
          .map(escapeHtml)
          .join(", ")}</td></tr>`,
    )
    .join("");
  return `
<table class="table2"><caption>network sizes</caption>
  <thead><tr><th>cohort</th><th>nodes</th><th>edges</th></tr></thead><tbody>${table2}</tbody></table>
${section("drug", summary.drugRows)}
${section("nondrug", summary.nondrugRows)}
<table class="triangles"><caption>triangles</caption>
  <thead><tr><th>cohort</th><th>3-cycles</th><th>hub</th></tr></thead><tbody>${triangles}</tbody></table>
<table class="top-accounts"><caption>top in-degree accounts</caption>
  <thead><tr><th>cohort</th><th>accounts</th></tr></thead><tbody>${topAccounts}</tbody></table>`;
}

export function renderClusterMap(map: ClusterMap, size = 420): string {
  const colors: Record<string, string> = {
    residential: "#4c78a8",
    club: "#f58518",
    restaurant: "#54a24b",
    other: "#b279a2",
    uncategorized: "#9d9d9d",
  };
  const points = map.points
    .map((p) => {
      const r = Math.max(4, Math.min(16, Math.sqrt(p.size)));
      const color = colors[p.category] ?? "#9d9d9d";
      return `<circle class="cluster" data-category="${escapeHtml(p.category)}" cx="${(
        20 + p.x * (size - 40)
      ).toFixed(1)}" cy="${(20 + p.y * (size - 40)).toFixed(1)}" r="${r.toFixed(1)}" fill="${color}">
  <title>${p.size} posts @ (${p.lat.toFixed(4)}, ${p.lon.toFixed(4)}) — ${p.category}</title>
</circle>`;
    })
    .join("\n");
  const legend = map.legend
    .map(
      (entry) =>
        `<li data-category="${escapeHtml(entry.category)}"><span class="swatch" style="background:${
          colors[entry.category] ?? "#9d9d9d"
        }"></span>${escapeHtml(entry.category)}: ${entry.count}${
          entry.share === null ? "" : ` (${entry.share.toFixed(1)}%)`
        }</li>`,
    )
    .join("\n");
  return `<div class="cluster-map" data-count="${map.points.length}">
<svg viewBox="0 0 ${size} ${size}" width="${size}" height="${size}">${points}</svg>
<ul class="legend">${legend}</ul>
</div>`;
}

export function renderError(message: string): string {
  return `<div class="error" role="alert">${escapeHtml(message)}</div>`;
}
