// View models: report JSON in, renderable series out.  Values pass
// through untouched (charts show the API's numbers); the only arithmetic
// here is presentation geometry (pixel scaling).

import type {
  CohortNetworkDoc,
  GeoJson,
  HistogramDoc,
  NetworkReport,
  PopularityReport,
  TemporalReport,
} from "./types.js";

export interface BarSeries {
  title: string;
  labels: string[];
  values: number[];
  peakMarkers: number[]; // bin indices flagged by the service
  total: number;
}

const WEEKDAYS = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"];

export function histogramSeries(title: string, doc: HistogramDoc): BarSeries {
  const labels =
    doc.mode === "hour" ? doc.bins.map((_, hour) => String(hour)) : WEEKDAYS.slice();
  return {
    title,
    labels,
    values: doc.bins.slice(),
    peakMarkers: (doc.peaks ?? []).slice(),
    total: doc.total,
  };
}

export function temporalSeries(report: TemporalReport, mode: "hour" | "weekday"): BarSeries[] {
  const section = mode === "hour" ? report.hour : report.weekday;
  const order = ["all", "weed", "syrup", "pills"];
  return order
    .filter((key) => section[key] !== undefined)
    .map((key) => histogramSeries(key, section[key] as HistogramDoc));
}

export interface PopularityBar {
  klass: string;
  mined: number;
  survey: number | null;
}

export function popularityBars(report: PopularityReport): PopularityBar[] {
  return Object.keys(report.counts)
    .sort()
    .map((klass) => ({
      klass,
      mined: report.counts[klass] as number,
      survey: report.survey_comparison ? (report.survey_comparison[klass] ?? null) : null,
    }));
}

export interface StatsRow {
  group: string;
  avgIn: number;
  avgOut: number;
  avgTotalDegree: number;
  inOutRatio: number | null;
}

export function statsGrid(cohort: CohortNetworkDoc): StatsRow[] {
  return Object.entries(cohort.groups)
    .filter((entry): entry is [string, NonNullable<(typeof entry)[1]>] => entry[1] !== null)
    .map(([group, stats]) => ({
      group,
      avgIn: stats.avg_in,
      avgOut: stats.avg_out,
      avgTotalDegree: stats.avg_total_degree,
      inOutRatio: stats.in_out_ratio,
    }));
}

export interface NetworkSummary {
  table2: { cohort: string; nodes: number; edges: number }[];
  drugRows: StatsRow[];
  nondrugRows: StatsRow[];
  triangles: { cohort: string; count: number; hub: string | null }[];
  topAccounts: { cohort: string; accounts: string[] }[];
}

export function networkSummary(report: NetworkReport): NetworkSummary {
  return {
    table2: Object.entries(report.table2).map(([cohort, doc]) => ({
      cohort,
      nodes: doc.n_nodes,
      edges: doc.n_edges,
    })),
    drugRows: statsGrid(report.drug),
    nondrugRows: statsGrid(report.nondrug),
    triangles: [
      { cohort: "drug", count: report.drug.triangles, hub: report.drug.triangle_hub },
      { cohort: "nondrug", count: report.nondrug.triangles, hub: report.nondrug.triangle_hub },
    ],
    topAccounts: [
      { cohort: "drug", accounts: report.drug.top_in_degree.map((e) => e.account) },
      { cohort: "nondrug", accounts: report.nondrug.top_in_degree.map((e) => e.account) },
    ],
  };
}

export interface MapPoint {
  lat: number;
  lon: number;
  size: number;
  category: string;
  x: number; // [0, 1] plot coordinates (plain coordinate plot, no tiles)
  y: number;
}

export interface ClusterMap {
  points: MapPoint[];
  legend: { category: string; share: number | null; count: number }[];
}

export function clusterMap(
  geojson: GeoJson,
  shares: Record<string, number> | null = null,
): ClusterMap {
  const points = geojson.features.map((feature) => {
    const [lon, lat] = feature.geometry.coordinates;
    return {
      lat,
      lon,
      size: feature.properties.size,
      category: feature.properties.venue_category ?? "uncategorized",
      x: 0,
      y: 0,
    };
  });
  if (points.length > 0) {
    const lats = points.map((p) => p.lat);
    const lons = points.map((p) => p.lon);
    const latSpan = Math.max(Math.max(...lats) - Math.min(...lats), 1e-9);
    const lonSpan = Math.max(Math.max(...lons) - Math.min(...lons), 1e-9);
    for (const p of points) {
      p.x = (p.lon - Math.min(...lons)) / lonSpan;
      p.y = 1 - (p.lat - Math.min(...lats)) / latSpan;
    }
  }
  const counts = new Map<string, number>();
  for (const p of points) {
    counts.set(p.category, (counts.get(p.category) ?? 0) + 1);
  }
  const legend = [...counts.entries()]
    .sort((a, b) => b[1] - a[1])
    .map(([category, count]) => ({
      category,
      share: shares ? (shares[category] ?? null) : null,
      count,
    }));
  return { points, legend };
}
