// API payload shapes, mirroring the service JSON verbatim.
// The console renders these fields; it never recomputes supports,
// counts or ratios on the client.

export type Verdict = "accept" | "reject" | "ban";
export type Category = "weed" | "syrup" | "pills" | "general";

export const CATEGORIES: Category[] = ["weed", "syrup", "pills", "general"];

export interface TermDoc {
  text: string;
  category: Category;
  status: "seed" | "pending" | "accepted" | "rejected" | "banned";
  support_at_proposal: number | null;
  version_added: number;
}

export interface LexiconResponse {
  lexicon_version: number;
  run_id: string | null;
  terms: TermDoc[];
}

export interface CoOccurrence {
  term: string;
  support: number;
}

export interface SamplePost {
  media_id: string;
  caption: string;
  hashtags: string[];
}

export interface CandidateCard {
  term: string;
  support: number | null;
  run_id: string | null;
  cooccurring: CoOccurrence[];
  samples: SamplePost[];
}

export interface CandidatesResponse {
  lexicon_version: number;
  run_id: string | null;
  candidates: CandidateCard[];
}

export interface DecisionResponse {
  lexicon_version: number;
  run_id: string | null;
  term: TermDoc;
  replayed: boolean;
}

export interface RunResponse {
  run_id: string;
  lexicon_version: number;
  status: string;
  metrics: {
    classify?: { drug_posts: number; confirmed_users: number; nondrug_users: number };
    propose?: { proposed: number; newly_pending: number };
    [key: string]: unknown;
  };
  replayed: boolean;
}

export interface RunListEntry {
  run_id: string;
  status: string;
  lexicon_version: number;
  started_at: number;
}

export interface RunListResponse {
  lexicon_version: number;
  runs: RunListEntry[];
}

export interface HistogramDoc {
  mode: "hour" | "weekday";
  bins: number[];
  total: number;
  class_filter: string | null;
  peaks?: number[];
  divergence_from_baseline?: number | null;
}

export interface TemporalReport {
  run_id: string;
  lexicon_version: number;
  n_posts: number;
  hour: Record<string, HistogramDoc>;
  weekday: Record<string, HistogramDoc>;
}

export interface PopularityReport {
  run_id: string;
  lexicon_version: number;
  counts: Record<string, number>;
  unattributed: number;
  total_drug_posts: number;
  survey_comparison: Record<string, number> | null;
}

export interface GroupStatsDoc {
  avg_in: number;
  avg_out: number;
  avg_total_degree: number;
  in_out_ratio: number | null;
  n_nodes: number;
  n_edges: number;
}

export interface CohortNetworkDoc {
  n_nodes: number;
  n_edges: number;
  groups: Record<string, GroupStatsDoc | null>;
  triangles: number;
  triangle_hub: string | null;
  top_in_degree: { account: string; in_degree: number }[];
}

export interface NetworkReport {
  run_id: string;
  lexicon_version: number;
  table2: Record<string, { n_nodes: number; n_edges: number }>;
  drug: CohortNetworkDoc;
  nondrug: CohortNetworkDoc;
}

export interface GeoReport {
  run_id: string;
  lexicon_version: number;
  n_geo_posts: number;
  clusters: {
    members: string[];
    centroid: { lat: number; lon: number };
    venue_category: string | null;
  }[];
  venues: {
    n_clusters: number;
    counts: Record<string, number>;
    shares_percent: Record<string, number>;
  } | null;
}

export interface GeoJsonFeature {
  type: "Feature";
  geometry: { type: "Point"; coordinates: [number, number] };
  properties: {
    cluster_id: number;
    size: number;
    venue_category: string | null;
    members: string[];
  };
}

export interface GeoJson {
  type: "FeatureCollection";
  features: GeoJsonFeature[];
}
