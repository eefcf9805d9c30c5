// Thin typed client over the service API.  Mutations carry a
// client-generated request id; retrying with the same id is safe because
// the service replays the stored response instead of acting twice.

import type {
  CandidatesResponse,
  Category,
  DecisionResponse,
  GeoJson,
  LexiconResponse,
  RunListResponse,
  RunResponse,
  Verdict,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

export function newRequestId(): string {
  if (typeof crypto !== "undefined" && "randomUUID" in crypto) {
    return crypto.randomUUID();
  }
  return `req-${Date.now()}-${Math.floor(Math.random() * 1e9)}`;
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`);
    if (!response.ok) {
      throw new ApiError(response.status, await response.text());
    }
    return (await response.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await response.text());
    }
    return (await response.json()) as T;
  }

  getLexicon(status?: string): Promise<LexiconResponse> {
    const query = status ? `?status=${encodeURIComponent(status)}` : "";
    return this.get(`/api/lexicon${query}`);
  }

  getCandidates(): Promise<CandidatesResponse> {
    return this.get("/api/candidates");
  }

  postDecision(
    term: string,
    verdict: Verdict,
    category: Category | null,
    requestId: string,
  ): Promise<DecisionResponse> {
    return this.post(`/api/candidates/${encodeURIComponent(term)}/decision`, {
      verdict,
      category,
      request_id: requestId,
    });
  }

  postRun(
    corpusRef: string,
    config: Record<string, unknown> | null,
    requestId: string,
  ): Promise<RunResponse> {
    return this.post("/api/runs", {
      corpus_ref: corpusRef,
      config,
      request_id: requestId,
    });
  }

  listRuns(): Promise<RunListResponse> {
    return this.get("/api/runs");
  }

  getRun(runId: string): Promise<Record<string, unknown>> {
    return this.get(`/api/runs/${encodeURIComponent(runId)}`);
  }

  getReport<T>(runId: string, kind: string): Promise<T> {
    return this.get(`/api/reports/${encodeURIComponent(runId)}/${kind}`);
  }

  getClustersGeoJson(runId: string): Promise<GeoJson> {
    return this.get(`/api/geo/${encodeURIComponent(runId)}/clusters.geojson`);
  }
}
