import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, newRequestId } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("sends decisions with the supplied request id", async () => {
    const calls: { url: string; body: unknown }[] = [];
    const api = new ApiClient("", async (url, init) => {
      calls.push({ url, body: JSON.parse(String(init?.body)) });
      return jsonResponse({
        lexicon_version: 2,
        run_id: null,
        term: { text: "newslang", status: "accepted" },
        replayed: false,
      });
    });
    const response = await api.postDecision("newslang", "accept", "weed", "req-9");
    expect(response.lexicon_version).toBe(2);
    expect(calls).toHaveLength(1);
    expect(calls[0]!.url).toBe("/api/candidates/newslang/decision");
    expect(calls[0]!.body).toEqual({
      verdict: "accept",
      category: "weed",
      request_id: "req-9",
    });
  });

  it("raises ApiError with status on failure", async () => {
    const api = new ApiClient("", async () => jsonResponse({ detail: "nope" }, 409));
    await expect(api.postDecision("kush", "reject", null, "r1")).rejects.toMatchObject({
      status: 409,
    });
    await expect(api.getLexicon()).rejects.toBeInstanceOf(ApiError);
  });

  it("encodes run and report paths", async () => {
    const urls: string[] = [];
    const api = new ApiClient("http://h", async (url) => {
      urls.push(url);
      return jsonResponse({});
    });
    await api.getReport("r123", "popularity");
    await api.getClustersGeoJson("r123");
    await api.getLexicon("pending");
    expect(urls).toEqual([
      "http://h/api/reports/r123/popularity",
      "http://h/api/geo/r123/clusters.geojson",
      "http://h/api/lexicon?status=pending",
    ]);
  });

  it("generates distinct request ids", () => {
    const ids = new Set(Array.from({ length: 50 }, () => newRequestId()));
    expect(ids.size).toBe(50);
  });
});
