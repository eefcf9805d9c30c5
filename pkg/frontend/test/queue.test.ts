import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ReviewQueue } from "../src/queue.js";
import type { CandidateCard } from "../src/types.js";

function card(term: string, support: number): CandidateCard {
  return { term, support, run_id: "r1", cooccurring: [], samples: [] };
}

interface Recorded {
  url: string;
  body: Record<string, unknown> | null;
}

/** In-memory service double with real request-id replay semantics. */
function fakeService(initialCards: CandidateCard[]) {
  let version = 1;
  let cards = [...initialCards];
  const decided = new Map<string, unknown>(); // request_id -> response
  const calls: Recorded[] = [];
  let failNextDecisions = 0;

  const fetchImpl = async (url: string, init?: RequestInit): Promise<Response> => {
    const body = init?.body ? (JSON.parse(String(init.body)) as Record<string, unknown>) : null;
    calls.push({ url, body });
    if (url.endsWith("/api/candidates") && !init) {
      return new Response(
        JSON.stringify({ lexicon_version: version, run_id: null, candidates: cards }),
        { status: 200 },
      );
    }
    const match = url.match(/\/api\/candidates\/(.+)\/decision$/);
    if (match && body) {
      const requestId = body.request_id as string;
      if (decided.has(requestId)) {
        return new Response(JSON.stringify({ ...(decided.get(requestId) as object), replayed: true }), {
          status: 200,
        });
      }
      if (failNextDecisions > 0) {
        failNextDecisions -= 1;
        return new Response("boom", { status: 503 });
      }
      version += 1;
      cards = cards.filter((c) => c.term !== decodeURIComponent(match[1]!));
      const response = {
        lexicon_version: version,
        run_id: null,
        term: { text: match[1], status: body.verdict === "accept" ? "accepted" : "rejected" },
        replayed: false,
      };
      decided.set(requestId, response);
      return new Response(JSON.stringify(response), { status: 200 });
    }
    return new Response("not found", { status: 404 });
  };

  return {
    fetchImpl,
    calls,
    get version() {
      return version;
    },
    failNext(n: number) {
      failNextDecisions = n;
    },
  };
}

describe("ReviewQueue", () => {
  it("refresh mirrors the API queue and version", async () => {
    const service = fakeService([card("newslang", 0.25), card("another", 0.21)]);
    const queue = new ReviewQueue(new ApiClient("", service.fetchImpl));
    const state = await queue.refresh();
    expect(state.lexiconVersion).toBe(1);
    // ordering is the API's (support desc), untouched by the client
    expect(state.cards.map((c) => c.term)).toEqual(["newslang", "another"]);
  });

  it("accept requires a category pick, reject forbids one", async () => {
    const service = fakeService([card("newslang", 0.25)]);
    const queue = new ReviewQueue(new ApiClient("", service.fetchImpl));
    await queue.refresh();
    await expect(queue.decide("newslang", "accept", null)).rejects.toThrow(/category/);
    await expect(queue.decide("newslang", "reject", "weed")).rejects.toThrow(/category/);
  });

  it("successful accept removes the card and bumps the version", async () => {
    const service = fakeService([card("newslang", 0.25), card("other", 0.2)]);
    const queue = new ReviewQueue(new ApiClient("", service.fetchImpl));
    await queue.refresh();
    const response = await queue.decide("newslang", "accept", "weed");
    expect(response.replayed).toBe(false);
    expect(queue.state.lexiconVersion).toBe(2);
    expect(queue.state.cards.map((c) => c.term)).toEqual(["other"]);
  });

  it("retries reuse the same request id: exactly one decision applies", async () => {
    const service = fakeService([card("newslang", 0.25)]);
    const queue = new ReviewQueue(new ApiClient("", service.fetchImpl));
    await queue.refresh();
    service.failNext(2);
    const response = await queue.decide("newslang", "accept", "weed", 3);
    expect(response.lexicon_version).toBe(2);
    expect(service.version).toBe(2); // one bump despite three attempts

    const decisionCalls = service.calls.filter((c) => c.url.includes("/decision"));
    expect(decisionCalls).toHaveLength(3);
    const ids = new Set(decisionCalls.map((c) => c.body!.request_id));
    expect(ids.size).toBe(1);
  });

  it("keeps the same request id across a failed decide() call", async () => {
    const service = fakeService([card("newslang", 0.25)]);
    const queue = new ReviewQueue(new ApiClient("", service.fetchImpl));
    await queue.refresh();
    service.failNext(10);
    await expect(queue.decide("newslang", "accept", "weed", 1)).rejects.toBeTruthy();
    expect(queue.state.error).toMatch(/newslang/);
    service.failNext(0);
    const response = await queue.decide("newslang", "accept", "weed");
    expect(response.lexicon_version).toBe(2);
    const ids = new Set(
      service.calls.filter((c) => c.url.includes("/decision")).map((c) => c.body!.request_id),
    );
    expect(ids.size).toBe(1); // still a single id end to end
  });

  it("empty queue state is explicit", async () => {
    const service = fakeService([]);
    const queue = new ReviewQueue(new ApiClient("", service.fetchImpl));
    const state = await queue.refresh();
    expect(state.cards).toEqual([]);
  });
});
