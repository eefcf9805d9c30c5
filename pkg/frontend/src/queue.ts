// Review-queue state: cards mirror the API payload and ordering
// (support-descending); a decision allocates one request id that is
// reused across retries so the effect is exactly-once even when the
// network flakes mid-flight.

import { ApiClient, newRequestId } from "./api.js";
import type { CandidateCard, Category, DecisionResponse, Verdict } from "./types.js";

export interface QueueState {
  lexiconVersion: number;
  cards: CandidateCard[];
  error: string | null;
}

export class ReviewQueue {
  state: QueueState = { lexiconVersion: 0, cards: [], error: null };
  private pendingRequestIds = new Map<string, string>(); // term -> request id

  constructor(
    private api: ApiClient,
    private makeRequestId: () => string = newRequestId,
  ) {}

  async refresh(): Promise<QueueState> {
    const response = await this.api.getCandidates();
    this.state = {
      lexiconVersion: response.lexicon_version,
      cards: response.candidates,
      error: null,
    };
    return this.state;
  }

  /** Accept requires a category; reject/ban must not carry one. */
  async decide(
    term: string,
    verdict: Verdict,
    category: Category | null = null,
    maxRetries = 2,
  ): Promise<DecisionResponse> {
    if (verdict === "accept" && category === null) {
      throw new Error("accept requires a category");
    }
    if (verdict !== "accept" && category !== null) {
      throw new Error(`${verdict} does not take a category`);
    }
    let requestId = this.pendingRequestIds.get(term);
    if (requestId === undefined) {
      requestId = this.makeRequestId();
      this.pendingRequestIds.set(term, requestId);
    }
    let lastError: unknown = null;
    for (let attempt = 0; attempt <= maxRetries; attempt++) {
      try {
        const response = await this.api.postDecision(term, verdict, category, requestId);
        this.pendingRequestIds.delete(term);
        this.state = {
          lexiconVersion: response.lexicon_version,
          cards: this.state.cards.filter((card) => card.term !== term),
          error: null,
        };
        return response;
      } catch (error) {
        lastError = error;
      }
    }
    this.state = { ...this.state, error: `decision on ${term} failed; will retry` };
    throw lastError;
  }
}
