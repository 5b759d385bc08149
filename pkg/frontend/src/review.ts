/**
 * Review board state: the client-side view model for the review queue.
 *
 * Decisions are optimistic: a card flips to "decided" the moment the analyst
 * clicks, and rolls back to a conflict banner if the server reports that
 * someone else got there first. The state machine guarantees at most one
 * decision POST per card, no matter how fast the clicks come.
 */

import type { ApiClient } from "./api.js";
import { ApiRequestError } from "./api.js";
import type { ReviewPayload, VerdictPayload } from "./types.js";

export type CardState = "pending" | "posting" | "decided" | "conflict";

export interface ReviewCard {
  reviewId: string;
  itemId: string;
  source: string;
  target: string;
  relation: string;
  routedReason: string;
  llmVerdicts: VerdictPayload[];
  ruleVerdict: VerdictPayload | null;
  graphVersion: string;
  state: CardState;
  decision: "approve" | "reject" | null;
  decidedBy: string | null;
  banner: string | null;
}

export function cardFromPayload(payload: ReviewPayload): ReviewCard {
  return {
    reviewId: payload.review_id,
    itemId: payload.item_id,
    source: payload.source,
    target: payload.target,
    relation: payload.relation,
    routedReason: payload.routed_reason,
    llmVerdicts: payload.llm_verdicts,
    ruleVerdict: payload.rule_verdict,
    graphVersion: payload.graph_version,
    state: "pending",
    decision: null,
    decidedBy: null,
    banner: null,
  };
}

// terminal = no further decision can be posted from this card
export function isTerminal(card: ReviewCard): boolean {
  return card.state === "decided" || card.state === "conflict";
}

export class ReviewBoard {
  private cards = new Map<string, ReviewCard>();
  private order: string[] = [];

  /** Merge a fresh queue listing, preserving local in-progress/terminal cards. */
  sync(payloads: ReviewPayload[]): void {
    const fresh = new Map(payloads.map((p) => [p.review_id, p]));
    const nextOrder: string[] = [];

    for (const payload of payloads) {
      const existing = this.cards.get(payload.review_id);
      if (existing === undefined) {
        this.cards.set(payload.review_id, cardFromPayload(payload));
      }
      // a card we already track keeps its local state; the server list is
      // only authoritative about membership
      nextOrder.push(payload.review_id);
    }

    // locally terminal or in-flight cards that fell off the server list stay
    // visible until the next sync after they settle; plain pending ones drop
    for (const id of this.order) {
      const card = this.cards.get(id);
      if (card === undefined || fresh.has(id)) continue;
      if (card.state === "posting" || isTerminal(card)) {
        nextOrder.push(id);
      } else {
        this.cards.delete(id);
      }
    }
    this.order = nextOrder;
  }

  list(): ReviewCard[] {
    return this.order
      .map((id) => this.cards.get(id))
      .filter((c): c is ReviewCard => c !== undefined);
  }

  get(reviewId: string): ReviewCard | undefined {
    return this.cards.get(reviewId);
  }

  pendingCount(): number {
    return this.list().filter((c) => c.state === "pending").length;
  }

  /**
   * Post a decision for one card. Returns false when the card is not in a
   * state that accepts a decision (already posting or terminal), which is
   * what makes duplicate clicks and conflict storms harmless.
   */
  async decide(
    api: ApiClient,
    reviewId: string,
    decision: "approve" | "reject",
    reviewer: string,
  ): Promise<boolean> {
    const card = this.cards.get(reviewId);
    if (card === undefined || card.state !== "pending") return false;

    card.state = "posting";
    card.decision = decision;
    card.decidedBy = reviewer;
    card.banner = null;
    try {
      await api.decide(reviewId, decision, reviewer);
      card.state = "decided";
      return true;
    } catch (err) {
      if (err instanceof ApiRequestError && err.code === "conflict") {
        // someone else decided first: roll back our optimistic decision and
        // surface the server's message ("already decided by <reviewer>")
        card.state = "conflict";
        card.decision = null;
        card.decidedBy = null;
        card.banner = err.message;
      } else {
        // transient failure: the card goes back to pending and can be retried
        card.state = "pending";
        card.decision = null;
        card.decidedBy = null;
        card.banner = err instanceof Error ? err.message : String(err);
      }
      return false;
    }
  }
}
