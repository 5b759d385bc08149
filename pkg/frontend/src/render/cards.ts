// Review queue cards: the full context an analyst needs to call an edge,
// with decision buttons that go inert once the card is terminal.

import { edgeLabel, escapeHtml, fmt } from "../format.js";
import type { ReviewCard } from "../review.js";
import { isTerminal } from "../review.js";
import type { VerdictPayload } from "../types.js";

function renderVerdict(verdict: VerdictPayload, label: string): string {
  const stance = verdict.valid ? "valid" : "invalid";
  return [
    `<li class="verdict verdict-${stance}">`,
    `<span class="verdict-label">${escapeHtml(label)}</span>`,
    `<span class="verdict-stance">${stance}</span>`,
    `<span class="verdict-conf">conf ${fmt(verdict.confidence, 2)}</span>`,
    `<span class="verdict-reason">${escapeHtml(verdict.reasoning)}</span>`,
    `</li>`,
  ].join("");
}

export function renderCard(card: ReviewCard): string {
  const disabled = card.state !== "pending" ? " disabled" : "";
  const votes = card.llmVerdicts
    .map((v, i) => renderVerdict(v, `vote ${i + 1}`))
    .join("");
  const rule = card.ruleVerdict === null ? "" : renderVerdict(card.ruleVerdict, "rule");

  let stateLine = "";
  if (card.state === "decided") {
    stateLine = `<div class="card-state card-decided">${escapeHtml(card.decision ?? "")} by ${escapeHtml(card.decidedBy ?? "")}</div>`;
  } else if (card.state === "posting") {
    stateLine = `<div class="card-state card-posting">submitting&hellip;</div>`;
  }
  const banner = card.banner === null
    ? ""
    : `<div class="card-banner">${escapeHtml(card.banner)}</div>`;

  return [
    `<article class="card card-${card.state}" data-review-id="${escapeHtml(card.reviewId)}">`,
    `<header class="card-edge">${escapeHtml(edgeLabel(card.source, card.target, card.relation))}</header>`,
    `<div class="card-reason">${escapeHtml(card.routedReason)}</div>`,
    `<ul class="card-verdicts">${votes}${rule}</ul>`,
    banner,
    stateLine,
    `<footer class="card-actions">`,
    `<button class="btn-approve" data-decision="approve"${disabled}>approve</button>`,
    `<button class="btn-reject" data-decision="reject"${disabled}>reject</button>`,
    `</footer>`,
    `</article>`,
  ].join("");
}

export function renderQueue(cards: ReviewCard[], pendingCount: number): string {
  if (cards.length === 0) {
    return `<div class="queue-empty">review queue is empty; the pipeline has nothing contested</div>`;
  }
  const body = cards.map(renderCard).join("");
  return [
    `<div class="queue-count">${pendingCount} awaiting decision</div>`,
    `<div class="queue-cards">${body}</div>`,
  ].join("");
}

export { isTerminal };
