// Per-domain attribution bars. Bar lengths are proportional to the
// normalized Shapley shares; the labels print the API values as-is and the
// footer echoes the report's own normalized exposure rather than a client
// side sum, so every number on screen traces to a response field.

import { escapeHtml, fmt } from "../format.js";
import type { AttributionPayload } from "../types.js";

export function renderDomainBars(
  attribution: AttributionPayload,
  normalizedExposure: number,
): string {
  const entries = Object.entries(attribution.normalized_phi).sort(([a], [b]) =>
    a.localeCompare(b),
  );
  if (entries.length === 0) {
    return `<div class="bars-empty">no domains in this snapshot</div>`;
  }
  const peak = Math.max(...entries.map(([, v]) => v), 1e-12);

  const rows = entries
    .map(([domain, share]) => {
      const width = Math.max(0, (share / peak) * 100);
      const se = attribution.standard_errors?.[domain];
      const seLabel = se === undefined ? "" : ` <span class="bar-se">&plusmn;${fmt(se, 4)}</span>`;
      return [
        `<div class="bar-row" data-domain="${escapeHtml(domain)}">`,
        `<span class="bar-name">${escapeHtml(domain)}</span>`,
        `<span class="bar-track"><span class="bar-fill" style="width:${width.toFixed(1)}%"></span></span>`,
        `<span class="bar-value">${fmt(share, 4)}${seLabel}</span>`,
        `</div>`,
      ].join("");
    })
    .join("");

  const method = attribution.method === "monte_carlo"
    ? `sampled (${attribution.permutations_sampled ?? "?"} permutations)`
    : attribution.method;

  return [
    `<div class="bars">`,
    rows,
    `<div class="bars-footer">shares sum to E&#770;(D) = ${fmt(normalizedExposure, 4)} &middot; ${escapeHtml(method)}</div>`,
    `</div>`,
  ].join("");
}
