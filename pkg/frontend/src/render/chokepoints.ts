// Chokepoint table: transit nodes ranked by how many attack paths cross
// them, as served by the chokepoints view. Rows print API fields only.

import { escapeHtml, fmt } from "../format.js";
import type { ChokepointPayload } from "../types.js";

export function renderChokepoints(rows: ChokepointPayload[]): string {
  if (rows.length === 0) {
    return `<div class="choke-empty">no shared transit nodes on current paths</div>`;
  }
  const body = rows
    .map((row) =>
      [
        `<tr data-id="${escapeHtml(row.id)}">`,
        `<td>${escapeHtml(row.id)}${row.is_vpn ? ` <span class="choke-vpn">vpn</span>` : ""}</td>`,
        `<td class="num">${row.paths_through}</td>`,
        `<td class="num">${fmt(row.resistance, 3)}</td>`,
        `<td class="num">${fmt(row.business_weight, 3)}</td>`,
        `</tr>`,
      ].join(""),
    )
    .join("");
  return [
    `<table class="choke-table">`,
    `<thead><tr><th>asset</th><th>paths</th><th>R</th><th>w</th></tr></thead>`,
    `<tbody>${body}</tbody>`,
    `</table>`,
  ].join("");
}
