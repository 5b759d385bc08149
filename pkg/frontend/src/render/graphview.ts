/**
 * Asset graph panel: nodes on a deterministic circle layout, filled by the
 * server-computed heat field, edges colored by validation status and
 * filterable to one status. Entries get a square marker, crown jewels a
 * halo ring. No physics, no layout state: same payload, same picture.
 */

import { escapeHtml, fmt, statusClass } from "../format.js";
import type { EdgePayload, NodePayload } from "../types.js";

const W = 640;
const H = 480;
const CX = W / 2;
const CY = H / 2;
const RADIUS = Math.min(W, H) / 2 - 50;

export interface GraphRenderOptions {
  statusFilter?: string | null;
}

function layout(nodes: NodePayload[]): Map<string, [number, number]> {
  const ordered = [...nodes].sort((a, b) => a.id.localeCompare(b.id));
  const positions = new Map<string, [number, number]>();
  const n = Math.max(ordered.length, 1);
  ordered.forEach((node, i) => {
    const angle = (2 * Math.PI * i) / n - Math.PI / 2;
    positions.set(node.id, [CX + RADIUS * Math.cos(angle), CY + RADIUS * Math.sin(angle)]);
  });
  return positions;
}

// heat 0 -> cool blue, heat 1 -> hot red; purely presentational mapping
function heatColor(heat: number): string {
  const t = Math.max(0, Math.min(1, heat));
  const hue = 220 - 220 * t;
  return `hsl(${hue.toFixed(0)} 70% 55%)`;
}

export function renderGraphView(
  nodes: NodePayload[],
  edges: EdgePayload[],
  heatByNode: Map<string, number>,
  options: GraphRenderOptions = {},
): string {
  const positions = layout(nodes);
  const filter = options.statusFilter ?? null;
  const shown = filter === null ? edges : edges.filter((e) => e.validation_status === filter);

  const edgeMarkup = shown
    .map((edge) => {
      const a = positions.get(edge.source);
      const b = positions.get(edge.target);
      if (a === undefined || b === undefined) return "";
      return (
        `<line class="edge ${statusClass(edge.validation_status)}" ` +
        `x1="${a[0].toFixed(1)}" y1="${a[1].toFixed(1)}" x2="${b[0].toFixed(1)}" y2="${b[1].toFixed(1)}" ` +
        `data-relation="${escapeHtml(edge.relation)}">` +
        `<title>${escapeHtml(edge.source)} ${escapeHtml(edge.relation)} ${escapeHtml(edge.target)} (${edge.validation_status})</title>` +
        `</line>`
      );
    })
    .join("");

  const nodeMarkup = nodes
    .map((node) => {
      const pos = positions.get(node.id);
      if (pos === undefined) return "";
      const [x, y] = pos;
      const heat = heatByNode.get(node.id) ?? 0;
      const fill = heatColor(heat);
      const halo = node.crown_impact > 0
        ? `<circle class="crown-halo" cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="13" fill="none" stroke-width="2"/>`
        : "";
      const marker = node.is_entry
        ? `<rect class="node" x="${(x - 7).toFixed(1)}" y="${(y - 7).toFixed(1)}" width="14" height="14" fill="${fill}"/>`
        : `<circle class="node" cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="8" fill="${fill}"/>`;
      const title =
        `${node.id} heat=${fmt(heat, 3)} R=${fmt(node.resistance, 3)} w=${fmt(node.business_weight, 3)}`;
      return `<g class="node-group" data-id="${escapeHtml(node.id)}">${halo}${marker}<title>${escapeHtml(title)}</title></g>`;
    })
    .join("");

  return [
    `<svg class="graphview" viewBox="0 0 ${W} ${H}" role="img" aria-label="asset graph">`,
    edgeMarkup,
    nodeMarkup,
    `</svg>`,
    `<div class="graphview-meta">${nodes.length} assets, ${shown.length}${filter ? ` ${escapeHtml(filter)}` : ""} edges</div>`,
  ].join("");
}
