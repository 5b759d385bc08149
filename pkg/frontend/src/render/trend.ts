// Exposure trend over polls. The buffer records the report's normalized
// exposure per observed graph version; the delta shown is the change since
// the previous version, the one derived figure the dashboard displays.

import { fmt } from "../format.js";

export interface TrendPoint {
  version: string;
  normalizedExposure: number;
  pqri: number;
  at: number;
}

export class TrendBuffer {
  private points: TrendPoint[] = [];

  constructor(private readonly capacity = 60) {}

  push(point: TrendPoint): void {
    const last = this.points[this.points.length - 1];
    if (last !== undefined && last.version === point.version) {
      return; // same graph version scores identically; keep one point per version
    }
    this.points.push(point);
    if (this.points.length > this.capacity) this.points.shift();
  }

  list(): readonly TrendPoint[] {
    return this.points;
  }

  delta(): number | null {
    if (this.points.length < 2) return null;
    const cur = this.points[this.points.length - 1];
    const prev = this.points[this.points.length - 2];
    if (cur === undefined || prev === undefined) return null;
    return cur.normalizedExposure - prev.normalizedExposure;
  }
}

const W = 260;
const H = 60;
const PAD = 6;

export function renderTrend(buffer: TrendBuffer): string {
  const points = buffer.list();
  if (points.length === 0) {
    return `<div class="trend-empty">no observations yet</div>`;
  }

  const values = points.map((p) => p.normalizedExposure);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo || 1;
  const step = points.length > 1 ? (W - 2 * PAD) / (points.length - 1) : 0;
  const coords = values
    .map((v, i) => {
      const x = PAD + i * step;
      const y = H - PAD - ((v - lo) / span) * (H - 2 * PAD);
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");

  const delta = buffer.delta();
  let deltaLabel = "&Delta;E: n/a";
  let deltaClass = "trend-flat";
  if (delta !== null) {
    const sign = delta > 0 ? "+" : "";
    deltaLabel = `&Delta;E = ${sign}${fmt(delta, 4)}`;
    deltaClass = delta > 0 ? "trend-up" : delta < 0 ? "trend-down" : "trend-flat";
  }
  const latest = points[points.length - 1];

  return [
    `<div class="trend">`,
    `<svg viewBox="0 0 ${W} ${H}" class="trend-spark" role="img" aria-label="exposure trend">`,
    points.length > 1
      ? `<polyline points="${coords}" fill="none" class="trend-line" stroke-width="2"/>`
      : `<circle cx="${W / 2}" cy="${H / 2}" r="3" class="trend-line"/>`,
    `</svg>`,
    `<div class="trend-meta">`,
    `<span class="${deltaClass}">${deltaLabel}</span>`,
    `<span class="trend-current">E&#770; = ${fmt(latest?.normalizedExposure ?? 0, 4)}</span>`,
    `</div>`,
    `</div>`,
  ].join("");
}
