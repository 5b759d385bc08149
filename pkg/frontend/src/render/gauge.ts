// Readiness gauge: a semicircular dial with the needle at index/100.
// The printed number is the API's pqri field, untouched beyond rounding.

import { fmt } from "../format.js";

const W = 220;
const H = 130;
const CX = W / 2;
const CY = 115;
const R = 90;

function polar(angleDeg: number, radius: number): [number, number] {
  const rad = (Math.PI / 180) * angleDeg;
  return [CX + radius * Math.cos(rad), CY - radius * Math.sin(rad)];
}

function arcPath(fromDeg: number, toDeg: number, radius: number): string {
  const [x0, y0] = polar(fromDeg, radius);
  const [x1, y1] = polar(toDeg, radius);
  const large = Math.abs(fromDeg - toDeg) > 180 ? 1 : 0;
  return `M ${x0.toFixed(1)} ${y0.toFixed(1)} A ${radius} ${radius} 0 ${large} 1 ${x1.toFixed(1)} ${y1.toFixed(1)}`;
}

export function renderGauge(pqri: number): string {
  const clamped = Math.max(0, Math.min(100, pqri));
  // 0 maps to 180deg (left), 100 maps to 0deg (right)
  const needleDeg = 180 - (clamped / 100) * 180;
  const [nx, ny] = polar(needleDeg, R - 12);

  const bands = [
    { from: 180, to: 120, cls: "gauge-low" },
    { from: 120, to: 60, cls: "gauge-mid" },
    { from: 60, to: 0, cls: "gauge-high" },
  ];
  const arcs = bands
    .map((b) => `<path class="${b.cls}" d="${arcPath(b.from, b.to, R)}" fill="none" stroke-width="14"/>`)
    .join("");

  return [
    `<svg class="gauge" viewBox="0 0 ${W} ${H}" role="img" aria-label="readiness index ${fmt(pqri, 1)}">`,
    arcs,
    `<line class="gauge-needle" x1="${CX}" y1="${CY}" x2="${nx.toFixed(1)}" y2="${ny.toFixed(1)}" stroke-width="3"/>`,
    `<circle class="gauge-hub" cx="${CX}" cy="${CY}" r="5"/>`,
    `<text class="gauge-value" x="${CX}" y="${CY - 24}" text-anchor="middle">${fmt(pqri, 1)}</text>`,
    `<text class="gauge-caption" x="${CX}" y="${CY - 6}" text-anchor="middle">PQRI / 100</text>`,
    `</svg>`,
  ].join("");
}
