/** SVG rendering of the threshold posterior: filled area + median marker. */

import type { PosteriorSummary } from "./api.js";

const WIDTH = 560;
const HEIGHT = 120;
const PAD = 4;

function sx(x: number, lo: number, hi: number): number {
  return PAD + ((x - lo) / (hi - lo)) * (WIDTH - 2 * PAD);
}

export function posteriorSvg(posterior: PosteriorSummary): string {
  const { x, mass, median } = posterior;
  if (x.length === 0) return `<svg class="sparkline" viewBox="0 0 ${WIDTH} ${HEIGHT}"></svg>`;
  const lo = x[0];
  const hi = x[x.length - 1] === lo ? lo + 1 : x[x.length - 1];
  const peak = Math.max(...mass, 1e-12);
  const sy = (m: number) => HEIGHT - PAD - (m / peak) * (HEIGHT - 2 * PAD);

  const pts = x.map((xi, i) => `${sx(xi, lo, hi).toFixed(1)},${sy(mass[i]).toFixed(1)}`);
  const area = [
    `${sx(lo, lo, hi).toFixed(1)},${(HEIGHT - PAD).toFixed(1)}`,
    ...pts,
    `${sx(hi, lo, hi).toFixed(1)},${(HEIGHT - PAD).toFixed(1)}`,
  ].join(" ");
  const mx = sx(median, lo, hi).toFixed(1);

  return [
    `<svg class="sparkline" viewBox="0 0 ${WIDTH} ${HEIGHT}" preserveAspectRatio="none" role="img" aria-label="threshold posterior">`,
    `<polygon class="posterior-area" points="${area}"></polygon>`,
    `<polyline class="posterior-line" points="${pts.join(" ")}"></polyline>`,
    `<line class="median-marker" x1="${mx}" y1="${PAD}" x2="${mx}" y2="${HEIGHT - PAD}"></line>`,
    `</svg>`,
  ].join("");
}
