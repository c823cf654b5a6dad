// Marginal-gain view: metric vs scenario fraction with a +-std band,
// markers for the current fraction and the optimized x*, and line breaks
// where a fraction was infeasible.

import { MarginalPoint, MarginsResponse } from "../types.js";
import { esc, fmt, pct } from "../format.js";
import { axisTicks, linearScale, pathFrom } from "../svg.js";

const W = 640;
const H = 260;
const PAD = 40;

export function renderMarginal(margins: MarginsResponse): string {
  const feasible = margins.curve.filter(
    (p): p is MarginalPoint & { metric_mean: number; metric_std: number } =>
      p.metric_mean !== null && p.metric_std !== null);
  if (feasible.length === 0) {
    return `<section class="marginal empty-state">
  <h2>Marginal gains</h2>
  <p>No feasible fraction for ${esc(margins.column)} = ${esc(margins.value)}.</p>
</section>`;
  }
  const x = linearScale([0, 1], [PAD, W - 10]);
  const lows = feasible.map((p) => p.metric_mean - p.metric_std);
  const highs = feasible.map((p) => p.metric_mean + p.metric_std);
  const yLo = Math.min(...lows);
  const yHi = Math.max(...highs);
  const y = linearScale([yLo, yHi === yLo ? yLo + 1 : yHi], [H - PAD, 12]);

  const segments = splitAtGaps(margins.curve);
  const bands = segments.map((seg) => bandPolygon(seg, x, y)).join("\n  ");
  const lines = segments.map((seg) =>
    `<path class="curve" fill="none" d="${pathFrom(
      seg.map((p) => p.x), seg.map((p) => p.metric_mean), x, y)}" />`)
    .join("\n  ");
  const gaps = margins.curve.filter((p) => p.metric_mean === null);
  const gapMarks = gaps.map((p) =>
    `<text class="gap-mark" x="${x(p.x).toFixed(1)}" y="${H - PAD + 14}">×</text>`)
    .join("\n  ");

  const cf = margins.current_fraction;
  const xStar = margins.optimum.x_star;
  const ticks = axisTicks(0, 1).map((t) =>
    `<text class="tick" x="${x(t).toFixed(1)}" y="${H - 8}">${pct(t)}</text>`)
    .join("\n  ");
  const yTicks = axisTicks(y.domain[0], y.domain[1], 4).map((t) =>
    `<text class="tick y" x="2" y="${y(t).toFixed(1)}">${fmt(t)}</text>`)
    .join("\n  ");
  return `
<section class="marginal">
  <h2>Marginal gains: ${esc(margins.column)} = ${esc(margins.value)}</h2>
  <p>${esc(margins.objective.metric)} (${esc(margins.objective.operator)}) as the
    fraction moves; optimum x* = ${pct(xStar)}, now at ${pct(cf)}</p>
  <svg class="marginal-plot" viewBox="0 0 ${W} ${H}" role="img"
    aria-label="marginal gain curve">
  ${bands}
  ${lines}
  ${gapMarks}
  <line class="marker current" x1="${x(cf).toFixed(1)}" y1="12"
    x2="${x(cf).toFixed(1)}" y2="${H - PAD}" />
  <line class="marker optimum" x1="${x(xStar).toFixed(1)}" y1="12"
    x2="${x(xStar).toFixed(1)}" y2="${H - PAD}" />
  <text class="marker-label current" x="${x(cf).toFixed(1)}" y="10">now</text>
  <text class="marker-label optimum" x="${x(xStar).toFixed(1)}" y="22">x*</text>
  ${ticks}
  ${yTicks}
  </svg>
</section>`;
}

type FeasiblePoint = MarginalPoint & { metric_mean: number; metric_std: number };

// consecutive feasible runs; infeasible points break the line
export function splitAtGaps(curve: MarginalPoint[]): FeasiblePoint[][] {
  const segments: FeasiblePoint[][] = [];
  let current: FeasiblePoint[] = [];
  for (const p of curve) {
    if (p.metric_mean === null || p.metric_std === null) {
      if (current.length) segments.push(current);
      current = [];
    } else {
      current.push(p as FeasiblePoint);
    }
  }
  if (current.length) segments.push(current);
  return segments;
}

function bandPolygon(seg: FeasiblePoint[], x: (v: number) => number,
                     y: (v: number) => number): string {
  if (seg.length < 2) return "";
  const upper = seg.map((p) =>
    `${x(p.x).toFixed(1)},${y(p.metric_mean + p.metric_std).toFixed(1)}`);
  const lower = [...seg].reverse().map((p) =>
    `${x(p.x).toFixed(1)},${y(p.metric_mean - p.metric_std).toFixed(1)}`);
  return `<polygon class="std-band" points="${[...upper, ...lower].join(" ")}" />`;
}
