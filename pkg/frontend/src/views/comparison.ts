// Distribution comparison view: overlaid density curves, shared-edge
// histograms, the stats panel, a significance badge, the potential-gain
// callout, and a highlight band over the largest baseline/what-if deviation.

import { ComparisonReport, DensityCurve, SummaryStats } from "../types.js";
import { esc, fmt, pct, pValue } from "../format.js";
import { axisTicks, extent, linearScale, pathFrom } from "../svg.js";

export interface ComparisonOptions {
  metricLabel?: string;
  smoothing?: number;
  // plot range acts as a view zoom over the metric axis (no recomputation)
  range?: [number, number] | null;
}

const W = 640;
const H = 240;
const PAD = 36;

export function renderComparison(report: ComparisonReport,
                                 opts: ComparisonOptions = {}): string {
  const metric = opts.metricLabel ?? "metric";
  const deviation = largestDeviation(report);
  const domain = opts.range ?? plotDomain(report);
  const badge = report.significant
    ? `<span class="badge significant">significant (p = ${pValue(report.ks_p_value)})</span>`
    : `<span class="badge not-significant">not significant (p = ${pValue(report.ks_p_value)})</span>`;
  const gainDir = report.potential_gain < 0 ? "decrease" : "increase";
  return `
<section class="comparison">
  <header>
    <h2>Baseline vs what-if: ${esc(metric)}</h2>
    ${badge}
    <p class="gain-callout">potential gain: <strong>${fmt(report.potential_gain)}</strong>
      (${gainDir} in ${esc(metric)}; KS D = ${fmt(report.ks_statistic)})</p>
  </header>
  ${densityPlot(report, domain, deviation)}
  ${histogramPlot(report, domain)}
  ${statsPanel(report.baseline_stats, report.whatif_stats)}
  ${deviation
    ? `<p class="deviation-note">largest deviation around ` +
      `${fmt(deviation.center)} <a href="#zoom" class="zoom-link" ` +
      `data-lo="${deviation.lo}" data-hi="${deviation.hi}">zoom to it</a></p>`
    : ""}
  ${opts.smoothing && opts.smoothing !== 1
    ? `<p class="smoothing-note">graph smoothing x${opts.smoothing}</p>` : ""}
</section>`;
}

interface Deviation {
  lo: number;
  hi: number;
  center: number;
}

// Largest |baseline - whatif| share difference over the shared histogram
// bins; both counts come from the payload, so this is a lookup, not a stat.
export function largestDeviation(report: ComparisonReport): Deviation | null {
  const { edges, baseline_counts, whatif_counts } = report.histograms;
  const nb = baseline_counts.reduce((a, b) => a + b, 0);
  const nw = whatif_counts.reduce((a, b) => a + b, 0);
  if (!nb || !nw || edges.length < 2) return null;
  let best = -1;
  let bestGap = -Infinity;
  for (let i = 0; i < baseline_counts.length; i++) {
    const gap = Math.abs(baseline_counts[i] / nb - whatif_counts[i] / nw);
    if (gap > bestGap) {
      bestGap = gap;
      best = i;
    }
  }
  const lo = edges[best];
  const hi = edges[best + 1];
  return { lo, hi, center: (lo + hi) / 2 };
}

function plotDomain(report: ComparisonReport): [number, number] {
  const xs: number[] = [...report.histograms.edges];
  for (const side of [report.densities.baseline, report.densities.whatif]) {
    if (side) xs.push(side.grid[0], side.grid[side.grid.length - 1]);
  }
  return extent(xs);
}

function densityPlot(report: ComparisonReport, domain: [number, number],
                     deviation: Deviation | null): string {
  const x = linearScale(domain, [PAD, W - 8]);
  const peaks: number[] = [0];
  for (const side of [report.densities.baseline, report.densities.whatif]) {
    if (side) peaks.push(...side.density);
  }
  const y = linearScale([0, Math.max(...peaks) || 1], [H - PAD, 8]);
  const parts: string[] = [];
  if (deviation) {
    parts.push(`<rect class="deviation-highlight" x="${x(deviation.lo).toFixed(1)}"` +
      ` y="8" width="${(x(deviation.hi) - x(deviation.lo)).toFixed(1)}"` +
      ` height="${H - PAD - 8}" />`);
  }
  parts.push(curveOrSpike(report.densities.baseline,
                          report.baseline_stats, "baseline", x, y));
  parts.push(curveOrSpike(report.densities.whatif,
                          report.whatif_stats, "whatif", x, y));
  for (const t of axisTicks(domain[0], domain[1])) {
    parts.push(`<text class="tick" x="${x(t).toFixed(1)}" y="${H - 10}">${fmt(t)}</text>`);
  }
  return `<svg class="density-plot" viewBox="0 0 ${W} ${H}" role="img"
  aria-label="density comparison">
  ${parts.join("\n  ")}
  <g class="legend">
    <text x="${PAD}" y="18" class="legend-baseline">baseline</text>
    <text x="${PAD + 90}" y="18" class="legend-whatif">what-if</text>
  </g>
</svg>`;
}

function curveOrSpike(curve: DensityCurve | null, stats: SummaryStats,
                      cls: string, x: (v: number) => number,
                      y: (v: number) => number): string {
  if (!curve) {
    // degenerate side: all mass at one value, drawn as a spike marker
    const px = x(stats.mean).toFixed(1);
    return `<line class="spike ${cls}" x1="${px}" y1="${y(0).toFixed(1)}"` +
      ` x2="${px}" y2="12" />`;
  }
  const d = pathFrom(curve.grid, curve.density, x, y);
  return `<path class="density ${cls}" d="${d}" fill="none" />`;
}

function histogramPlot(report: ComparisonReport,
                       domain: [number, number]): string {
  const { edges, baseline_counts, whatif_counts } = report.histograms;
  const nb = baseline_counts.reduce((a, b) => a + b, 0) || 1;
  const nw = whatif_counts.reduce((a, b) => a + b, 0) || 1;
  const x = linearScale(domain, [PAD, W - 8]);
  const shares: number[] = [];
  for (let i = 0; i < baseline_counts.length; i++) {
    shares.push(baseline_counts[i] / nb, whatif_counts[i] / nw);
  }
  const y = linearScale([0, Math.max(...shares) || 1], [H - PAD, 8]);
  const bars: string[] = [];
  for (let i = 0; i < baseline_counts.length; i++) {
    const x0 = x(edges[i]);
    const width = Math.max(x(edges[i + 1]) - x0, 0.5);
    for (const [cls, share] of [["baseline", baseline_counts[i] / nb],
                                ["whatif", whatif_counts[i] / nw]] as const) {
      const top = y(share);
      bars.push(`<rect class="bar ${cls}" x="${x0.toFixed(1)}" y="${top.toFixed(1)}"` +
        ` width="${width.toFixed(1)}" height="${(y(0) - top).toFixed(1)}" />`);
    }
  }
  return `<svg class="histogram-plot" viewBox="0 0 ${W} ${H}" role="img"
  aria-label="binned histogram comparison">
  ${bars.join("\n  ")}
</svg>`;
}

const STAT_ROWS: [keyof SummaryStats, string][] = [
  ["mean", "mean"], ["std", "std"], ["min", "min"], ["p5", "p5"],
  ["p25", "p25"], ["p50", "median"], ["p75", "p75"], ["p95", "p95"],
  ["max", "max"],
];

function statsPanel(baseline: SummaryStats, whatif: SummaryStats): string {
  const rows = STAT_ROWS.map(([key, label]) =>
    `<tr><th>${label}</th><td>${fmt(baseline[key])}</td>` +
    `<td>${fmt(whatif[key])}</td></tr>`).join("\n    ");
  return `<table class="stats-panel">
    <thead><tr><th></th><th>baseline</th><th>what-if</th></tr></thead>
    <tbody>
    ${rows}
    </tbody>
  </table>`;
}

export function comparisonSubtitle(currentFraction: number,
                                   scenarioFraction: number,
                                   value: string): string {
  return `${esc(value)}: ${pct(currentFraction)} of rows now, ` +
    `${pct(scenarioFraction)} in the what-if`;
}
