// Ranked recommendation browser: impact-ordered dropdown plus table, and an
// action phrasing panel for the selected item with a link to its marginal
// curve. An empty sweep points at the skipped-scenario report instead.

import { Recommendation, SkippedScenario } from "../types.js";
import { esc, fmt, pct, pValue } from "../format.js";

export function renderRecommendations(recs: Recommendation[],
                                      skipped: SkippedScenario[] = [],
                                      selectedRank = 1,
                                      metricLabel = "metric"): string {
  if (recs.length === 0) {
    return `
<section class="recommendations empty-state">
  <h2>Suggested scenarios</h2>
  <p>No scenario survived the sweep.</p>
  ${skippedReport(skipped)}
</section>`;
  }
  const selected = recs.find((r) => r.rank === selectedRank) ?? recs[0];
  const options = recs.map((r) =>
    `<option value="${r.rank}"${r.rank === selected.rank ? " selected" : ""}>` +
    `#${r.rank} ${esc(r.column)} = ${esc(r.value)} (impact ${pct(r.impact)})` +
    `</option>`).join("\n    ");
  const rows = recs.map((r) =>
    `<tr data-rank="${r.rank}"${r.rank === selected.rank ? ' class="selected"' : ""}>` +
    `<td>${r.rank}</td><td>${esc(r.column)}</td><td>${esc(r.value)}</td>` +
    `<td>${pct(r.current_fraction)}</td><td>${pct(r.optimal_fraction)}</td>` +
    `<td>${fmt(r.projected_metric)}</td><td>${pct(r.impact)}</td>` +
    `<td>${pValue(r.ks_p_value)}</td></tr>`).join("\n    ");
  return `
<section class="recommendations">
  <h2>Suggested scenarios, ranked by impact</h2>
  <select id="rec-select" aria-label="recommendation"${recs.length === 1 ? " disabled" : ""}>
    ${options}
  </select>
  ${actionPanel(selected, metricLabel)}
  <table class="rec-table">
    <thead><tr><th>rank</th><th>column</th><th>value</th><th>now</th>
      <th>optimal</th><th>projected</th><th>impact</th><th>KS p</th></tr></thead>
    <tbody>
    ${rows}
    </tbody>
  </table>
  ${skippedReport(skipped)}
</section>`;
}

export function actionPhrase(rec: Recommendation): string {
  const verb = rec.optimal_fraction < rec.current_fraction ? "reduce" : "increase";
  return `${verb} fraction of ${rec.value} from ` +
    `${pct(rec.current_fraction)} to ${pct(rec.optimal_fraction)}`;
}

export function projectionPhrase(rec: Recommendation,
                                 metricLabel: string): string {
  return `average ${metricLabel} will change from ` +
    `${fmt(rec.baseline_metric)} to ${fmt(rec.projected_metric)}`;
}

function actionPanel(rec: Recommendation, metricLabel: string): string {
  const marginsHref = `#margins?column=${encodeURIComponent(rec.column)}` +
    `&value=${encodeURIComponent(rec.value)}`;
  return `<div class="action-panel">
    <p class="action">${esc(actionPhrase(rec))}</p>
    <p class="projection">${esc(projectionPhrase(rec, metricLabel))}
      (&plusmn;${fmt(rec.projected_std)}, KS p = ${pValue(rec.ks_p_value)})</p>
    <a class="margins-link" href="${marginsHref}">marginal-gain curve for this scenario</a>
  </div>`;
}

function skippedReport(skipped: SkippedScenario[]): string {
  if (skipped.length === 0) return "";
  const items = skipped.map((s) =>
    `<li>${esc(s.column)} = ${esc(s.value)}: ${esc(s.reason)}</li>`)
    .join("\n    ");
  return `<details class="skipped-report">
    <summary>${skipped.length} scenario(s) skipped</summary>
    <ul>
    ${items}
    </ul>
  </details>`;
}
