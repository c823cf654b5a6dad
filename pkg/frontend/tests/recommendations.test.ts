import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { join } from "node:path";

import {
  actionPhrase, projectionPhrase, renderRecommendations,
} from "../src/views/recommendations";
import type { Recommendation, SweepResult } from "../src/types";

const fixture = (name: string): SweepResult =>
  JSON.parse(readFileSync(join(__dirname, "fixtures", `${name}.json`), "utf8"));

const sweep = fixture("sweep");
const single = fixture("sweep_single");
const empty = fixture("sweep_empty");

const rec = (rank: number, impact: number, value = `v${rank}`): Recommendation => ({
  rank,
  column: "c",
  value,
  current_fraction: 0.4,
  optimal_fraction: 0.1,
  baseline_metric: 100,
  projected_metric: 80,
  projected_std: 2,
  impact,
  ks_p_value: 0.01,
});

describe("renderRecommendations", () => {
  it("matches the recorded-payload snapshot", () => {
    expect(renderRecommendations(sweep.recommendations, sweep.skipped, 1,
                                 "minutes")).toMatchSnapshot();
  });

  it("renders rows in the payload's impact order", () => {
    const html = renderRecommendations(sweep.recommendations, [], 1, "m");
    const rendered = [...html.matchAll(/data-rank="(\d+)"/g)]
      .map((m) => Number(m[1]));
    expect(rendered).toEqual(sweep.recommendations.map((r) => r.rank));
    const impacts = sweep.recommendations.map((r) => r.impact);
    expect(impacts).toEqual([...impacts].sort((a, b) => b - a));
  });

  it("keeps an explicit fixture order 0.3, 0.2, 0.1", () => {
    const fixtureList = [rec(1, 0.3, "a"), rec(2, 0.2, "b"), rec(3, 0.1, "c")];
    const html = renderRecommendations(fixtureList, [], 1, "m");
    const values = [...html.matchAll(/<td>\d+<\/td><td>c<\/td><td>(\w+)<\/td>/g)]
      .map((m) => m[1]);
    expect(values).toEqual(["a", "b", "c"]);
  });

  it("phrases the selected action in plain words", () => {
    const item = rec(1, 0.3, "vandalism");
    expect(actionPhrase(item))
      .toBe("reduce fraction of vandalism from 40% to 10%");
    expect(projectionPhrase(item, "restore minutes"))
      .toBe("average restore minutes will change from 100 to 80");
    const raise = { ...item, optimal_fraction: 0.9 };
    expect(actionPhrase(raise)).toContain("increase fraction of vandalism");
  });

  it("links the selected item to its marginal curve", () => {
    const html = renderRecommendations(sweep.recommendations, [], 1, "m");
    const top = sweep.recommendations[0];
    expect(html).toContain(
      `#margins?column=${encodeURIComponent(top.column)}` +
      `&value=${encodeURIComponent(top.value)}`);
  });

  it("disables the dropdown for a single item and shows rank 1", () => {
    const html = renderRecommendations(single.recommendations, single.skipped,
                                       1, "m");
    expect(single.recommendations).toHaveLength(1);
    expect(html).toContain("<select id=\"rec-select\" aria-label=\"recommendation\" disabled>");
    expect(html).toContain("#1 ");
  });

  it("empty sweeps point at the skipped-scenario report", () => {
    const html = renderRecommendations(empty.recommendations, empty.skipped,
                                       1, "m");
    expect(html).toContain("empty-state");
    expect(html).toContain("skipped");
    expect(html).toContain(String(empty.skipped.length));
  });
});
