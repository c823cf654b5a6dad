// API payload shapes, mirrored from the service's JSON field names.
// The UI renders these verbatim; it never computes statistics of its own.

export interface SummaryStats {
  mean: number;
  std: number;
  min: number;
  max: number;
  p5: number;
  p25: number;
  p50: number;
  p75: number;
  p95: number;
}

export interface DensityCurve {
  grid: number[];
  density: number[];
  bandwidth: number;
}

export interface Histograms {
  edges: number[];
  baseline_counts: number[];
  whatif_counts: number[];
}

export interface ComparisonReport {
  baseline_stats: SummaryStats;
  whatif_stats: SummaryStats;
  ks_statistic: number;
  ks_p_value: number;
  significant: boolean;
  potential_gain: number;
  histograms: Histograms;
  densities: {
    baseline: DensityCurve | null;
    whatif: DensityCurve | null;
  };
}

export interface ScenarioRef {
  column: string;
  value: string;
  fraction: number;
}

export interface WhatifResponse {
  scenario: ScenarioRef;
  current_fraction: number;
  objective: { metric: string; operator: string; direction: string; q?: number };
  n_sample: number;
  seed: number;
  baseline_mode: string;
  whatif_summary: { metric_mean: number; metric_std: number; draw_metrics: number[] };
  report: ComparisonReport;
}

export interface Recommendation {
  rank: number;
  column: string;
  value: string;
  current_fraction: number;
  optimal_fraction: number;
  baseline_metric: number;
  projected_metric: number;
  projected_std: number;
  impact: number;
  ks_p_value: number;
}

export interface SkippedScenario {
  column: string;
  value: string;
  reason: string;
}

export interface SweepResult {
  recommendations: Recommendation[];
  skipped: SkippedScenario[];
  attempted: number;
}

export interface MarginalPoint {
  x: number;
  metric_mean: number | null;
  metric_std: number | null;
}

export interface OptimumResult {
  x_star: number;
  f_star: number;
  trace: { x: number; f: number }[];
  iterations_used: number;
  skipped_fractions: number[];
}

export interface MarginsResponse {
  column: string;
  value: string;
  current_fraction: number;
  objective: { metric: string; operator: string; direction: string };
  curve: MarginalPoint[];
  optimum: OptimumResult;
}

export interface ColumnValue {
  value: string;
  fraction: number;
}

export interface ColumnInfo {
  name: string;
  kind: "categorical" | "numeric";
  missing: number;
  n_unique: number;
  bucketed: boolean;
  values: ColumnValue[];
}

export interface DatasetInfo {
  dataset_id: string;
  n_rows: number;
  columns: ColumnInfo[];
}

export type JobStatus = "pending" | "running" | "done" | "failed";

export interface JobView {
  job_id: string;
  status: JobStatus;
  progress: { events: number; scenario?: string; index?: number; total?: number; status?: string };
  result?: SweepResult & { config?: unknown };
  error?: string;
}

export interface ProgressEvent {
  scenario: string;
  index: number;
  total: number;
  status: "done" | "skipped";
  reason?: string;
}
