"""Holistic hypothesis generation: sweep every column and every (bucketed)
unique value, optimize each scenario's fraction, and rank the outcomes by
impact on the target metric.

Each recommendation is a one-variable counterfactual: it moves one value's
fraction while holding the internal mix of the complement fixed. Scenarios
draw their seeds from (master_seed, column, value), so the ranked list is
identical no matter how the sweep is scheduled.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import tabular
from .bayesopt import OptimizeConfig, optimize_fraction
from .errors import DataError, ScenarioInfeasibleError
from .resample import Scenario, pooled_metric_values, repeated_resample
from .seeding import derive_seed
from .stats import compare
from .tabular import ColumnKind, Dataset, ObjectiveSpec, ScenarioValue

IMPACT_FLOOR = 1e-12


@dataclass
class EngineConfig:
    """Sweep and optimization parameters for generate_hypotheses."""

    objective: ObjectiveSpec
    n_sample: int = 30
    n_unique: int = 20
    n_buckets: int = 10
    iterations: int = 15
    init_points: int = 5
    xi: float = 0.01
    master_seed: int = 0
    include_columns: Optional[Sequence[str]] = None
    exclude_columns: Sequence[str] = ()
    min_support: int = 5

    def __post_init__(self):
        if self.n_unique < 2:
            raise DataError("n_unique must be >= 2")

    def to_dict(self) -> dict:
        return {
            "objective": self.objective.to_dict(),
            "n_sample": self.n_sample,
            "n_unique": self.n_unique,
            "n_buckets": self.n_buckets,
            "iterations": self.iterations,
            "init_points": self.init_points,
            "xi": self.xi,
            "master_seed": self.master_seed,
            "include_columns": list(self.include_columns)
            if self.include_columns is not None else None,
            "exclude_columns": list(self.exclude_columns),
            "min_support": self.min_support,
        }


@dataclass
class Recommendation:
    """One ranked action item: move a value's fraction to its optimum."""

    scenario: Scenario
    current_fraction: float
    baseline_metric: float
    projected_metric: float
    projected_std: float
    impact: float
    ks_p_value: float
    rank: int = 0
    draw_metrics: list[float] = field(default_factory=list)

    @property
    def absolute_change(self) -> float:
        return abs(self.projected_metric - self.baseline_metric)

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "column": self.scenario.column,
            "value": tabular.value_label(self.scenario.value),
            "current_fraction": self.current_fraction,
            "optimal_fraction": self.scenario.fraction,
            "baseline_metric": self.baseline_metric,
            "projected_metric": self.projected_metric,
            "projected_std": self.projected_std,
            "impact": self.impact,
            "ks_p_value": self.ks_p_value,
            "draw_metrics": self.draw_metrics,
        }


@dataclass
class SkippedScenario:
    column: str
    value: str
    reason: str

    def to_dict(self) -> dict:
        return {"column": self.column, "value": self.value, "reason": self.reason}


@dataclass
class SweepResult:
    """Ranked recommendations plus full accounting of the value enumeration:
    attempted + len(skipped) equals the number of enumerated scenarios."""

    recommendations: list[Recommendation]
    skipped: list[SkippedScenario]
    attempted: int

    def to_dict(self) -> dict:
        return {
            "recommendations": [r.to_dict() for r in self.recommendations],
            "skipped": [s.to_dict() for s in self.skipped],
            "attempted": self.attempted,
        }


ProgressCallback = Callable[[dict], None]


def sweep_values(dataset: Dataset, column: str,
                 config: EngineConfig) -> list[ScenarioValue]:
    """Values enumerated for one column: raw uniques, or quantile buckets
    when a numeric column has more than n_unique distinct values."""
    spec = dataset.spec(column)
    uniques = dataset.unique_values(column)
    if spec.kind is ColumnKind.NUMERIC and len(uniques) > config.n_unique:
        return list(tabular.bucket_numeric(dataset, column, config.n_buckets))
    values: list[ScenarioValue] = list(uniques)
    if spec.kind is ColumnKind.CATEGORICAL and spec.missing_count > 0:
        values.append(tabular.MISSING_LABEL)
    return values


def swept_columns(dataset: Dataset, config: EngineConfig) -> list[str]:
    names = [s.name for s in dataset.columns]
    if config.include_columns is not None:
        include = set(config.include_columns)
        names = [n for n in names if n in include]
    exclude = set(config.exclude_columns) | {config.objective.metric_column}
    return [n for n in names if n not in exclude]


def generate_hypotheses(dataset: Dataset, config: EngineConfig,
                        progress: Optional[ProgressCallback] = None
                        ) -> SweepResult:
    """Run the full column/value sweep and return ranked recommendations.

    Degenerate or infeasible scenarios never fail the sweep; they land in
    the skipped report with a reason.
    """
    config.objective.validate_for(dataset)
    columns = swept_columns(dataset, config)
    if not columns:
        raise DataError("no sweepable columns after exclusions")
    baseline_values = _metric_values(dataset, config.objective)
    baseline_metric = tabular.aggregate(baseline_values, config.objective)

    enumerated: list[tuple[str, ScenarioValue]] = []
    for column in columns:
        try:
            values = sweep_values(dataset, column, config)
        except DataError:
            values = []  # e.g. all-missing numeric column: nothing to sweep
        enumerated.extend((column, v) for v in values)

    recommendations: list[Recommendation] = []
    skipped: list[SkippedScenario] = []
    total = len(enumerated)
    for index, (column, value) in enumerate(enumerated):
        label = tabular.value_label(value)
        outcome = "done"
        reason = None
        try:
            rec = _evaluate_scenario(dataset, column, value, config,
                                     baseline_values, baseline_metric)
            recommendations.append(rec)
        except (DataError, ScenarioInfeasibleError) as exc:
            reason = str(exc)
            skipped.append(SkippedScenario(column, label, reason))
            outcome = "skipped"
        if progress is not None:
            event = {"scenario": f"{column}={label}", "index": index,
                     "total": total, "status": outcome}
            if reason:
                event["reason"] = reason
            progress(event)
    ranked = rank_recommendations(recommendations)
    return SweepResult(ranked, skipped, attempted=len(ranked))


def _metric_values(dataset: Dataset, objective: ObjectiveSpec) -> np.ndarray:
    values = dataset.column(objective.metric_column)
    values = values[~np.isnan(values)]
    if values.size == 0:
        raise DataError("metric column has no non-missing values")
    return values


def _evaluate_scenario(dataset: Dataset, column: str, value: ScenarioValue,
                       config: EngineConfig, baseline_values: np.ndarray,
                       baseline_metric: float) -> Recommendation:
    support = int(tabular.match_mask(dataset, column, value).sum())
    if support < config.min_support:
        raise DataError(
            f"stratum has {support} rows, below min_support "
            f"{config.min_support}")
    seed = derive_seed(config.master_seed, "scenario", column,
                       tabular.value_label(value))
    opt = optimize_fraction(
        dataset, column, value, config.objective,
        OptimizeConfig(iterations=config.iterations,
                       init_points=config.init_points, xi=config.xi,
                       n_sample=config.n_sample, seed=seed))
    scenario = Scenario(column, value, opt.x_star)
    summary = repeated_resample(dataset, scenario, config.objective,
                                config.n_sample, master_seed=seed)
    pooled = pooled_metric_values(dataset, scenario,
                                  config.objective.metric_column,
                                  config.n_sample, master_seed=seed)
    report = compare(baseline_values, pooled, config.objective,
                     whatif_draw_metrics=summary.draw_metrics)
    delta = summary.metric_mean - baseline_metric
    if baseline_metric != 0.0:
        impact = abs(delta) / max(abs(baseline_metric), IMPACT_FLOOR)
    else:
        impact = abs(delta)
    return Recommendation(
        scenario=scenario,
        current_fraction=tabular.current_fraction(dataset, column, value),
        baseline_metric=baseline_metric,
        projected_metric=summary.metric_mean,
        projected_std=summary.metric_std,
        impact=impact,
        ks_p_value=report.ks_p_value,
        draw_metrics=summary.draw_metrics,
    )


def rank_recommendations(recs: Sequence[Recommendation]) -> list[Recommendation]:
    """Dense 1..K ranking by descending impact.

    Ties break by larger absolute change, then smaller KS p-value, then
    (column, value label) lexicographic, so the order is fully deterministic.
    """
    ordered = sorted(recs, key=lambda r: (
        -r.impact, -r.absolute_change, r.ks_p_value,
        r.scenario.column, tabular.value_label(r.scenario.value)))
    for i, rec in enumerate(ordered, start=1):
        rec.rank = i
    return ordered


def write_recommendations_csv(recs: Sequence[Recommendation], path) -> None:
    fields = ["rank", "column", "value", "current_fraction",
              "optimal_fraction", "baseline_metric", "projected_metric",
              "projected_std", "impact", "ks_p_value"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore")
        writer.writeheader()
        for rec in recs:
            writer.writerow(rec.to_dict())
