"""Shared orchestration behind the CLI and the HTTP service.

Both surfaces call these functions with the same defaults, which is what
makes their JSON outputs identical for identical (dataset, config, seed).
Every function returns a plain JSON-ready dict.
"""

from __future__ import annotations

from typing import Optional, Sequence, Union

import numpy as np

from . import tabular
from .backtest import backtest
from .bayesopt import (DEFAULT_MARGINAL_FRACTIONS, OptimizeConfig,
                       marginal_curve, optimize_fraction)
from .engine import EngineConfig, generate_hypotheses
from .errors import DataError
from .resample import (Scenario, bootstrap_baseline, pooled_metric_values,
                       repeated_resample)
from .stats import compare
from .tabular import Dataset, ObjectiveSpec


def make_objective(metric: str, operator: str = "mean",
                   q: Optional[float] = None,
                   direction: str = "minimize") -> ObjectiveSpec:
    """Build an ObjectiveSpec, accepting the CLI's "percentile:Q" shorthand."""
    if operator.startswith("percentile:"):
        q = float(operator.split(":", 1)[1])
        operator = "percentile"
    return ObjectiveSpec(metric, operator, q, direction)


def whatif_report(dataset: Dataset, column: str, value: Union[str, float],
                  fraction: float, objective: ObjectiveSpec,
                  n_sample: int = 30, seed: int = 0, smoothing: float = 1.0,
                  baseline_mode: str = "raw", alpha: float = 0.05,
                  n_unique: int = 20, n_buckets: int = 10) -> dict:
    """Evaluate one scenario against the baseline and report the comparison."""
    objective.validate_for(dataset)
    resolved = tabular.resolve_value(dataset, column, value, n_unique, n_buckets)
    scenario = Scenario(column, resolved, fraction)
    if baseline_mode == "raw":
        metric_cells = dataset.column(objective.metric_column)
        baseline = metric_cells[~np.isnan(metric_cells)]
        if baseline.size == 0:
            raise DataError("metric column has no non-missing values")
    elif baseline_mode == "bootstrap":
        baseline = bootstrap_baseline(dataset, objective.metric_column, seed)
    else:
        raise DataError(f"unknown baseline mode: {baseline_mode!r}")
    summary = repeated_resample(dataset, scenario, objective, n_sample, seed)
    pooled = pooled_metric_values(dataset, scenario, objective.metric_column,
                                  n_sample, seed)
    report = compare(baseline, pooled, objective,
                     whatif_draw_metrics=summary.draw_metrics, alpha=alpha,
                     bandwidth_multiplier=smoothing)
    return {
        "scenario": scenario.to_dict(),
        "current_fraction": tabular.current_fraction(dataset, column, resolved),
        "objective": objective.to_dict(),
        "n_sample": n_sample,
        "seed": seed,
        "baseline_mode": baseline_mode,
        "whatif_summary": summary.to_dict(),
        "report": report.to_dict(),
    }


def margins_result(dataset: Dataset, column: str, value: Union[str, float],
                   objective: ObjectiveSpec,
                   fractions: Optional[Sequence[float]] = None,
                   n_sample: int = 30, seed: int = 0, iterations: int = 15,
                   init_points: int = 5, xi: float = 0.01,
                   n_unique: int = 20, n_buckets: int = 10) -> dict:
    """Marginal-gain curve over fractions plus the BO-optimal fraction."""
    objective.validate_for(dataset)
    resolved = tabular.resolve_value(dataset, column, value, n_unique, n_buckets)
    curve = marginal_curve(dataset, column, resolved, objective,
                           fractions or DEFAULT_MARGINAL_FRACTIONS,
                           n_sample, seed)
    optimum = optimize_fraction(
        dataset, column, resolved, objective,
        OptimizeConfig(iterations=iterations, init_points=init_points,
                       xi=xi, n_sample=n_sample, seed=seed))
    return {
        "column": column,
        "value": tabular.value_label(resolved),
        "current_fraction": tabular.current_fraction(dataset, column, resolved),
        "objective": objective.to_dict(),
        "curve": [p.to_dict() for p in curve],
        "optimum": optimum.to_dict(),
    }


def recommend_result(dataset: Dataset, config: EngineConfig,
                     progress=None) -> dict:
    """Full Algorithm-style sweep; ranked recommendations plus accounting."""
    sweep = generate_hypotheses(dataset, config, progress=progress)
    out = sweep.to_dict()
    out["config"] = config.to_dict()
    return out


def backtest_result(dataset: Dataset, time_column: str,
                    split: Union[str, float], objective: ObjectiveSpec,
                    columns: Optional[Sequence[str]] = None,
                    n_sample: int = 30, seed: int = 0) -> dict:
    report = backtest(dataset, time_column, split, objective, columns,
                      n_sample, seed)
    return report.to_dict()


def column_catalog(dataset: Dataset, n_unique: int = 20,
                   n_buckets: int = 10) -> list[dict]:
    """Column metadata for pickers: kinds, uniques or bucket labels, and
    current fractions (what the GET columns endpoint serves)."""
    catalog = []
    for spec in dataset.columns:
        entry = {
            "name": spec.name,
            "kind": spec.kind.value,
            "missing": spec.missing_count,
            "n_unique": len(dataset.unique_values(spec.name)),
        }
        values: list[dict] = []
        if (spec.kind == tabular.ColumnKind.NUMERIC
                and entry["n_unique"] > n_unique):
            entry["bucketed"] = True
            for bucket in tabular.bucket_numeric(dataset, spec.name, n_buckets):
                values.append({
                    "value": bucket.label,
                    "fraction": tabular.current_fraction(dataset, spec.name,
                                                         bucket),
                })
        else:
            entry["bucketed"] = False
            for v in dataset.unique_values(spec.name):
                values.append({
                    "value": tabular.value_label(v),
                    "fraction": tabular.current_fraction(dataset, spec.name, v),
                })
            if (spec.kind == tabular.ColumnKind.CATEGORICAL
                    and spec.missing_count > 0):
                values.append({
                    "value": tabular.MISSING_LABEL,
                    "fraction": spec.missing_count / dataset.n_rows,
                })
        entry["values"] = values
        catalog.append(entry)
    return catalog
