"""Historical validation of the resampling simulator.

Split the data into two time slices, observe how each categorical value's
fraction really changed, resample the earlier slice at the observed later
rate, and score the simulated metric against the realized one by mean
absolute error (relative when the realized metric is nonzero).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import tabular
from .errors import DataError, ScenarioInfeasibleError
from .resample import Scenario, repeated_resample
from .seeding import derive_seed
from .tabular import ColumnKind, Dataset, ObjectiveSpec


@dataclass
class ColumnShiftResult:
    column: str
    value: str
    fraction_a: float
    fraction_b: float
    simulated_metric: float
    simulated_std: float
    actual_metric: float
    abs_error: float

    def to_dict(self) -> dict:
        return {
            "column": self.column, "value": self.value,
            "fraction_a": self.fraction_a, "fraction_b": self.fraction_b,
            "simulated_metric": self.simulated_metric,
            "simulated_std": self.simulated_std,
            "actual_metric": self.actual_metric,
            "abs_error": self.abs_error,
        }


@dataclass
class BacktestReport:
    time_column: str
    split: Union[str, float]
    n_rows_a: int
    n_rows_b: int
    results: list[ColumnShiftResult]
    skipped: list[dict] = field(default_factory=list)
    mae: float = float("nan")
    mae_std: float = float("nan")

    def to_dict(self) -> dict:
        return {
            "time_column": self.time_column,
            "split": self.split,
            "n_rows_a": self.n_rows_a,
            "n_rows_b": self.n_rows_b,
            "results": [r.to_dict() for r in self.results],
            "skipped": self.skipped,
            "mae": self.mae,
            "mae_std": self.mae_std,
        }

    def format_table(self) -> str:
        """Human-readable summary with one row per simulated shift."""
        lines = [
            f"slice A (before {self.split!r}): {self.n_rows_a} rows | "
            f"slice B: {self.n_rows_b} rows",
            f"{'column':<20} {'value':<20} {'frac A':>8} {'frac B':>8} "
            f"{'simulated':>12} {'actual':>12} {'error':>9}",
        ]
        for r in self.results:
            lines.append(
                f"{r.column:<20} {r.value:<20} {r.fraction_a:>8.3f} "
                f"{r.fraction_b:>8.3f} {r.simulated_metric:>12.4g} "
                f"{r.actual_metric:>12.4g} {r.abs_error:>9.4f}")
        lines.append(f"MAE: {self.mae:.4f} (+- {self.mae_std:.4f})")
        return "\n".join(lines)


def slice_masks(dataset: Dataset, time_column: str,
                split: Union[str, float]) -> tuple[np.ndarray, np.ndarray]:
    """Before/after boolean masks; rows with missing time join neither."""
    spec = dataset.spec(time_column)
    values = dataset.column(time_column)
    if spec.kind is ColumnKind.NUMERIC:
        try:
            boundary = float(split)
        except (TypeError, ValueError):
            raise DataError(
                f"split {split!r} not comparable with numeric time column")
        with np.errstate(invalid="ignore"):
            mask_a = values < boundary
            mask_b = values >= boundary
        present = ~np.isnan(values)
    else:
        boundary = str(split)
        present = ~dataset.missing_mask(time_column)
        mask_a = np.array([v is not None and v < boundary for v in values])
        mask_b = np.array([v is not None and v >= boundary for v in values])
    return mask_a & present, mask_b & present


def backtest(dataset: Dataset, time_column: str, split: Union[str, float],
             objective: ObjectiveSpec,
             columns: Optional[Sequence[str]] = None,
             n_sample: int = 30, seed: int = 0) -> BacktestReport:
    """Replay observed fraction changes from slice A at slice-B rates.

    columns defaults to every categorical column other than the time and
    metric columns. Values whose shift cannot be simulated (e.g. absent
    from slice A) are skipped with a reason, not failed.
    """
    objective.validate_for(dataset)
    mask_a, mask_b = slice_masks(dataset, time_column, split)
    if not mask_a.any() or not mask_b.any():
        raise DataError("both time slices must be non-empty")
    slice_a = dataset.select(np.flatnonzero(mask_a))
    slice_b = dataset.select(np.flatnonzero(mask_b))
    actual = tabular.eval_metric(slice_b, objective)
    if columns is None:
        columns = [s.name for s in dataset.columns
                   if s.kind is ColumnKind.CATEGORICAL
                   and s.name not in (time_column, objective.metric_column)]
    results: list[ColumnShiftResult] = []
    skipped: list[dict] = []
    for column in columns:
        for value in dataset.unique_values(column):
            label = tabular.value_label(value)
            fraction_b = tabular.current_fraction(slice_b, column, value)
            scenario = Scenario(column, value, fraction_b)
            try:
                summary = repeated_resample(
                    slice_a, scenario, objective, n_sample,
                    master_seed=derive_seed(seed, "backtest", column, label))
            except (DataError, ScenarioInfeasibleError) as exc:
                skipped.append({"column": column, "value": label,
                                "reason": str(exc)})
                continue
            error = abs(summary.metric_mean - actual)
            if actual != 0.0:
                error /= abs(actual)
            results.append(ColumnShiftResult(
                column, label,
                tabular.current_fraction(slice_a, column, value), fraction_b,
                summary.metric_mean, summary.metric_std, actual, error))
    report = BacktestReport(time_column, split, slice_a.n_rows,
                            slice_b.n_rows, results, skipped)
    if results:
        errors = np.array([r.abs_error for r in results])
        report.mae = float(np.mean(errors))
        report.mae_std = float(np.std(errors, ddof=1)) if errors.size > 1 else 0.0
    return report
