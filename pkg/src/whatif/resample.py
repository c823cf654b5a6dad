"""Stratified bootstrap that pins a value's fraction at an exact target.

A scenario "value u in column c occurs at fraction x" is simulated by drawing
round(x*N) rows with replacement from the stratum matching u and the rest
from its complement. Row count stays at N so baseline and what-if statistics
are size-comparable, and every x in [0, 1] stays feasible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import tabular
from .errors import DataError, ScenarioInfeasibleError
from .seeding import derive_seed
from .tabular import Dataset, ObjectiveSpec, ScenarioValue

DEFAULT_N_SAMPLE = 30


@dataclass(frozen=True)
class Scenario:
    """One hypothetical reality: value `value` of `column` at fraction x."""

    column: str
    value: ScenarioValue
    fraction: float

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise DataError(f"fraction must be in [0, 1], got {self.fraction}")

    @property
    def label(self) -> str:
        return f"{self.column}={tabular.value_label(self.value)}"

    def seed_key(self) -> tuple:
        return (self.column, tabular.value_label(self.value), float(self.fraction))

    def to_dict(self) -> dict:
        return {"column": self.column,
                "value": tabular.value_label(self.value),
                "fraction": self.fraction}


@dataclass
class ResampleDraw:
    """Row-index multiset of one draw; len(row_indices) == source N."""

    row_indices: np.ndarray
    seed: int


@dataclass
class ResampleSummary:
    """Per-draw objective values with their mean and sample std."""

    metric_mean: float
    metric_std: float
    draw_metrics: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"metric_mean": self.metric_mean, "metric_std": self.metric_std,
                "draw_metrics": self.draw_metrics}


def round_half_up(x: float) -> int:
    """round(x) with .5 always rounding up, so tie behavior is deterministic."""
    return int(np.floor(x + 0.5))


def target_count(fraction: float, n_rows: int) -> int:
    return round_half_up(fraction * n_rows)


def check_feasible(n_matching: int, n_rows: int, fraction: float,
                   scenario_label: str = "") -> int:
    """Target matching-row count, or ScenarioInfeasibleError if a required
    stratum is empty."""
    k = target_count(fraction, n_rows)
    if k > 0 and n_matching == 0:
        raise ScenarioInfeasibleError(
            f"{scenario_label or 'scenario'}: no rows match, cannot reach "
            f"fraction {fraction}")
    if k < n_rows and n_matching == n_rows:
        raise ScenarioInfeasibleError(
            f"{scenario_label or 'scenario'}: all rows match, cannot reach "
            f"fraction {fraction}")
    return k


def resample_with_fraction(dataset: Dataset, scenario: Scenario,
                           seed: int) -> ResampleDraw:
    """One stratified bootstrap draw hitting the target fraction exactly.

    Deterministic given (dataset, scenario, seed); each stratum is sampled
    uniformly with replacement.
    """
    mask = tabular.match_mask(dataset, scenario.column, scenario.value)
    matching = np.flatnonzero(mask)
    complement = np.flatnonzero(~mask)
    n = dataset.n_rows
    k = check_feasible(matching.size, n, scenario.fraction, scenario.label)
    rng = np.random.default_rng(seed)
    parts = []
    if k > 0:
        parts.append(matching[rng.integers(0, matching.size, size=k)])
    if n - k > 0:
        parts.append(complement[rng.integers(0, complement.size, size=n - k)])
    return ResampleDraw(np.concatenate(parts), seed)


def repeated_resample(dataset: Dataset, scenario: Scenario,
                      objective: ObjectiveSpec, n_sample: int = DEFAULT_N_SAMPLE,
                      master_seed: int = 0) -> ResampleSummary:
    """n_sample independent draws for robustness, objective evaluated on each.

    Draw i uses a sub-seed hashed from (master_seed, scenario, i), so results
    are identical regardless of execution order or parallel scheduling.
    """
    if n_sample < 1:
        raise DataError("n_sample must be >= 1")
    metrics = []
    for i in range(n_sample):
        seed = derive_seed(master_seed, *scenario.seed_key(), i)
        draw = resample_with_fraction(dataset, scenario, seed)
        metrics.append(tabular.eval_metric(dataset, objective, draw.row_indices))
    values = np.asarray(metrics)
    std = float(np.std(values, ddof=1)) if n_sample > 1 else 0.0
    return ResampleSummary(float(np.mean(values)), std, metrics)


def pooled_metric_values(dataset: Dataset, scenario: Scenario,
                         metric_column: str, n_sample: int = DEFAULT_N_SAMPLE,
                         master_seed: int = 0) -> np.ndarray:
    """Metric cells of all draws pooled, for distribution-level comparison.

    Missing metric cells are dropped. Uses the same sub-seed scheme as
    repeated_resample, so the pooled sample is consistent with the per-draw
    aggregates for the same (scenario, master_seed).
    """
    parts = []
    values = dataset.column(metric_column)
    for i in range(n_sample):
        seed = derive_seed(master_seed, *scenario.seed_key(), i)
        draw = resample_with_fraction(dataset, scenario, seed)
        taken = values[draw.row_indices]
        parts.append(taken[~np.isnan(taken)])
    pooled = np.concatenate(parts) if parts else np.empty(0)
    if pooled.size == 0:
        raise DataError("all metric cells missing in resampled draws")
    return pooled


def bootstrap_baseline(dataset: Dataset, metric_column: str,
                       seed: int) -> np.ndarray:
    """Equal-size plain bootstrap of the metric column (optional baseline
    mode; the default baseline is the raw dataset)."""
    values = dataset.column(metric_column)
    rng = np.random.default_rng(derive_seed(seed, "baseline-bootstrap"))
    taken = values[rng.integers(0, dataset.n_rows, size=dataset.n_rows)]
    taken = taken[~np.isnan(taken)]
    if taken.size == 0:
        raise DataError("all metric cells missing in baseline bootstrap")
    return taken
