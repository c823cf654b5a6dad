"""What-if scenario analysis for tabular data.

Simulate hypothetical realities by stratified bootstrap resampling, compare
them to a baseline with density estimates and a KS test, find metric-optimal
scenario intensities with GP Bayesian optimization, and auto-generate ranked
high-impact recommendations by sweeping the whole column/value space.
"""

__version__ = "0.1.0"

from .backtest import BacktestReport, backtest
from .bayesopt import (GPModel, MarginalPoint, OptimizationResult,
                       OptimizeConfig, expected_improvement, fit_gp,
                       gp_posterior, marginal_curve, optimize_fraction)
from .engine import (EngineConfig, Recommendation, SweepResult,
                     generate_hypotheses, rank_recommendations)
from .errors import (DataError, DegenerateDistributionError, IngestionError,
                     NumericalError, ScenarioInfeasibleError,
                     UnknownColumnError, UnknownValueError, WhatifError)
from .resample import (ResampleDraw, ResampleSummary, Scenario,
                       repeated_resample, resample_with_fraction)
from .stats import (ComparisonReport, DensityCurve, compare, kde,
                    ks_two_sample, silverman_bandwidth)
from .tabular import (Bucket, ColumnKind, ColumnSpec, Dataset, ObjectiveSpec,
                      bucket_numeric, current_fraction, eval_metric,
                      from_columns, load_csv)

__all__ = [
    "BacktestReport", "backtest",
    "GPModel", "MarginalPoint", "OptimizationResult", "OptimizeConfig",
    "expected_improvement", "fit_gp", "gp_posterior", "marginal_curve",
    "optimize_fraction",
    "EngineConfig", "Recommendation", "SweepResult", "generate_hypotheses",
    "rank_recommendations",
    "DataError", "DegenerateDistributionError", "IngestionError",
    "NumericalError", "ScenarioInfeasibleError", "UnknownColumnError",
    "UnknownValueError", "WhatifError",
    "ResampleDraw", "ResampleSummary", "Scenario", "repeated_resample",
    "resample_with_fraction",
    "ComparisonReport", "DensityCurve", "compare", "kde", "ks_two_sample",
    "silverman_bandwidth",
    "Bucket", "ColumnKind", "ColumnSpec", "Dataset", "ObjectiveSpec",
    "bucket_numeric", "current_fraction", "eval_metric", "from_columns",
    "load_csv",
]
