"""Distribution comparison between baseline and what-if metric samples.

Provides the robust Silverman rule-of-thumb bandwidth, Gaussian kernel
density estimates, the two-sample Kolmogorov-Smirnov test with the
asymptotic p-value, and a ComparisonReport bundling summary statistics,
shared-edge histograms, densities, and the potential gain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DataError, DegenerateDistributionError
from .tabular import ObjectiveSpec, aggregate

DEFAULT_GRID_POINTS = 256
DEFAULT_ALPHA = 0.05

PERCENTILES = (5, 25, 50, 75, 95)


@dataclass
class DensityCurve:
    """KDE evaluated on an even grid spanning the data +- 3 bandwidths."""

    grid: np.ndarray
    density: np.ndarray
    bandwidth: float

    def to_dict(self) -> dict:
        return {"grid": self.grid.tolist(), "density": self.density.tolist(),
                "bandwidth": self.bandwidth}


@dataclass
class ComparisonReport:
    baseline_stats: dict
    whatif_stats: dict
    ks_statistic: float
    ks_p_value: float
    significant: bool
    potential_gain: float
    histogram_edges: np.ndarray
    baseline_counts: np.ndarray
    whatif_counts: np.ndarray
    baseline_density: Optional[DensityCurve]
    whatif_density: Optional[DensityCurve]

    def to_dict(self) -> dict:
        return {
            "baseline_stats": self.baseline_stats,
            "whatif_stats": self.whatif_stats,
            "ks_statistic": self.ks_statistic,
            "ks_p_value": self.ks_p_value,
            "significant": self.significant,
            "potential_gain": self.potential_gain,
            "histograms": {
                "edges": self.histogram_edges.tolist(),
                "baseline_counts": self.baseline_counts.tolist(),
                "whatif_counts": self.whatif_counts.tolist(),
            },
            "densities": {
                "baseline": self.baseline_density.to_dict()
                if self.baseline_density else None,
                "whatif": self.whatif_density.to_dict()
                if self.whatif_density else None,
            },
        }


def silverman_bandwidth(sample: Sequence[float]) -> float:
    """Robust Silverman rule: 0.9 * min(s, IQR/1.34) * n^(-1/5).

    s is the n-1 sample standard deviation. A zero IQR falls back to the
    plain 0.9 * s * n^(-1/5); a constant sample (s = 0) is degenerate.
    """
    x = np.asarray(sample, dtype=np.float64)
    n = x.size
    if n < 2:
        raise DataError("bandwidth needs at least 2 observations")
    s = float(np.std(x, ddof=1))
    if s == 0.0:
        raise DegenerateDistributionError("constant sample has no bandwidth")
    q75, q25 = np.percentile(x, [75, 25])
    iqr = float(q75 - q25)
    scale = min(s, iqr / 1.34) if iqr > 0 else s
    return 0.9 * scale * n ** (-0.2)


def kde(sample: Sequence[float], grid_points: int = DEFAULT_GRID_POINTS,
        bandwidth_multiplier: float = 1.0) -> DensityCurve:
    """Gaussian-kernel density estimate with the Silverman bandwidth.

    bandwidth_multiplier scales the bandwidth (the UI's graph-smoothing
    control); the grid always spans the data +- 3 effective bandwidths.
    """
    x = np.asarray(sample, dtype=np.float64)
    h = silverman_bandwidth(x) * bandwidth_multiplier
    grid = np.linspace(x.min() - 3 * h, x.max() + 3 * h, grid_points)
    # (grid, 1) - (n,) broadcast; chunk the grid to bound memory on big samples
    density = np.empty(grid_points)
    norm = 1.0 / (x.size * h * math.sqrt(2 * math.pi))
    step = max(1, int(4e6 // max(x.size, 1)))
    for start in range(0, grid_points, step):
        z = (grid[start:start + step, None] - x[None, :]) / h
        density[start:start + step] = norm * np.exp(-0.5 * z * z).sum(axis=1)
    return DensityCurve(grid, density, h)


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """Two-sample KS test: (D, asymptotic p).

    D is the sup over all sample points of |F_a - F_b| with right-continuous
    empirical CDFs. p comes from the asymptotic Kolmogorov series with
    effective size n_a*n_b/(n_a+n_b), truncated when a term drops below
    1e-10 and clamped to [0, 1].
    """
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise DataError("KS test requires two non-empty samples")
    points = np.concatenate([a, b])
    fa = np.searchsorted(a, points, side="right") / a.size
    fb = np.searchsorted(b, points, side="right") / b.size
    d = float(np.max(np.abs(fa - fb)))
    n_eff = a.size * b.size / (a.size + b.size)
    return d, _kolmogorov_p(d, n_eff)


def _kolmogorov_p(d: float, n_eff: float) -> float:
    rate = 2.0 * n_eff * d * d
    if rate == 0.0:
        return 1.0
    total = 0.0
    sign = 1.0
    for k in range(1, 101):
        term = math.exp(-rate * k * k)
        total += sign * term
        sign = -sign
        if term < 1e-10:
            break
    return min(1.0, max(0.0, 2.0 * total))


def summary_stats(values: np.ndarray) -> dict:
    values = np.asarray(values, dtype=np.float64)
    stats = {
        "mean": float(np.mean(values)),
        "std": float(np.std(values, ddof=1)) if values.size > 1 else 0.0,
        "min": float(np.min(values)),
        "max": float(np.max(values)),
    }
    for p, v in zip(PERCENTILES, np.percentile(values, PERCENTILES)):
        stats[f"p{p}"] = float(v)
    return stats


def shared_histogram_edges(pooled: np.ndarray) -> np.ndarray:
    """Freedman-Diaconis edges over the pooled data, 10 to 100 bins.

    Degenerate pooled input (zero range or zero IQR) falls back to 10 bins
    over a unit-padded range so the histogram stays drawable.
    """
    lo, hi = float(pooled.min()), float(pooled.max())
    if hi == lo:
        return np.linspace(lo - 0.5, hi + 0.5, 11)
    q75, q25 = np.percentile(pooled, [75, 25])
    width = 2.0 * (q75 - q25) * pooled.size ** (-1 / 3)
    if width <= 0:
        bins = 10
    else:
        bins = int(np.clip(math.ceil((hi - lo) / width), 10, 100))
    return np.linspace(lo, hi, bins + 1)


def compare(baseline: Sequence[float], whatif: Sequence[float],
            objective: ObjectiveSpec,
            whatif_draw_metrics: Optional[Sequence[float]] = None,
            alpha: float = DEFAULT_ALPHA,
            bandwidth_multiplier: float = 1.0) -> ComparisonReport:
    """Full baseline-vs-what-if report.

    baseline holds the baseline metric cells, whatif the metric cells pooled
    across all draws. The gain compares P(m) per side; when the per-draw
    aggregates are supplied the what-if P(m) is their mean, which keeps
    sum-type objectives on the one-draw scale.
    """
    base = np.asarray(baseline, dtype=np.float64)
    wi = np.asarray(whatif, dtype=np.float64)
    if base.size == 0 or wi.size == 0:
        raise DataError("compare requires two non-empty samples")
    d, p = ks_two_sample(base, wi)
    if whatif_draw_metrics is not None and len(whatif_draw_metrics) > 0:
        whatif_p = float(np.mean(whatif_draw_metrics))
    else:
        whatif_p = aggregate(wi, objective)
    gain = whatif_p - aggregate(base, objective)
    pooled = np.concatenate([base, wi])
    edges = shared_histogram_edges(pooled)
    base_counts, _ = np.histogram(base, bins=edges)
    wi_counts, _ = np.histogram(wi, bins=edges)
    return ComparisonReport(
        baseline_stats=summary_stats(base),
        whatif_stats=summary_stats(wi),
        ks_statistic=d,
        ks_p_value=p,
        significant=p < alpha,
        potential_gain=gain,
        histogram_edges=edges,
        baseline_counts=base_counts,
        whatif_counts=wi_counts,
        baseline_density=_maybe_kde(base, bandwidth_multiplier),
        whatif_density=_maybe_kde(wi, bandwidth_multiplier),
    )


def _maybe_kde(values: np.ndarray, bandwidth_multiplier: float):
    # degenerate sides keep their stats but render as a spike, not a curve
    try:
        return kde(values, bandwidth_multiplier=bandwidth_multiplier)
    except DataError:
        return None
