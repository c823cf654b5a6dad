"""Synthetic power-outage-style dataset shared by the demo scripts.

Three outage causes with different restore-time profiles and a lognormal
customers-affected column, split over two periods so the backtest demo has
a time axis. Seeded, so every demo run prints the same numbers.
"""

import numpy as np

from whatif import Dataset, from_columns


def outage_dataset(n: int = 2000, seed: int = 20240):
    rng = np.random.default_rng(seed)
    cause = rng.choice(
        ["severe weather", "vandalism", "equipment failure"],
        size=n, p=[0.32, 0.10, 0.58])
    restore = np.where(cause == "severe weather",
                       rng.normal(2900, 450, n),
                       rng.normal(1750, 350, n)).clip(30)
    customers = np.where(
        cause == "vandalism",
        rng.lognormal(7.2, 0.9, n),      # vandalism hits small areas
        rng.lognormal(8.0, 1.0, n))
    period = rng.integers(0, 2, size=n)
    return from_columns({
        "period": period.tolist(),
        "cause": cause.tolist(),
        "restore_minutes": restore.tolist(),
        "customers": customers.tolist(),
    })


def describe(dataset: Dataset) -> None:
    print(f"{dataset.n_rows} rows")
    for spec in dataset.columns:
        print(f"  {spec.name:<16} {spec.kind.value:<12} "
              f"missing={spec.missing_count}")
