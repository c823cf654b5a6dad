import numpy as np
import pytest

from whatif import ObjectiveSpec, from_columns


@pytest.fixture
def toy_dataset():
    """10 rows, one categorical and one numeric column, no missing cells."""
    return from_columns({
        "cause": ["vandalism", "weather", "vandalism", "equipment", "weather",
                  "weather", "equipment", "vandalism", "equipment", "weather"],
        "minutes": [10, 20, 30, 40, 50, 60, 70, 80, 90, 100],
    })


@pytest.fixture
def mean_minutes():
    return ObjectiveSpec("minutes", "mean")


def planted_indicator_dataset(n_rows: int, match_fraction: float,
                              high: float = 100.0, low: float = 0.0,
                              seed: int = 0):
    """Dataset whose metric is `high` exactly on the matching stratum.

    Resampling it at fraction x gives a draw mean of exactly
    x_rounded*high + (1-x_rounded)*low, which makes expectations checkable
    in closed form.
    """
    rng = np.random.default_rng(seed)
    n_match = round(match_fraction * n_rows)
    labels = np.array(["v"] * n_match + ["w"] * (n_rows - n_match))
    rng.shuffle(labels)
    metric = np.where(labels == "v", high, low)
    return from_columns({"c": labels.tolist(), "m": metric.tolist()})
