"""Exception hierarchy shared across the package.

CLI exit codes map onto this hierarchy: DataError -> 2, NumericalError -> 3.
"""


class WhatifError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


class DataError(WhatifError):
    """Input data is unusable for the requested operation."""

    code = "data_error"


class IngestionError(DataError):
    """CSV could not be parsed into a dataset."""

    code = "ingestion_error"


class UnknownColumnError(DataError):
    code = "unknown_column"


class UnknownValueError(DataError):
    code = "unknown_value"


class UnknownDatasetError(DataError):
    code = "unknown_dataset"


class UnknownJobError(DataError):
    code = "unknown_job"


class ScenarioInfeasibleError(DataError):
    """Requested fraction cannot be realized (a required stratum is empty)."""

    code = "scenario_infeasible"


class DegenerateDistributionError(DataError):
    """Sample is constant; density estimation is undefined."""

    code = "degenerate_distribution"


class NumericalError(WhatifError):
    """Numerical failure (non-PD kernel matrix after jitter escalation)."""

    code = "numerical_failure"
