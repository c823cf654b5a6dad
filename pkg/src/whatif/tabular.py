"""Columnar dataset: CSV ingestion with type inference, quantile bucketing,
value fractions, and metric aggregation.

A Dataset is immutable after construction; every operation here is a pure
function of its inputs, so datasets are safe to share across threads.
Numeric columns are float64 arrays with NaN for missing cells; categorical
columns are object arrays of str with None for missing cells.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import DataError, IngestionError, UnknownColumnError, UnknownValueError

#: Fraction of non-missing cells that must parse as finite reals for a column
#: to be typed Numeric. Tolerates sparse entry noise without coercing ID-like
#: text columns.
NUMERIC_THRESHOLD = 0.95

#: Label under which missing cells are swept as their own categorical value.
MISSING_LABEL = "(missing)"

DEFAULT_MISSING_TOKENS = ("", "NA", "null")


class ColumnKind(str, Enum):
    CATEGORICAL = "categorical"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class ColumnSpec:
    """Name, inferred kind, and missing-cell count of one column."""

    name: str
    kind: ColumnKind
    missing_count: int


@dataclass(frozen=True)
class Bucket:
    """Half-open value range [lower, upper) of a numeric column.

    The last bucket of a partition closes on the right so the observed
    [min, max] range is fully covered.
    """

    column: str
    lower: float
    upper: float
    label: str
    include_upper: bool = False

    def contains(self, values: np.ndarray) -> np.ndarray:
        mask = (values >= self.lower) & (values < self.upper)
        if self.include_upper:
            mask |= values == self.upper
        return mask


@dataclass(frozen=True)
class ObjectiveSpec:
    """Target metric column plus the aggregation applied to it.

    operator is one of "mean", "sum", "percentile"; q is the percentile in
    (0, 100) and only meaningful for "percentile". direction states whether
    lower or higher aggregates are better when optimizing.
    """

    metric_column: str
    operator: str = "mean"
    q: Optional[float] = None
    direction: str = "minimize"

    def __post_init__(self):
        if self.operator not in ("mean", "sum", "percentile"):
            raise DataError(f"unknown operator: {self.operator!r}")
        if self.operator == "percentile":
            if self.q is None or not 0 < self.q < 100:
                raise DataError("percentile operator requires q in (0, 100)")
        if self.direction not in ("minimize", "maximize"):
            raise DataError(f"unknown direction: {self.direction!r}")

    def validate_for(self, dataset: "Dataset") -> None:
        spec = dataset.spec(self.metric_column)
        if spec.kind is not ColumnKind.NUMERIC:
            raise DataError(f"metric column {self.metric_column!r} is not numeric")

    def to_dict(self) -> dict:
        d = {"metric": self.metric_column, "operator": self.operator,
             "direction": self.direction}
        if self.operator == "percentile":
            d["q"] = self.q
        return d


#: A scenario value: a categorical label (str, possibly MISSING_LABEL),
#: a raw numeric value, or a Bucket.
ScenarioValue = Union[str, float, int, Bucket]


class Dataset:
    """Immutable columnar table with typed columns.

    Construct via load_csv() or from_columns(). Cell arrays are marked
    read-only; row-subset views are produced with select().
    """

    def __init__(self, specs: Sequence[ColumnSpec], cells: dict):
        names = [s.name for s in specs]
        if len(set(names)) != len(names):
            raise DataError("column names must be unique")
        if any(not n for n in names):
            raise DataError("column names must be non-empty")
        lengths = {len(cells[n]) for n in names}
        if len(lengths) > 1:
            raise DataError(f"columns have unequal lengths: {sorted(lengths)}")
        self._specs = list(specs)
        self._by_name = {s.name: s for s in specs}
        self._cells = {}
        for name in names:
            arr = np.asarray(cells[name])
            arr.setflags(write=False)
            self._cells[name] = arr
        self.n_rows = lengths.pop() if lengths else 0
        self._unique_cache: dict = {}

    @property
    def columns(self) -> list[ColumnSpec]:
        return list(self._specs)

    def spec(self, name: str) -> ColumnSpec:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownColumnError(f"no such column: {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        self.spec(name)
        return self._cells[name]

    def missing_mask(self, name: str) -> np.ndarray:
        values = self.column(name)
        if self.spec(name).kind is ColumnKind.NUMERIC:
            return np.isnan(values)
        return np.array([v is None for v in values], dtype=bool)

    def unique_values(self, name: str) -> list:
        """Sorted non-missing unique values of a column."""
        if name not in self._unique_cache:
            values = self.column(name)
            if self.spec(name).kind is ColumnKind.NUMERIC:
                uniq = sorted(float(v) for v in np.unique(values[~np.isnan(values)]))
            else:
                uniq = sorted({v for v in values if v is not None})
            self._unique_cache[name] = uniq
        return list(self._unique_cache[name])

    def select(self, rows: np.ndarray) -> "Dataset":
        """New Dataset holding the given rows (a multiset; repeats allowed)."""
        rows = np.asarray(rows, dtype=np.intp)
        specs = []
        cells = {}
        for spec in self._specs:
            taken = self._cells[spec.name][rows]
            if spec.kind is ColumnKind.NUMERIC:
                missing = int(np.isnan(taken).sum())
            else:
                missing = sum(1 for v in taken if v is None)
            specs.append(ColumnSpec(spec.name, spec.kind, missing))
            cells[spec.name] = taken
        return Dataset(specs, cells)

    def write_csv(self, path, delimiter: str = ",", missing_token: str = "") -> None:
        """Serialize back to CSV; floats round-trip through repr()."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, delimiter=delimiter)
            names = [s.name for s in self._specs]
            writer.writerow(names)
            kinds = [s.kind for s in self._specs]
            for i in range(self.n_rows):
                row = []
                for name, kind in zip(names, kinds):
                    v = self._cells[name][i]
                    if kind is ColumnKind.NUMERIC:
                        row.append(missing_token if math.isnan(v) else repr(float(v)))
                    else:
                        row.append(missing_token if v is None else v)
                writer.writerow(row)


def load_csv(path, delimiter: str = ",",
             missing_tokens: Iterable[str] = DEFAULT_MISSING_TOKENS) -> Dataset:
    """Load a UTF-8 CSV with a header row into a typed Dataset.

    A column is Numeric iff at least 95% of its non-missing cells parse as
    finite reals; unparseable cells of a Numeric column count as missing.
    Raises IngestionError for unreadable files, ragged rows (naming the row),
    or zero data rows.
    """
    try:
        with open(path, "r", newline="", encoding="utf-8") as fh:
            return _read_csv(fh, str(path), delimiter, set(missing_tokens))
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc


def load_csv_text(text: str, delimiter: str = ",",
                  missing_tokens: Iterable[str] = DEFAULT_MISSING_TOKENS,
                  source: str = "<body>") -> Dataset:
    """Same as load_csv but from an in-memory CSV string (service uploads)."""
    import io

    return _read_csv(io.StringIO(text, newline=""), source, delimiter,
                     set(missing_tokens))


def _read_csv(fh, source: str, delimiter: str, missing: set) -> Dataset:
    reader = csv.reader(fh, delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise IngestionError(f"{source}: empty file") from None
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            row = [""]  # a blank line is one empty field
        if len(row) != len(header):
            raise IngestionError(
                f"{source}: row {lineno} has {len(row)} fields, "
                f"expected {len(header)}")
        rows.append(row)
    if not rows:
        raise IngestionError(f"{source}: no data rows")
    raw_columns = {name: [row[j] for row in rows] for j, name in enumerate(header)}
    return _build_dataset(header, raw_columns, missing)


def from_columns(raw_columns: dict,
                 missing_tokens: Iterable[str] = DEFAULT_MISSING_TOKENS) -> Dataset:
    """Build a Dataset from {name: list-of-cell-strings-or-numbers}.

    Numbers pass through; everything else goes through the same inference as
    load_csv. Convenient for synthetic data in scripts and tests.
    """
    names = list(raw_columns)
    cols = {n: [_to_cell_text(v) for v in raw_columns[n]] for n in names}
    return _build_dataset(names, cols, set(missing_tokens))


def _to_cell_text(v) -> str:
    if isinstance(v, str):
        return v
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))  # repr(float) round-trips exactly
    return str(v)


def _build_dataset(names: Sequence[str], raw_columns: dict, missing: set) -> Dataset:
    specs = []
    cells = {}
    for name in names:
        raw = raw_columns[name]
        parsed, kind, n_missing = _infer_column(raw, missing)
        specs.append(ColumnSpec(name, kind, n_missing))
        cells[name] = parsed
    return Dataset(specs, cells)


def _parse_real(text: str) -> Optional[float]:
    try:
        v = float(text)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def _infer_column(raw: list, missing: set):
    present = [c for c in raw if c not in missing]
    parseable = sum(1 for c in present if _parse_real(c) is not None)
    numeric = bool(present) and parseable >= NUMERIC_THRESHOLD * len(present)
    if numeric:
        values = np.empty(len(raw), dtype=np.float64)
        n_missing = 0
        for i, c in enumerate(raw):
            v = None if c in missing else _parse_real(c)
            if v is None:
                values[i] = np.nan
                n_missing += 1  # missing tokens and unparseable cells alike
            else:
                values[i] = v
        return values, ColumnKind.NUMERIC, n_missing
    values = np.empty(len(raw), dtype=object)
    n_missing = 0
    for i, c in enumerate(raw):
        if c in missing:
            values[i] = None
            n_missing += 1
        else:
            values[i] = c
    return values, ColumnKind.CATEGORICAL, n_missing


def bucket_numeric(dataset: Dataset, column: str, n_buckets: int) -> list[Bucket]:
    """Partition a numeric column into quantile buckets.

    Edges sit at the i/n_buckets empirical quantiles (linear interpolation);
    tied edges are merged, so heavily tied data may yield fewer buckets.
    """
    spec = dataset.spec(column)
    if spec.kind is not ColumnKind.NUMERIC:
        raise DataError(f"column {column!r} is not numeric")
    if n_buckets < 2:
        raise DataError("n_buckets must be >= 2")
    values = dataset.column(column)
    values = values[~np.isnan(values)]
    if values.size == 0:
        raise DataError(f"column {column!r} has no non-missing values")
    qs = np.arange(1, n_buckets) / n_buckets
    inner = np.quantile(values, qs)
    edges = [float(values.min())]
    for e in inner:
        if float(e) > edges[-1]:
            edges.append(float(e))
    top = float(values.max())
    if top > edges[-1]:
        edges.append(top)
    if len(edges) == 1:  # constant column collapses to one degenerate bucket
        edges.append(edges[0])
    buckets = []
    for i in range(len(edges) - 1):
        last = i == len(edges) - 2
        lo, hi = edges[i], edges[i + 1]
        bracket = "]" if last else ")"
        buckets.append(Bucket(column, lo, hi, f"[{lo:g}, {hi:g}{bracket}", last))
    return buckets


def match_mask(dataset: Dataset, column: str, value: ScenarioValue) -> np.ndarray:
    """Boolean mask of rows matching a scenario value.

    Missing cells never match, except under the dedicated MISSING_LABEL
    category for categorical columns.
    """
    spec = dataset.spec(column)
    values = dataset.column(column)
    if isinstance(value, Bucket):
        if spec.kind is not ColumnKind.NUMERIC:
            raise UnknownValueError(f"bucket value on non-numeric column {column!r}")
        if value.column != column:
            raise UnknownValueError(
                f"bucket for column {value.column!r} applied to {column!r}")
        with np.errstate(invalid="ignore"):
            mask = value.contains(values)
        return mask & ~np.isnan(values)
    if spec.kind is ColumnKind.NUMERIC:
        if isinstance(value, str):
            raise UnknownValueError(
                f"categorical value {value!r} on numeric column {column!r}")
        with np.errstate(invalid="ignore"):
            return values == float(value)
    if value == MISSING_LABEL:
        return dataset.missing_mask(column)
    if not isinstance(value, str):
        raise UnknownValueError(
            f"numeric value {value!r} on categorical column {column!r}")
    return np.array([v == value for v in values], dtype=bool)


def resolve_value(dataset: Dataset, column: str, raw: Union[str, float, int],
                  n_unique: int = 20, n_buckets: int = 10) -> ScenarioValue:
    """Map a user-supplied value (CLI flag or API field) onto the column's
    scenario domain: a categorical label, a raw number, or a Bucket.

    Numeric columns with more than n_unique distinct values are bucketed;
    the value must then be a bucket label or a number inside some bucket.
    """
    spec = dataset.spec(column)
    if spec.kind is ColumnKind.CATEGORICAL:
        return str(raw)
    uniques = dataset.unique_values(column)
    if len(uniques) > n_unique:
        buckets = bucket_numeric(dataset, column, n_buckets)
        if isinstance(raw, str):
            for bucket in buckets:
                if bucket.label == raw:
                    return bucket
            parsed = _parse_real(raw)
            if parsed is None:
                raise UnknownValueError(
                    f"{raw!r} is neither a bucket label nor a number for "
                    f"column {column!r}")
            raw = parsed
        for bucket in buckets:
            if bucket.contains(np.array([float(raw)]))[0]:
                return bucket
        raise UnknownValueError(
            f"value {raw} outside the observed range of column {column!r}")
    if isinstance(raw, str):
        parsed = _parse_real(raw)
        if parsed is None:
            raise UnknownValueError(
                f"{raw!r} is not numeric for column {column!r}")
        return parsed
    return float(raw)


def current_fraction(dataset: Dataset, column: str, value: ScenarioValue) -> float:
    """Fraction of rows currently matching the value (missing cells count
    against the denominator but never match)."""
    return float(match_mask(dataset, column, value).sum()) / dataset.n_rows


def value_label(value: ScenarioValue) -> str:
    """Stable text label for a scenario value, used in reports and seeds."""
    if isinstance(value, Bucket):
        return value.label
    if isinstance(value, str):
        return value
    return f"{float(value):g}"


def eval_metric(dataset: Dataset, objective: ObjectiveSpec,
                rows: Optional[np.ndarray] = None) -> float:
    """Apply the objective's aggregation to the metric column.

    rows, when given, is a row-index multiset (repeats allowed). Missing
    metric cells are skipped; if nothing remains the selection is unusable.
    """
    objective.validate_for(dataset)
    values = dataset.column(objective.metric_column)
    if rows is not None:
        values = values[np.asarray(rows, dtype=np.intp)]
    values = values[~np.isnan(values)]
    if values.size == 0:
        raise DataError(
            f"all metric cells missing in selection for "
            f"{objective.metric_column!r}")
    return aggregate(values, objective)


def aggregate(values: np.ndarray, objective: ObjectiveSpec) -> float:
    """Aggregation operator on an already-cleaned value array."""
    if objective.operator == "mean":
        return float(np.mean(values))
    if objective.operator == "sum":
        return float(np.sum(values))
    return float(np.percentile(values, objective.q))
