import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whatif import (Bucket, ColumnKind, DataError, IngestionError,
                    ObjectiveSpec, UnknownColumnError, bucket_numeric,
                    current_fraction, eval_metric, from_columns, load_csv)
from whatif.tabular import MISSING_LABEL, match_mask, resolve_value


def write_csv(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    def test_three_column_integer_csv(self, tmp_path):
        rows = "\n".join(f"a{i},{i},{i * 2}" for i in range(10))
        ds = load_csv(write_csv(tmp_path, "name,x,y\n" + rows + "\n"))
        assert ds.n_rows == 10
        assert ds.spec("x").kind is ColumnKind.NUMERIC
        assert ds.spec("name").kind is ColumnKind.CATEGORICAL

    def test_letters_are_categorical(self, tmp_path):
        ds = load_csv(write_csv(tmp_path, "c\na\nb\na\n"))
        assert ds.spec("c").kind is ColumnKind.CATEGORICAL
        assert ds.spec("c").missing_count == 0

    def test_95_percent_rule_with_one_stray_cell(self, tmp_path):
        # 19 parseable cells out of 20 non-missing: exactly at the threshold,
        # so the column is numeric and the stray cell counts as missing
        cells = [str(i) for i in range(1, 20)]
        cells.insert(2, "x")
        ds = load_csv(write_csv(tmp_path, "v\n" + "\n".join(cells) + "\n"))
        assert ds.spec("v").kind is ColumnKind.NUMERIC
        assert ds.spec("v").missing_count == 1
        assert np.isnan(ds.column("v")[2])

    def test_below_threshold_stays_categorical(self, tmp_path):
        cells = [str(i) for i in range(1, 19)] + ["x", "y"]
        ds = load_csv(write_csv(tmp_path, "v\n" + "\n".join(cells) + "\n"))
        assert ds.spec("v").kind is ColumnKind.CATEGORICAL

    def test_missing_tokens_recorded(self, tmp_path):
        ds = load_csv(write_csv(tmp_path, "v\n1\nNA\n2\nnull\n\n3\n"))
        assert ds.spec("v").kind is ColumnKind.NUMERIC
        assert ds.spec("v").missing_count == 3

    def test_ragged_row_names_the_row(self, tmp_path):
        path = write_csv(tmp_path, "a,b\n1,2\n3\n")
        with pytest.raises(IngestionError, match="row 3"):
            load_csv(path)

    def test_zero_data_rows(self, tmp_path):
        with pytest.raises(IngestionError, match="no data rows"):
            load_csv(write_csv(tmp_path, "a,b\n"))

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(IngestionError):
            load_csv(tmp_path / "missing.csv")

    def test_custom_delimiter(self, tmp_path):
        ds = load_csv(write_csv(tmp_path, "a;b\n1;2\n"), delimiter=";")
        assert [s.name for s in ds.columns] == ["a", "b"]

    def test_roundtrip_is_lossless(self, tmp_path):
        src = write_csv(tmp_path, "c,v\nfoo,1.5\nbar,0.3333333333333333\n,NA\n")
        ds = load_csv(src)
        out = tmp_path / "copy.csv"
        ds.write_csv(out)
        again = load_csv(out)
        for spec in ds.columns:
            a, b = ds.column(spec.name), again.column(spec.name)
            if spec.kind is ColumnKind.NUMERIC:
                assert np.array_equal(a, b, equal_nan=True)
            else:
                assert list(a) == list(b)


class TestBucketNumeric:
    def test_quartiles_of_1_to_100(self):
        ds = from_columns({"v": list(range(1, 101))})
        buckets = bucket_numeric(ds, "v", 4)
        inner = [b.upper for b in buckets[:-1]]
        assert inner == [25.75, 50.5, 75.25]
        values = ds.column("v")
        counts = [int(b.contains(values).sum()) for b in buckets]
        assert counts == [25, 25, 25, 25]

    def test_constant_column_collapses(self):
        ds = from_columns({"v": [5, 5, 5, 5]})
        buckets = bucket_numeric(ds, "v", 4)
        assert len(buckets) == 1
        assert (buckets[0].lower, buckets[0].upper) == (5.0, 5.0)
        assert buckets[0].contains(np.array([5.0]))[0]

    def test_two_buckets_split_evenly(self):
        ds = from_columns({"v": [1, 2, 3, 4]})
        buckets = bucket_numeric(ds, "v", 2)
        values = ds.column("v")
        assert [int(b.contains(values).sum()) for b in buckets] == [2, 2]

    def test_rejects_categorical(self, toy_dataset):
        with pytest.raises(DataError):
            bucket_numeric(toy_dataset, "cause", 4)

    def test_rejects_all_missing(self):
        ds = from_columns({"v": ["NA", "NA"], "w": [1, 2]})
        assert ds.spec("v").kind is ColumnKind.CATEGORICAL  # nothing parseable
        ds2 = from_columns({"v": ["1", "NA"], "w": [1, 2]})
        sub = ds2.select(np.array([1]))
        with pytest.raises(DataError):
            bucket_numeric(sub, "v", 2)

    @given(st.lists(st.integers(min_value=-10_000, max_value=10_000),
                    min_size=4, max_size=200, unique=True),
           st.integers(min_value=2, max_value=8))
    @settings(max_examples=60, deadline=None)
    def test_partition_property(self, values, n_buckets):
        ds = from_columns({"v": values})
        buckets = bucket_numeric(ds, "v", n_buckets)
        arr = ds.column("v")
        membership = np.zeros(len(values), dtype=int)
        for b in buckets:
            membership += b.contains(arr).astype(int)
        assert np.all(membership == 1)  # every cell in exactly one bucket
        counts = [int(b.contains(arr).sum()) for b in buckets]
        if len(buckets) == n_buckets:
            target = len(values) / n_buckets
            assert all(abs(c - target) <= 1 for c in counts)


class TestCurrentFraction:
    def test_simple_count(self, toy_dataset):
        assert current_fraction(toy_dataset, "cause", "vandalism") == 0.3

    def test_absent_value_is_zero(self, toy_dataset):
        assert current_fraction(toy_dataset, "cause", "earthquake") == 0.0

    def test_missing_label_category(self):
        ds = from_columns({"c": ["a", "", "b", ""], "m": [1, 2, 3, 4]})
        assert current_fraction(ds, "c", MISSING_LABEL) == 0.5

    def test_unknown_column(self, toy_dataset):
        with pytest.raises(UnknownColumnError):
            current_fraction(toy_dataset, "nope", "x")

    def test_fractions_sum_to_presence_ratio(self):
        ds = from_columns({"c": ["a", "b", "", "a", "NA", "c"],
                           "m": [1, 2, 3, 4, 5, 6]})
        total = sum(current_fraction(ds, "c", v)
                    for v in ds.unique_values("c"))
        spec = ds.spec("c")
        assert total == pytest.approx((ds.n_rows - spec.missing_count)
                                      / ds.n_rows)

    def test_bucket_fraction(self):
        ds = from_columns({"v": list(range(1, 101))})
        buckets = bucket_numeric(ds, "v", 4)
        assert current_fraction(ds, "v", buckets[0]) == 0.25


class TestEvalMetric:
    def test_mean(self):
        ds = from_columns({"m": [1, 2, 3]})
        assert eval_metric(ds, ObjectiveSpec("m", "mean")) == 2.0

    def test_sum(self):
        ds = from_columns({"m": [1, 2, 3]})
        assert eval_metric(ds, ObjectiveSpec("m", "sum")) == 6.0

    def test_median_linear_interpolation(self):
        ds = from_columns({"m": [10, 20, 30, 40]})
        assert eval_metric(ds, ObjectiveSpec("m", "percentile", 50)) == 25.0

    def test_rows_multiset(self):
        ds = from_columns({"m": [10, 20, 30]})
        rows = np.array([0, 0, 2])
        assert eval_metric(ds, ObjectiveSpec("m", "mean"), rows) == pytest.approx(
            (10 + 10 + 30) / 3)

    def test_missing_skipped(self):
        ds = from_columns({"m": ["1", "NA", "3"]})
        assert eval_metric(ds, ObjectiveSpec("m", "mean")) == 2.0

    def test_all_missing_errors(self):
        ds = from_columns({"m": ["1", "NA", "3"]})
        with pytest.raises(DataError):
            eval_metric(ds, ObjectiveSpec("m", "mean"), np.array([1]))

    def test_invalid_percentile_q(self):
        with pytest.raises(DataError):
            ObjectiveSpec("m", "percentile", 0)
        with pytest.raises(DataError):
            ObjectiveSpec("m", "percentile", 100)

    def test_metric_must_be_numeric(self, toy_dataset):
        with pytest.raises(DataError):
            eval_metric(toy_dataset, ObjectiveSpec("cause", "mean"))

    @given(st.lists(st.floats(min_value=-1e6, max_value=1e6,
                              allow_nan=False), min_size=1, max_size=50))
    @settings(max_examples=60, deadline=None)
    def test_mean_within_hull(self, values):
        ds = from_columns({"m": values})
        m = eval_metric(ds, ObjectiveSpec("m", "mean"))
        assert min(values) - 1e-9 <= m <= max(values) + 1e-9


class TestResolveValue:
    def test_categorical_passthrough(self, toy_dataset):
        assert resolve_value(toy_dataset, "cause", "weather") == "weather"

    def test_numeric_raw_when_few_uniques(self, toy_dataset):
        v = resolve_value(toy_dataset, "minutes", "40", n_unique=20)
        assert v == 40.0

    def test_bucket_label_lookup(self):
        ds = from_columns({"v": list(range(1, 101))})
        buckets = bucket_numeric(ds, "v", 10)
        v = resolve_value(ds, "v", buckets[3].label, n_unique=20, n_buckets=10)
        assert isinstance(v, Bucket) and v.label == buckets[3].label

    def test_number_maps_to_containing_bucket(self):
        ds = from_columns({"v": list(range(1, 101))})
        v = resolve_value(ds, "v", 12.0, n_unique=20, n_buckets=4)
        assert isinstance(v, Bucket)
        assert v.lower <= 12.0 < v.upper


class TestImmutability:
    def test_cells_are_read_only(self, toy_dataset):
        with pytest.raises(ValueError):
            toy_dataset.column("minutes")[0] = 999

    def test_match_mask_missing_never_matches(self):
        ds = from_columns({"v": ["1", "NA", "2", "1"]})
        assert match_mask(ds, "v", 1.0).tolist() == [True, False, False, True]
