import io
import json
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from whatif.service import SessionRegistry, create_app


def sample_csv(seed=0, n=240):
    rng = np.random.default_rng(seed)
    causes = rng.choice(["weather", "vandalism", "equipment"], size=n,
                        p=[0.4, 0.2, 0.4])
    minutes = np.where(causes == "weather", 300.0, 100.0) + rng.normal(0, 20, n)
    lines = ["cause,minutes"]
    lines += [f"{c},{float(m)!r}" for c, m in zip(causes, minutes)]
    return "\n".join(lines) + "\n"


@pytest.fixture
def client():
    return TestClient(create_app())


@pytest.fixture
def dataset_id(client):
    r = client.post("/datasets", content=sample_csv(),
                    headers={"content-type": "text/csv"})
    assert r.status_code == 200
    return r.json()["dataset_id"]


class TestDatasets:
    def test_upload_returns_column_metadata(self, client):
        r = client.post("/datasets", content=sample_csv(),
                        headers={"content-type": "text/csv"})
        body = r.json()
        assert body["n_rows"] == 240
        kinds = {c["name"]: c["kind"] for c in body["columns"]}
        assert kinds == {"cause": "categorical", "minutes": "numeric"}

    def test_multipart_upload(self, client):
        r = client.post("/datasets",
                        files={"file": ("d.csv", io.BytesIO(
                            sample_csv().encode()), "text/csv")})
        assert r.status_code == 200
        assert "dataset_id" in r.json()

    def test_upload_cap(self):
        app = create_app(SessionRegistry(max_upload_bytes=64))
        r = TestClient(app).post("/datasets", content=sample_csv(),
                                 headers={"content-type": "text/csv"})
        assert r.status_code == 400

    def test_bad_csv_is_4xx(self, client):
        r = client.post("/datasets", content="a,b\n1\n",
                        headers={"content-type": "text/csv"})
        assert r.status_code == 400
        assert r.json()["code"] == "ingestion_error"

    def test_columns_listing_with_fractions(self, client, dataset_id):
        r = client.get(f"/datasets/{dataset_id}/columns")
        cols = {c["name"]: c for c in r.json()["columns"]}
        cause = cols["cause"]
        assert sum(v["fraction"] for v in cause["values"]) == pytest.approx(1.0)
        assert cols["minutes"]["bucketed"] is True
        assert all("[" in v["value"] for v in cols["minutes"]["values"])

    def test_unknown_dataset_404(self, client):
        r = client.get("/datasets/doesnotexist/columns")
        assert r.status_code == 404
        assert r.json()["code"] == "unknown_dataset"


class TestWhatif:
    def test_identity_scenario_null_result(self, client, dataset_id):
        cols = client.get(f"/datasets/{dataset_id}/columns").json()["columns"]
        cause = next(c for c in cols if c["name"] == "cause")
        weather = next(v for v in cause["values"] if v["value"] == "weather")
        r = client.post(f"/datasets/{dataset_id}/whatif", json={
            "column": "cause", "value": "weather",
            "fraction": weather["fraction"], "metric": "minutes",
            "operator": "mean", "seed": 3})
        body = r.json()
        scale = body["report"]["baseline_stats"]["std"]
        assert abs(body["report"]["potential_gain"]) < scale / 4
        assert body["report"]["ks_p_value"] > 0.5
        assert not body["report"]["significant"]

    def test_unknown_column_error_shape(self, client, dataset_id):
        r = client.post(f"/datasets/{dataset_id}/whatif", json={
            "column": "nope", "value": "x", "fraction": 0.5,
            "metric": "minutes"})
        assert r.status_code == 404
        assert r.json()["code"] == "unknown_column"

    def test_smoothing_multiplier_respected(self, client, dataset_id):
        def bandwidth(mult):
            r = client.post(f"/datasets/{dataset_id}/whatif", json={
                "column": "cause", "value": "vandalism", "fraction": 0.0,
                "metric": "minutes", "seed": 1, "smoothing": mult})
            return r.json()["report"]["densities"]["whatif"]["bandwidth"]

        assert bandwidth(2.0) == pytest.approx(2 * bandwidth(1.0))

    def test_malformed_request_is_4xx(self, client, dataset_id):
        r = client.post(f"/datasets/{dataset_id}/whatif",
                        json={"column": "cause"})
        assert 400 <= r.status_code < 500


class TestMargins:
    def test_curve_and_optimum(self, client, dataset_id):
        r = client.post(f"/datasets/{dataset_id}/margins", json={
            "column": "cause", "value": "weather", "metric": "minutes",
            "operator": "mean", "direction": "minimize",
            "n_sample": 6, "seed": 2, "iterations": 10})
        body = r.json()
        assert len(body["curve"]) == 11
        assert body["optimum"]["x_star"] <= 0.05  # removing weather helps
        xs = [p["x"] for p in body["curve"]]
        assert xs == sorted(xs)

    def test_custom_fraction_grid(self, client, dataset_id):
        r = client.post(f"/datasets/{dataset_id}/margins", json={
            "column": "cause", "value": "weather", "metric": "minutes",
            "fractions": [0.0, 0.5, 1.0], "n_sample": 4, "seed": 2,
            "iterations": 10})
        assert [p["x"] for p in r.json()["curve"]] == [0.0, 0.5, 1.0]


class TestJobs:
    def wait_for(self, client, job_id, timeout=60.0):
        deadline = time.time() + timeout
        while time.time() < deadline:
            status = client.get(f"/jobs/{job_id}").json()
            if status["status"] in ("done", "failed"):
                return status
            time.sleep(0.05)
        raise AssertionError("job did not finish in time")

    def test_recommendations_job_lifecycle(self, client, dataset_id):
        r = client.post(f"/datasets/{dataset_id}/recommendations", json={
            "metric": "minutes", "n_sample": 5, "iterations": 10,
            "seed": 4, "min_support": 2})
        job_id = r.json()["job_id"]
        status = self.wait_for(client, job_id)
        assert status["status"] == "done"
        result = status["result"]
        assert result["attempted"] + len(result["skipped"]) == 3
        ranks = [rec["rank"] for rec in result["recommendations"]]
        assert ranks == sorted(ranks)

        events = client.get(f"/jobs/{job_id}/events")
        lines = [json.loads(l) for l in events.text.strip().splitlines()]
        assert len(lines) == 3
        assert all(l["status"] in ("done", "skipped") for l in lines)

    def test_unknown_job_404(self, client):
        r = client.get("/jobs/nope")
        assert r.status_code == 404
        assert r.json()["code"] == "unknown_job"

    def test_service_matches_cli_for_same_seed(self, client, dataset_id,
                                               tmp_path):
        from whatif.cli import main

        r = client.post(f"/datasets/{dataset_id}/recommendations", json={
            "metric": "minutes", "n_sample": 6, "iterations": 10,
            "seed": 21, "min_support": 2})
        service_result = self.wait_for(client, r.json()["job_id"])["result"]

        csv_path = tmp_path / "d.csv"
        csv_path.write_text(sample_csv(), encoding="utf-8")
        out = tmp_path / "cli.json"
        assert main(["recommend", "--data", str(csv_path), "--metric",
                     "minutes", "--n-sample", "6", "--iterations", "10",
                     "--seed", "21", "--min-support", "2",
                     "--out", str(out)]) == 0
        cli_result = json.loads(out.read_text())
        assert cli_result == service_result

    def test_invalid_metric_fails_fast(self, client, dataset_id):
        r = client.post(f"/datasets/{dataset_id}/recommendations", json={
            "metric": "cause"})
        assert r.status_code == 400


class TestBacktest:
    def test_endpoint_returns_report(self, client):
        rng = np.random.default_rng(5)
        n = 200
        rows = ["t,c,m"]
        for period in (0, 1):
            cs = rng.choice(["a", "b"], size=n)
            ms = rng.normal(10, 1, size=n)
            rows += [f"{period},{c},{float(m)!r}" for c, m in zip(cs, ms)]
        csv_text = "\n".join(rows) + "\n"
        r = client.post("/datasets", content=csv_text,
                        headers={"content-type": "text/csv"})
        ds = r.json()["dataset_id"]
        r = client.post(f"/datasets/{ds}/backtest", json={
            "time_column": "t", "split": 1, "metric": "m",
            "columns": ["c"], "n_sample": 8, "seed": 1})
        body = r.json()
        assert body["n_rows_a"] == n and body["n_rows_b"] == n
        assert body["mae"] < 0.2
        assert len(body["results"]) == 2
