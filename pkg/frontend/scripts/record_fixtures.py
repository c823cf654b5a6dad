"""Record real service responses as JSON fixtures for the frontend tests.

Run from the repo root (after `pip install -e .[test]`):

    python3 frontend/scripts/record_fixtures.py

Snapshot tests render these payloads; re-record only when the API shape
changes, and review the snapshot diffs when you do.
"""

import json
import pathlib
import time

import numpy as np
from fastapi.testclient import TestClient

from whatif.service import create_app

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def save(name: str, payload) -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    path = FIXTURES / f"{name}.json"
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {path.relative_to(FIXTURES.parent.parent)}")


def upload(client: TestClient, csv_text: str) -> str:
    response = client.post("/datasets", content=csv_text,
                           headers={"content-type": "text/csv"})
    response.raise_for_status()
    return response.json()["dataset_id"]


def outage_csv(seed=3, n=300) -> str:
    rng = np.random.default_rng(seed)
    causes = rng.choice(["severe weather", "vandalism", "equipment failure"],
                        size=n, p=[0.32, 0.10, 0.58])
    minutes = np.where(causes == "severe weather", 2900.0, 1800.0) \
        + rng.normal(0, 250, n)
    lines = ["cause,minutes"]
    lines += [f"{c},{float(m)!r}" for c, m in zip(causes, minutes)]
    return "\n".join(lines) + "\n"


def run_job(client: TestClient, dataset_id: str, payload: dict) -> dict:
    job_id = client.post(f"/datasets/{dataset_id}/recommendations",
                         json=payload).json()["job_id"]
    for _ in range(600):
        view = client.get(f"/jobs/{job_id}").json()
        if view["status"] in ("done", "failed"):
            assert view["status"] == "done", view.get("error")
            return view["result"]
        time.sleep(0.05)
    raise TimeoutError("sweep job did not finish")


def main() -> None:
    client = TestClient(create_app())

    ds = upload(client, outage_csv())
    save("columns", client.get(f"/datasets/{ds}/columns").json())

    base = {"column": "cause", "value": "severe weather", "fraction": 0.01,
            "metric": "minutes", "operator": "mean", "seed": 5,
            "n_sample": 20}
    save("whatif_report",
         client.post(f"/datasets/{ds}/whatif", json=base).json())
    save("whatif_report_smooth2",
         client.post(f"/datasets/{ds}/whatif",
                     json={**base, "smoothing": 2.0}).json())
    cf = next(v["fraction"]
              for c in client.get(f"/datasets/{ds}/columns").json()["columns"]
              if c["name"] == "cause" for v in c["values"]
              if v["value"] == "severe weather")
    save("whatif_identity",
         client.post(f"/datasets/{ds}/whatif",
                     json={**base, "fraction": cf}).json())

    save("margins", client.post(f"/datasets/{ds}/margins", json={
        "column": "cause", "value": "severe weather", "metric": "minutes",
        "operator": "mean", "seed": 5, "n_sample": 10,
        "iterations": 12}).json())

    save("sweep", run_job(client, ds, {
        "metric": "minutes", "seed": 5, "n_sample": 8, "iterations": 10,
        "min_support": 5}))
    save("sweep_empty", run_job(client, ds, {
        "metric": "minutes", "seed": 5, "n_sample": 8, "iterations": 10,
        "min_support": 10_000}))

    # constant metric: degenerate densities and a flat marginal curve
    flat_csv = "c,m\n" + "".join(f"{'ab'[i % 2]},7.0\n" for i in range(40))
    flat_ds = upload(client, flat_csv)
    save("whatif_degenerate",
         client.post(f"/datasets/{flat_ds}/whatif", json={
             "column": "c", "value": "a", "fraction": 0.9,
             "metric": "m", "seed": 1, "n_sample": 8}).json())
    save("margins_flat", client.post(f"/datasets/{flat_ds}/margins", json={
        "column": "c", "value": "a", "metric": "m", "seed": 1,
        "n_sample": 6, "iterations": 10}).json())

    # single-value column: most fractions infeasible -> gaps in the curve
    gap_csv = "c,m\n" + "".join(f"only,{float(i)!r}\n" for i in range(20))
    gap_ds = upload(client, gap_csv)
    save("margins_gaps", client.post(f"/datasets/{gap_ds}/margins", json={
        "column": "c", "value": "only", "metric": "m", "seed": 1,
        "n_sample": 6, "iterations": 10}).json())

    # one qualifying value + one below min_support -> a single ranked item
    single_csv = "c,m\n" + "".join(
        f"big,{float(i)!r}\n" for i in range(30)) + "rare,99.0\nrare,1.0\n"
    single_ds = upload(client, single_csv)
    save("sweep_single", run_job(client, single_ds, {
        "metric": "m", "seed": 2, "n_sample": 8, "iterations": 10,
        "min_support": 5}))


if __name__ == "__main__":
    main()
