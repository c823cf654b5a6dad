"""HTTP JSON service exposing the analysis engine to the web console.

Scenario comparisons and marginal curves answer synchronously; full sweeps
run as asynchronous jobs on a bounded worker pool with polling and a
line-delimited JSON progress stream. Datasets and jobs live in memory only;
restarts require re-upload.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, Union

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from . import workflows
from .engine import EngineConfig
from .errors import (DataError, NumericalError, UnknownColumnError,
                     UnknownDatasetError, UnknownJobError,
                     UnknownValueError, WhatifError)
from .tabular import Dataset, load_csv_text

DEFAULT_MAX_UPLOAD_BYTES = 100 * 1024 * 1024
DEFAULT_MAX_ROWS = 5_000_000

ENV_BIND = "WHATIF_BIND"
ENV_WORKERS = "WHATIF_WORKERS"


class SessionRegistry:
    """In-memory dataset handles and sweep-job table.

    Thread-safe; job status moves monotonically pending -> running ->
    done | failed, and finished results are never mutated.
    """

    def __init__(self, max_workers: Optional[int] = None,
                 max_upload_bytes: int = DEFAULT_MAX_UPLOAD_BYTES,
                 max_rows: int = DEFAULT_MAX_ROWS):
        workers = max_workers or int(os.environ.get(ENV_WORKERS, "2"))
        self.max_upload_bytes = max_upload_bytes
        self.max_rows = max_rows
        self._datasets: dict[str, Dataset] = {}
        self._jobs: dict[str, dict] = {}
        self._lock = threading.Lock()
        self._executor = ThreadPoolExecutor(max_workers=workers)

    def add_dataset(self, dataset: Dataset) -> str:
        if dataset.n_rows > self.max_rows:
            raise DataError(
                f"dataset has {dataset.n_rows} rows, cap is {self.max_rows}")
        dataset_id = uuid.uuid4().hex
        with self._lock:
            self._datasets[dataset_id] = dataset
        return dataset_id

    def dataset(self, dataset_id: str) -> Dataset:
        with self._lock:
            ds = self._datasets.get(dataset_id)
        if ds is None:
            raise UnknownDatasetError(f"no such dataset: {dataset_id}")
        return ds

    def submit_job(self, work) -> str:
        """work(emit) runs on the pool; emit(dict) records a progress event."""
        job_id = uuid.uuid4().hex
        with self._lock:
            self._jobs[job_id] = {"status": "pending", "events": [],
                                  "result": None, "error": None}

        def emit(event: dict) -> None:
            with self._lock:
                self._jobs[job_id]["events"].append(event)

        def run() -> None:
            with self._lock:
                self._jobs[job_id]["status"] = "running"
            try:
                result = work(emit)
            except Exception as exc:  # job failure is a terminal state
                with self._lock:
                    job = self._jobs[job_id]
                    job["status"] = "failed"
                    job["error"] = str(exc)
                return
            with self._lock:
                job = self._jobs[job_id]
                job["status"] = "done"
                job["result"] = result

        self._executor.submit(run)
        return job_id

    def job_view(self, job_id: str) -> dict:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                raise UnknownJobError(f"no such job: {job_id}")
            view = {"job_id": job_id, "status": job["status"],
                    "progress": {"events": len(job["events"])}}
            if job["events"]:
                view["progress"].update(job["events"][-1])
            if job["status"] == "done":
                view["result"] = job["result"]
            if job["status"] == "failed":
                view["error"] = job["error"]
            return view

    def job_events(self, job_id: str) -> list[dict]:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                raise UnknownJobError(f"no such job: {job_id}")
            return list(job["events"])


class WhatifRequest(BaseModel):
    column: str
    value: Union[str, float]
    fraction: float = Field(ge=0.0, le=1.0)
    metric: str
    operator: str = "mean"
    q: Optional[float] = None
    direction: str = "minimize"
    n_sample: int = 30
    seed: int = 0
    smoothing: float = 1.0
    baseline_mode: str = "raw"
    alpha: float = 0.05


class MarginsRequest(BaseModel):
    column: str
    value: Union[str, float]
    metric: str
    operator: str = "mean"
    q: Optional[float] = None
    direction: str = "minimize"
    fractions: Optional[list[float]] = None
    n_sample: int = 30
    seed: int = 0
    iterations: int = 15


class RecommendationsRequest(BaseModel):
    metric: str
    operator: str = "mean"
    q: Optional[float] = None
    direction: str = "minimize"
    n_sample: int = 30
    n_unique: int = 20
    n_buckets: int = 10
    iterations: int = 15
    init_points: int = 5
    xi: float = 0.01
    seed: int = 0
    include_columns: Optional[list[str]] = None
    exclude_columns: list[str] = []
    min_support: int = 5


class BacktestRequest(BaseModel):
    time_column: str
    split: Union[str, float]
    metric: str
    operator: str = "mean"
    q: Optional[float] = None
    direction: str = "minimize"
    columns: Optional[list[str]] = None
    n_sample: int = 30
    seed: int = 0


def _status_for(exc: WhatifError) -> int:
    if isinstance(exc, (UnknownColumnError, UnknownValueError,
                        UnknownDatasetError, UnknownJobError)):
        return 404
    if isinstance(exc, NumericalError):
        return 500
    return 400


def create_app(registry: Optional[SessionRegistry] = None) -> FastAPI:
    registry = registry or SessionRegistry()
    app = FastAPI(title="whatif", version="0.1.0")
    app.state.registry = registry
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(WhatifError)
    async def handle_whatif_error(request: Request, exc: WhatifError):
        return JSONResponse(status_code=_status_for(exc),
                            content={"code": exc.code, "message": str(exc)})

    @app.post("/datasets")
    async def upload_dataset(request: Request):
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("multipart/"):
            form = await request.form()
            upload = form.get("file")
            if upload is None:
                raise DataError("multipart upload needs a 'file' field")
            body = await upload.read()
        else:
            body = await request.body()
        if len(body) > registry.max_upload_bytes:
            raise DataError(
                f"upload of {len(body)} bytes exceeds the "
                f"{registry.max_upload_bytes}-byte cap")
        dataset = load_csv_text(body.decode("utf-8"), source="<upload>")
        dataset_id = registry.add_dataset(dataset)
        return {
            "dataset_id": dataset_id,
            "n_rows": dataset.n_rows,
            "columns": [{"name": s.name, "kind": s.kind.value,
                         "n_unique": len(dataset.unique_values(s.name)),
                         "missing": s.missing_count}
                        for s in dataset.columns],
        }

    @app.get("/datasets/{dataset_id}/columns")
    async def dataset_columns(dataset_id: str):
        dataset = registry.dataset(dataset_id)
        return {"dataset_id": dataset_id, "n_rows": dataset.n_rows,
                "columns": workflows.column_catalog(dataset)}

    @app.post("/datasets/{dataset_id}/whatif")
    async def whatif_endpoint(dataset_id: str, req: WhatifRequest):
        dataset = registry.dataset(dataset_id)
        objective = workflows.make_objective(req.metric, req.operator, req.q,
                                             req.direction)
        return workflows.whatif_report(
            dataset, req.column, req.value, req.fraction, objective,
            n_sample=req.n_sample, seed=req.seed, smoothing=req.smoothing,
            baseline_mode=req.baseline_mode, alpha=req.alpha)

    @app.post("/datasets/{dataset_id}/margins")
    async def margins_endpoint(dataset_id: str, req: MarginsRequest):
        dataset = registry.dataset(dataset_id)
        objective = workflows.make_objective(req.metric, req.operator, req.q,
                                             req.direction)
        return workflows.margins_result(
            dataset, req.column, req.value, objective,
            fractions=req.fractions, n_sample=req.n_sample, seed=req.seed,
            iterations=req.iterations)

    @app.post("/datasets/{dataset_id}/recommendations")
    async def recommendations_endpoint(dataset_id: str,
                                       req: RecommendationsRequest):
        dataset = registry.dataset(dataset_id)
        objective = workflows.make_objective(req.metric, req.operator, req.q,
                                             req.direction)
        config = EngineConfig(
            objective=objective, n_sample=req.n_sample, n_unique=req.n_unique,
            n_buckets=req.n_buckets, iterations=req.iterations,
            init_points=req.init_points, xi=req.xi, master_seed=req.seed,
            include_columns=req.include_columns,
            exclude_columns=req.exclude_columns, min_support=req.min_support)
        config.objective.validate_for(dataset)  # fail fast, before the job

        job_id = registry.submit_job(
            lambda emit: workflows.recommend_result(dataset, config,
                                                    progress=emit))
        return {"job_id": job_id}

    @app.get("/jobs/{job_id}")
    async def job_status(job_id: str):
        return registry.job_view(job_id)

    @app.get("/jobs/{job_id}/events")
    async def job_events(job_id: str):
        events = registry.job_events(job_id)
        body = "".join(json.dumps(e, sort_keys=True) + "\n" for e in events)
        return PlainTextResponse(body, media_type="application/x-ndjson")

    @app.post("/datasets/{dataset_id}/backtest")
    async def backtest_endpoint(dataset_id: str, req: BacktestRequest):
        dataset = registry.dataset(dataset_id)
        objective = workflows.make_objective(req.metric, req.operator, req.q,
                                             req.direction)
        return workflows.backtest_result(
            dataset, req.time_column, req.split, objective,
            columns=req.columns, n_sample=req.n_sample, seed=req.seed)

    return app


def serve(host: Optional[str] = None, port: Optional[int] = None,
          workers: Optional[int] = None) -> None:
    """Run the service with uvicorn; bind address falls back to the
    WHATIF_BIND env var, then 127.0.0.1:8000."""
    import uvicorn

    bind = os.environ.get(ENV_BIND, "127.0.0.1:8000")
    env_host, _, env_port = bind.partition(":")
    uvicorn.run(create_app(SessionRegistry(max_workers=workers)),
                host=host or env_host or "127.0.0.1",
                port=port if port is not None else int(env_port or 8000))
