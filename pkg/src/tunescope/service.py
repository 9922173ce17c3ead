"""HTTP/JSON session service over the exploration engine.

Datasets are uploaded once and shared read-only across sessions.  A
session pins one dataset, one sample plan, one percentile cut set, one
filter state, and one provenance log.  Filter mutations are serialized
per session, so interleaved clients see a consistent provenance order.
Search runs are background jobs polled by id.
"""

from __future__ import annotations

import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .dataset import Dataset, DatasetError, load_csv
from .filtering import (
    FilterState,
    aggregate_summary,
    explorer_summaries,
    selection_mask,
)
from .importance import recovery_experiment
from .provenance import ProvenanceEntry, ProvenanceLog
from .sampling import (
    DEFAULT_LADDER,
    DEFAULT_THRESHOLD,
    SamplePlan,
    SampleReason,
    choose_sample_size,
    draw_sample,
)
from .search import (
    OBJECTIVES,
    SearchTrace,
    exhaustive_best,
    random_search,
    simulated_annealing,
)
from .stats import DEFAULT_CUTS, DEFAULT_GRID_POINTS, KSResult, summarize
from . import wire

DEFAULT_SEARCH_WORKERS = 4


@dataclass
class ServiceConfig:
    cuts: tuple[float, ...] = DEFAULT_CUTS
    ladder: tuple[float, ...] = DEFAULT_LADDER
    threshold: float = DEFAULT_THRESHOLD
    grid_points: int = DEFAULT_GRID_POINTS
    seed: int = 0
    search_workers: int = DEFAULT_SEARCH_WORKERS


class _Session:
    def __init__(
        self,
        session_id: str,
        dataset_id: str,
        dataset: Dataset,
        plan: SamplePlan,
        cuts: tuple[float, ...],
        grid_points: int,
    ) -> None:
        self.id = session_id
        self.dataset_id = dataset_id
        self.dataset = dataset
        self.plan = plan
        self.cuts = cuts
        self.grid_points = grid_points
        self.filter = FilterState.fresh(dataset)
        self.lock = threading.Lock()
        stats = summarize(dataset.target[plan.row_subset], cuts)
        self.log = ProvenanceLog(self.filter, stats.min, stats.max)

    def bounds(self, state: FilterState) -> tuple[float | None, float | None]:
        rows = selection_mask(self.dataset, state) & self.plan.row_subset
        values = self.dataset.target[rows]
        if len(values) == 0:
            return None, None
        return float(values.min()), float(values.max())


class _Job:
    def __init__(self, algorithm: str, objective: str) -> None:
        self.id = uuid.uuid4().hex
        self.algorithm = algorithm
        self.objective = objective
        self.lock = threading.Lock()
        self.status = "running"
        self.steps: list[dict] = []
        self.partial_best: float | None = None
        self.trace: SearchTrace | None = None
        self.best: tuple[dict, float] | None = None
        self.error: str | None = None

    def on_step(self, step) -> None:
        with self.lock:
            self.steps.append(wire.wire_search_step(step))
            self.partial_best = step.best_value

    def snapshot(self) -> dict:
        with self.lock:
            body: dict = {
                "job_id": self.id,
                "status": self.status,
                "algorithm": self.algorithm,
                "objective": self.objective,
                "error": self.error,
            }
            if self.trace is not None:
                body["trace"] = wire.wire_trace(self.trace)
            elif self.best is not None:
                config, value = self.best
                body["trace"] = {
                    "algorithm": self.algorithm,
                    "objective": self.objective,
                    "budget": 0,
                    "seed": None,
                    "steps": [],
                    "best_configuration": config,
                    "best_value": wire.wire_real(value),
                    "total_evaluations": 0,
                    "wall_time_s": 0.0,
                }
            else:
                body["trace"] = {
                    "algorithm": self.algorithm,
                    "objective": self.objective,
                    "steps": list(self.steps),
                    "best_value": (
                        None if self.partial_best is None else wire.wire_real(self.partial_best)
                    ),
                }
            return body


class _State:
    def __init__(self, config: ServiceConfig) -> None:
        self.config = config
        self.datasets: dict[str, Dataset] = {}
        self.sessions: dict[str, _Session] = {}
        self.jobs: dict[str, _Job] = {}
        self.lock = threading.Lock()
        self.executor = ThreadPoolExecutor(max_workers=config.search_workers)


class SessionBody(BaseModel):
    dataset_id: str
    cuts: list[float] | None = None
    ladder: list[float] | None = None
    threshold: float | None = None
    seed: int | None = None
    grid_points: int | None = None


class FilterBody(BaseModel):
    operations: list[dict]
    label: str | None = None


class RollbackBody(BaseModel):
    stage: int


class SearchBody(BaseModel):
    algorithm: str
    objective: str
    budget: int | None = None
    seed: int = 0
    t0: float | None = None
    alpha: float | None = None


class ImportanceBody(BaseModel):
    fractions: list[float] = [0.001, 0.002, 0.004, 0.01]
    repeats: int = 1000
    seed: int = 0


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    state = _State(config or ServiceConfig())
    app = FastAPI(title="tunescope", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.engine = state

    def _dataset(dataset_id: str) -> Dataset:
        try:
            return state.datasets[dataset_id]
        except KeyError:
            raise HTTPException(404, f"unknown dataset {dataset_id!r}") from None

    def _session(session_id: str) -> _Session:
        try:
            return state.sessions[session_id]
        except KeyError:
            raise HTTPException(404, f"unknown session {session_id!r}") from None

    def _explorer_payload(session: _Session) -> dict:
        summaries = explorer_summaries(
            session.dataset,
            session.filter,
            session.plan.row_subset,
            session.cuts,
            session.grid_points,
        )
        sample_stats = summarize(
            session.dataset.target[session.plan.row_subset], session.cuts
        )
        groups = []
        for schema, on in zip(session.dataset.parameters, session.filter.enabled):
            levels = [
                wire.wire_rd_summary(s) for s in summaries if s.parameter == schema.name
            ]
            groups.append({"name": schema.name, "enabled": on, "levels": levels})
        return {
            "target_axis": {
                "min": None if sample_stats.count == 0 else wire.wire_real(sample_stats.min),
                "max": None if sample_stats.count == 0 else wire.wire_real(sample_stats.max),
            },
            "parameters": groups,
        }

    def _aggregate_payload(session: _Session) -> dict:
        return wire.wire_aggregate(
            aggregate_summary(
                session.dataset,
                session.filter,
                session.plan.row_subset,
                session.cuts,
                session.grid_points,
            )
        )

    def _session_payload(session: _Session) -> dict:
        return {
            "session_id": session.id,
            "dataset_id": session.dataset_id,
            "target_name": session.dataset.target_name,
            "row_count": session.dataset.row_count,
            "cuts": [wire.wire_real(q) for q in session.cuts],
            "grid_points": session.grid_points,
            "sample_plan": wire.wire_sample_plan(session.plan),
            "filter": wire.wire_filter(session.filter, session.dataset),
            "provenance": [
                wire.wire_provenance_entry(e, session.dataset)
                for e in session.log.entries
            ],
        }

    @app.exception_handler(DatasetError)
    async def _dataset_error(request: Request, exc: DatasetError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/datasets")
    async def create_dataset(request: Request, target_column: str) -> dict:
        body = await request.body()
        if not body:
            raise HTTPException(400, "empty request body; expected CSV bytes")
        try:
            dataset = load_csv(body, target_column)
        except DatasetError as exc:
            raise HTTPException(400, str(exc)) from None
        dataset_id = uuid.uuid4().hex
        with state.lock:
            state.datasets[dataset_id] = dataset
        return {
            "dataset_id": dataset_id,
            "target_name": dataset.target_name,
            "row_count": dataset.row_count,
            "parameters": [wire.wire_parameter(p) for p in dataset.parameters],
        }

    @app.get("/datasets/{dataset_id}")
    def get_dataset(dataset_id: str) -> dict:
        dataset = _dataset(dataset_id)
        return {
            "dataset_id": dataset_id,
            "target_name": dataset.target_name,
            "row_count": dataset.row_count,
            "parameters": [wire.wire_parameter(p) for p in dataset.parameters],
        }

    @app.post("/sessions")
    def create_session(body: SessionBody) -> dict:
        dataset = _dataset(body.dataset_id)
        cuts = tuple(body.cuts) if body.cuts is not None else state.config.cuts
        ladder = tuple(body.ladder) if body.ladder is not None else state.config.ladder
        threshold = (
            body.threshold if body.threshold is not None else state.config.threshold
        )
        seed = body.seed if body.seed is not None else state.config.seed
        grid = body.grid_points if body.grid_points is not None else state.config.grid_points
        try:
            plan = choose_sample_size(dataset, ladder, threshold, seed)
            session = _Session(
                uuid.uuid4().hex, body.dataset_id, dataset, plan, cuts, grid
            )
        except (DatasetError, ValueError) as exc:
            raise HTTPException(400, str(exc)) from None
        with state.lock:
            state.sessions[session.id] = session
        return _session_payload(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        session = _session(session_id)
        with session.lock:
            return _session_payload(session)

    @app.post("/sessions/import")
    def import_session(document: dict) -> dict:
        try:
            dataset_id = document["dataset_id"]
            plan_doc = document["sample_plan"]
            session_id = document["session_id"]
        except (KeyError, TypeError) as exc:
            raise HTTPException(400, f"malformed session document: missing {exc}") from None
        dataset = _dataset(dataset_id)
        with state.lock:
            if session_id in state.sessions:
                raise HTTPException(409, f"session {session_id!r} already exists")
        try:
            fraction = float(plan_doc["fraction"])
            seed = int(plan_doc["seed"])
            subset = draw_sample(dataset, fraction, seed)
            ks_doc = plan_doc.get("ks")
            plan = SamplePlan(
                fraction=fraction,
                seed=seed,
                row_subset=subset,
                ks=None
                if ks_doc is None
                else KSResult(
                    statistic=float(ks_doc["statistic"]),
                    p_value=float(ks_doc["p_value"]),
                    n1=int(ks_doc["n1"]),
                    n2=int(ks_doc["n2"]),
                ),
                reason=SampleReason(plan_doc["reason"]),
            )
            cuts = tuple(float(q) for q in document["cuts"])
            session = _Session(
                session_id, dataset_id, dataset, plan, cuts, int(document["grid_points"])
            )
            session.filter = wire.parse_filter(document["filter"], dataset)
            session.log = ProvenanceLog.from_entries(
                [
                    ProvenanceEntry(
                        stage=int(e["stage"]),
                        label=str(e["label"]),
                        filter=wire.parse_filter(e["filter"], dataset),
                        min=e["min"],
                        max=e["max"],
                        replicated_from=e.get("replicated_from"),
                    )
                    for e in document["provenance"]
                ]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(400, f"malformed session document: {exc}") from None
        with state.lock:
            if session_id in state.sessions:
                raise HTTPException(409, f"session {session_id!r} already exists")
            state.sessions[session_id] = session
        return _session_payload(session)

    @app.get("/sessions/{session_id}/explorer")
    def get_explorer(session_id: str) -> dict:
        session = _session(session_id)
        with session.lock:
            return _explorer_payload(session)

    @app.get("/sessions/{session_id}/aggregate")
    def get_aggregate(session_id: str) -> dict:
        session = _session(session_id)
        with session.lock:
            return _aggregate_payload(session)

    @app.post("/sessions/{session_id}/filter")
    def apply_filter(session_id: str, body: FilterBody) -> dict:
        session = _session(session_id)
        with session.lock:
            try:
                new_state = wire.apply_operations(
                    session.filter, body.operations, session.dataset
                )
            except DatasetError as exc:
                raise HTTPException(400, str(exc)) from None
            lo, hi = session.bounds(new_state)
            entry = session.log.push(new_state, lo, hi, label=body.label)
            session.filter = new_state
            return {
                "filter": wire.wire_filter(session.filter, session.dataset),
                "provenance_entry": wire.wire_provenance_entry(entry, session.dataset),
                "explorer": _explorer_payload(session),
                "aggregate": _aggregate_payload(session),
            }

    @app.get("/sessions/{session_id}/provenance")
    def get_provenance(session_id: str) -> dict:
        session = _session(session_id)
        with session.lock:
            return {
                "entries": [
                    wire.wire_provenance_entry(e, session.dataset)
                    for e in session.log.entries
                ]
            }

    @app.post("/sessions/{session_id}/rollback")
    def rollback(session_id: str, body: RollbackBody) -> dict:
        session = _session(session_id)
        with session.lock:
            try:
                entry = session.log.rollback(body.stage)
            except ValueError as exc:
                raise HTTPException(400, str(exc)) from None
            session.filter = entry.filter
            return {
                "provenance_entry": wire.wire_provenance_entry(entry, session.dataset),
                "filter": wire.wire_filter(session.filter, session.dataset),
                "explorer": _explorer_payload(session),
                "aggregate": _aggregate_payload(session),
            }

    @app.post("/sessions/{session_id}/search")
    def start_search(session_id: str, body: SearchBody) -> dict:
        session = _session(session_id)
        if body.objective not in OBJECTIVES:
            raise HTTPException(
                400, f"unknown objective {body.objective!r}; expected one of {OBJECTIVES}"
            )
        if body.algorithm not in ("exhaustive", "random", "simulated_annealing"):
            raise HTTPException(400, f"unknown algorithm {body.algorithm!r}")
        if body.algorithm != "exhaustive" and (body.budget is None or body.budget < 1):
            raise HTTPException(400, "budget must be >= 1 for sampling searches")
        job = _Job(body.algorithm, body.objective)
        with state.lock:
            state.jobs[job.id] = job

        dataset = session.dataset

        def run() -> None:
            try:
                if body.algorithm == "exhaustive":
                    config, value = exhaustive_best(dataset, body.objective)
                    with job.lock:
                        job.best = (config, value)
                        job.status = "finished"
                elif body.algorithm == "random":
                    trace = random_search(
                        dataset, body.objective, body.budget, body.seed, job.on_step
                    )
                    with job.lock:
                        job.trace = trace
                        job.status = "finished"
                else:
                    trace = simulated_annealing(
                        dataset,
                        body.objective,
                        body.budget,
                        body.seed,
                        t0=body.t0,
                        alpha=body.alpha if body.alpha is not None else 0.95,
                        on_step=job.on_step,
                    )
                    with job.lock:
                        job.trace = trace
                        job.status = "finished"
            except Exception as exc:  # surfaced to the poller
                with job.lock:
                    job.status = "failed"
                    job.error = str(exc)

        state.executor.submit(run)
        return {"job_id": job.id}

    @app.get("/jobs/{job_id}")
    def get_trace(job_id: str) -> dict:
        with state.lock:
            job = state.jobs.get(job_id)
        if job is None:
            raise HTTPException(404, f"unknown job {job_id!r}")
        return job.snapshot()

    @app.post("/sessions/{session_id}/importance")
    def importance(session_id: str, body: ImportanceBody) -> dict:
        session = _session(session_id)
        try:
            report = recovery_experiment(
                session.dataset,
                tuple(body.fractions),
                repeats=body.repeats,
                seed=body.seed,
            )
        except (DatasetError, ValueError) as exc:
            raise HTTPException(400, str(exc)) from None
        return wire.wire_importance(report)

    return app


app = create_app()
