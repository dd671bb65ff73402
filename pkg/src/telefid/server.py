"""Stateless HTTP facade over the pipeline engine.

The only server state is the snapshot loaded at startup; every handler is a
pure function of (request body, snapshot), so identical POSTs return
identical bodies and concurrent requests need no locking.  Each response
carries the snapshot id it was computed against.  Long sweeps run
synchronously under a per-request simulation budget (413 beyond it).
"""

from __future__ import annotations

from dataclasses import asdict

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import pipeline
from .calio import load_snapshot
from .circuits import PulseAssignment
from .errors import EngineError
from .layout import (
    FilterThresholds,
    LayoutCandidate,
    enumerate_paths3,
    filter_graph,
    graph_from_snapshot,
)
from .noise import DEFAULT_SHAPE_FACTORS
from .qsim import StatePrep

DEFAULT_BUDGET = 10_000


class ThresholdsBody(BaseModel):
    t1_min: float = 0.0
    t2_min: float = 0.0
    e1q_max: float = 1.0
    e2q_max: float = 1.0
    ero_max: float = 1.0

    def to_thresholds(self) -> FilterThresholds:
        return FilterThresholds(**self.model_dump())


class PulseBody(BaseModel):
    sx: str = "square"
    cz: str = "square"
    measure: str = "square"

    def to_assignment(self) -> PulseAssignment:
        return PulseAssignment(self.sx, self.cz, self.measure)


class PrepBody(BaseModel):
    theta: float
    phi: float = 0.0

    def to_prep(self) -> StatePrep:
        return StatePrep(self.theta, self.phi)


class FilterRequest(BaseModel):
    thresholds: ThresholdsBody = Field(default_factory=ThresholdsBody)


class RunRequest(BaseModel):
    mode: str = "physical"
    theta: float
    phi: float = 0.0
    ns: float = 1.0
    pulse: PulseBody = Field(default_factory=PulseBody)
    layout: list = None  # explicit physical indices, logical order
    thresholds: ThresholdsBody = Field(default_factory=ThresholdsBody)
    seed: int = pipeline.DEFAULT_SEED


class WaterfallRequest(BaseModel):
    theta: float
    phi: float = 0.0
    ns: float = 1.0
    mode: str = "physical"
    baseline_rule: str = "first"
    thresholds: ThresholdsBody = None
    seed: int = pipeline.DEFAULT_SEED


class CascadeRequest(BaseModel):
    theta: float
    phi: float = 0.0
    ns: float = 1.0
    stages: list[ThresholdsBody]
    reference_best: float = None


class SweepRequest(BaseModel):
    preps: list[PrepBody]
    scales: list[float]
    modes: list[str] = ["physical", "encoded"]
    ns_pulse: PulseBody = Field(default_factory=PulseBody)
    seed: int = pipeline.DEFAULT_SEED


def create_app(snapshot, factors=DEFAULT_SHAPE_FACTORS, budget: int = DEFAULT_BUDGET) -> FastAPI:
    app = FastAPI(title="telefid", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    snapshot_id = snapshot.snapshot_id

    @app.exception_handler(EngineError)
    async def engine_error_handler(request: Request, exc: EngineError):
        return JSONResponse(
            status_code=400,
            content={"error": exc.code, "detail": str(exc), "snapshot_id": snapshot_id},
        )

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        return JSONResponse(
            status_code=400,
            content={"error": "invalid_request", "detail": str(exc), "snapshot_id": snapshot_id},
        )

    def over_budget(n_sims: int):
        if n_sims > budget:
            return JSONResponse(
                status_code=413,
                content={
                    "error": "budget_exceeded",
                    "detail": f"request needs {n_sims} simulations, budget is {budget}",
                    "snapshot_id": snapshot_id,
                },
            )
        return None

    def graph_payload(graph):
        return {
            "nodes": sorted(graph.nodes),
            "edges": [list(e) for e in graph.edge_pairs()],
        }

    @app.get("/api/snapshot")
    def get_snapshot():
        graph = graph_from_snapshot(snapshot)
        qubits = {
            str(q): {
                "t1_us": cal.t1,
                "t2_us": cal.t2,
                "readout_e01": cal.readout_e01,
                "readout_e10": cal.readout_e10,
                "err_1q": cal.err_1q,
            }
            for q, cal in sorted(snapshot.qubits.items())
        }
        edges = [
            {"a": e.qubits[0], "b": e.qubits[1], "err_2q": e.err_2q}
            for e in snapshot.edges
        ]
        return {
            "snapshot_id": snapshot_id,
            "backend": snapshot.backend_name,
            "timestamp": snapshot.timestamp,
            "graph": graph_payload(graph),
            "qubits": qubits,
            "edges": edges,
        }

    @app.post("/api/filter")
    def post_filter(body: FilterRequest):
        th = body.thresholds.to_thresholds()
        graph = filter_graph(snapshot, th)
        candidates = enumerate_paths3(graph)
        return {
            "snapshot_id": snapshot_id,
            "graph": graph_payload(graph),
            "node_count": len(graph.nodes),
            "edge_count": len(graph.edges),
            "path_count": len(candidates),
            "paths": [
                [cand.mapping[0], cand.mapping[1], cand.mapping[2]] for cand in candidates
            ],
        }

    @app.post("/api/run")
    def post_run(body: RunRequest):
        reject = over_budget(1)
        if reject:
            return reject
        prep = StatePrep(body.theta, body.phi)
        if body.layout is not None:
            source = LayoutCandidate(
                {i: int(q) for i, q in enumerate(body.layout)},
                kind="path3" if body.mode == "physical" else "subgraph6",
            )
        else:
            source = body.thresholds.to_thresholds()
        config = pipeline.PipelineConfig(
            mode=body.mode,
            prep=prep,
            layout_source=source,
            pulse=body.pulse.to_assignment(),
            ns=body.ns,
        )
        fidelity, accept = pipeline.run(config, snapshot, factors, body.seed)
        return {
            "snapshot_id": snapshot_id,
            "fidelity": fidelity,
            "accept": accept,
            "mode": body.mode,
            "ns": body.ns,
        }

    @app.post("/api/waterfall")
    def post_waterfall(body: WaterfallRequest):
        reject = over_budget(2 + 27)
        if reject:
            return reject
        thresholds = (
            body.thresholds.to_thresholds()
            if body.thresholds is not None
            else pipeline.BASELINE_THRESHOLDS
        )
        report = pipeline.waterfall(
            StatePrep(body.theta, body.phi),
            snapshot,
            baseline_rule=body.baseline_rule,
            mode=body.mode,
            ns=body.ns,
            thresholds=thresholds,
            factors=factors,
            seed=body.seed,
        )
        payload = asdict(report)
        payload["optimal_pulse"] = asdict(report.optimal_pulse)
        payload["snapshot_id"] = snapshot_id
        return payload

    @app.post("/api/cascade")
    def post_cascade(body: CascadeRequest):
        stages = [s.to_thresholds() for s in body.stages]
        n_sims = sum(
            len(enumerate_paths3(filter_graph(snapshot, th))) for th in stages
        )
        reject = over_budget(n_sims)
        if reject:
            return reject
        rows = pipeline.filter_cascade(
            snapshot,
            stages,
            StatePrep(body.theta, body.phi),
            reference_best=body.reference_best,
            ns=body.ns,
            factors=factors,
        )
        return {
            "snapshot_id": snapshot_id,
            "rows": [
                {
                    "stage": r.stage,
                    "thresholds": asdict(r.thresholds),
                    "path_count": r.path_count,
                    "f_worst": r.f_worst,
                    "f_best": r.f_best,
                    "band": r.band,
                }
                for r in rows
            ],
        }

    @app.post("/api/sweep")
    def post_sweep(body: SweepRequest):
        n_sims = len(body.preps) * len(body.scales) * len(body.modes)
        reject = over_budget(n_sims)
        if reject:
            return reject
        rows = pipeline.noise_sweep(
            snapshot,
            [p.to_prep() for p in body.preps],
            body.scales,
            modes=tuple(body.modes),
            pulse=body.ns_pulse.to_assignment(),
            factors=factors,
            seed=body.seed,
        )
        return {
            "snapshot_id": snapshot_id,
            "rows": [
                {
                    "theta": r.theta,
                    "phi": r.phi,
                    "ns": r.ns,
                    "f_phys": r.f_phys,
                    "f_log": r.f_log,
                    "accept": r.accept,
                }
                for r in rows
            ],
        }

    return app


def serve(snapshot_path, bind_address: str = "127.0.0.1:8000", budget: int = DEFAULT_BUDGET):
    """Load a snapshot and serve the API (blocking)."""
    import uvicorn

    snapshot = load_snapshot(snapshot_path)
    app = create_app(snapshot, budget=budget)
    host, _, port = bind_address.partition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000), log_level="warning")
