"""FastAPI application exposing run, sweep and verify.

The handler functions are plain callables over the pydantic models so the
command-line client can invoke them in-process without a running server;
the routes are thin bindings on top.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..outputs import record_to_row
from ..sim import InfeasibleInitError, InvalidConfigError, run
from ..sweep import monte_carlo
from ..verify import battery
from .models import (
    RunRequest,
    RunResponse,
    SweepRequest,
    SweepResponse,
    TrajectoryRow,
    VerifyRequest,
    VerifyResponse,
)


def run_simulation(req: RunRequest) -> RunResponse:
    records, summary = run(req.config.to_sim(), record=req.record_trajectory)
    trajectory = None
    if req.record_trajectory:
        trajectory = [TrajectoryRow(**record_to_row(r)) for r in records]
    return RunResponse(summary=summary.to_dict(), trajectory=trajectory)


def run_sweep(req: SweepRequest) -> SweepResponse:
    result = monte_carlo(
        runs_per_cell=req.runs_per_cell,
        base_seed=req.base_seed,
        n_agents=req.n_agents,
        omega0=req.omega0,
        theta_max=req.theta_max,
        k_factors=tuple(req.k_factors),
        phi_factors=tuple(req.phi_factors),
    )
    return SweepResponse(table=result.to_dict())


def run_verify(req: VerifyRequest) -> VerifyResponse:
    report = battery(
        runs=req.runs,
        n_min=req.n_min,
        n_max=req.n_max,
        seed=req.seed,
        inject_fault=req.inject_fault,
    )
    return VerifyResponse(report=report.to_dict(), lines=report.lines())


def create_app() -> FastAPI:
    app = FastAPI(
        title="ringbalance",
        version=__version__,
        description=(
            "Simulation service for decentralized circular-formation "
            "balancing under short-range noisy proximity sensing."
        ),
    )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/run", response_model=RunResponse)
    def run_endpoint(req: RunRequest) -> RunResponse:
        try:
            return run_simulation(req)
        except (InvalidConfigError, InfeasibleInitError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.post("/sweep", response_model=SweepResponse)
    def sweep_endpoint(req: SweepRequest) -> SweepResponse:
        try:
            return run_sweep(req)
        except (InvalidConfigError, InfeasibleInitError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.post("/verify", response_model=VerifyResponse)
    def verify_endpoint(req: VerifyRequest) -> VerifyResponse:
        try:
            return run_verify(req)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    return app


app = create_app()
