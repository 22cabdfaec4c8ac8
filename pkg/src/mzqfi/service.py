"""HTTP service exposing the scenario runners.

Every endpoint is a pure request/response computation over pydantic models;
file writing stays with the clients.  Run with

    uvicorn mzqfi.service:app
"""

from __future__ import annotations

from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .errors import ConfigError
from .scenarios import (
    SCHEMA_VERSION,
    FigureFile,
    OptimizeResult,
    ScenarioConfig,
    SweepResult,
    run_figure,
    run_optimize,
    run_sweep,
)
from .verification import VerifyReport, run_verify

app = FastAPI(
    title="mzqfi",
    description="Quantum Fisher information of an unbalanced Mach-Zehnder interferometer",
)


class HealthResponse(BaseModel):
    status: str
    schema_version: int


class FigureRequest(BaseModel):
    figure: int
    beta_values: Optional[list[float]] = None


class FigureResponse(BaseModel):
    files: list[FigureFile]


class VerifyRequest(BaseModel):
    level: Literal["quick", "full"] = "quick"


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", schema_version=SCHEMA_VERSION)


@app.post("/sweep", response_model=SweepResult)
def sweep(config: ScenarioConfig) -> SweepResult:
    try:
        return run_sweep(config)
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.post("/optimize", response_model=OptimizeResult)
def optimize_endpoint(config: ScenarioConfig) -> OptimizeResult:
    try:
        return run_optimize(config)
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.post("/figure", response_model=FigureResponse)
def figure(request: FigureRequest) -> FigureResponse:
    try:
        return FigureResponse(files=run_figure(request.figure, request.beta_values))
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.post("/verify", response_model=VerifyReport)
def verify(request: VerifyRequest) -> VerifyReport:
    return run_verify(request.level)
