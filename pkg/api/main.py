#!/usr/bin/env python3
"""
FastAPI Backend for attachlab
Provides RESTful endpoints for graph summaries, matchings, cycle search,
constant verification, lower-bound statistics and experiments
"""

from fastapi import FastAPI, HTTPException, BackgroundTasks
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field
from typing import List, Optional
from datetime import datetime
import logging
import time
import sys
import os

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from algorithms.hamilton import HamCycle, exact_hamiltonian, posa_search
from algorithms.matching import max_matching, tutte_certificate
from analysis.constants import (
    PUBLISHED_SETS,
    ConstantSet,
    beta_of_m,
    beta_upper_bound,
    check_conditions,
    gamma_of_m,
    gamma_upper_bound,
)
from config.settings import DEFAULT_CUTOFF, DEFAULT_POSA_BUDGET, HELD_KARP_LIMIT, configure_logging
from experiments.runner import ExperimentConfig, experiment_dir, run_experiment
from experiments.store import ExperimentStore
from graphs.core import PREFERENTIAL, component_count, degrees, is_connected, simple_view
from graphs.generate import GenParams, generate
from lowerbound.lonely import lonely_reference, lonely_stats, no_pm_certificate, sweet_cherries

logger = logging.getLogger(__name__)

# Initialize FastAPI app
app = FastAPI(
    title="attachlab API",
    description="Attachment graph generation, matching, Hamiltonicity and experiment endpoints",
    version="1.0.0"
)

# Add CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# Pydantic models for request/response
class GraphRequest(BaseModel):
    n: int = Field(..., ge=1, le=2_000_000)
    m1: int = Field(..., ge=0)
    m2: int = Field(0, ge=0)
    model: str = PREFERENTIAL
    seed: int = Field(0, ge=0)

    def params(self) -> GenParams:
        if self.m2 == 0:
            return GenParams.plain(self.n, self.m1, self.model, self.seed)
        return GenParams(self.n, self.m1, self.m2, self.model, self.seed)


class GraphSummary(BaseModel):
    n: int
    m: int
    edge_count: int
    components: int
    max_degree: int
    mean_degree: float


class MatchingRequest(GraphRequest):
    separator: Optional[List[int]] = None


class MatchingResponse(BaseModel):
    matching_number: int
    perfect: bool
    tutte_deficiency: Optional[int] = None


class HamiltonRequest(GraphRequest):
    budget: int = Field(DEFAULT_POSA_BUDGET, ge=1)


class HamiltonResponse(BaseModel):
    hamiltonian: bool
    connected: bool
    longest_path_len: int
    cycle: Optional[List[int]] = None
    exact: Optional[bool] = None


class ConstantSetRequest(BaseModel):
    m: int
    ell: int
    alpha: float
    x: float
    y: float
    z: float
    d: float
    primed: bool = False
    rounding: float = 0.0


class LowerBoundRequest(BaseModel):
    n: int = Field(..., ge=4, le=2_000_000)
    c: float = DEFAULT_CUTOFF
    seed: int = Field(0, ge=0)


class ExperimentResponse(BaseModel):
    success: bool
    message: str
    out_dir: str


# Global variables
start_time = time.time()


def _fail(kind: str, e: Exception):
    """ValueError means a bad request; anything else is a server error."""
    if isinstance(e, HTTPException):
        raise e
    if isinstance(e, ValueError):
        raise HTTPException(status_code=400, detail=f"{kind} error: {str(e)}")
    logger.exception("%s failed", kind)
    raise HTTPException(status_code=500, detail=f"{kind} error: {str(e)}")


@app.get("/")
async def root():
    """Root endpoint with API information."""
    return {
        "message": "attachlab API",
        "version": "1.0.0",
        "status": "running",
        "endpoints": {
            "summary": "/graphs/summary",
            "matching": "/matching",
            "hamilton": "/hamilton",
            "constants": "/constants/{name}",
            "roots": "/roots/{m}",
            "lowerbound": "/lowerbound",
            "experiments": "/experiments",
            "health": "/health"
        }
    }


@app.get("/health")
async def health_check():
    """Health check endpoint."""
    return {"status": "healthy", "timestamp": datetime.now().isoformat(), "uptime": time.time() - start_time}


@app.post("/graphs/summary", response_model=GraphSummary)
async def graph_summary(request: GraphRequest):
    """Generate a graph and summarise its degrees and components."""
    try:
        g = generate(request.params())
        view = simple_view(g)
        degree = degrees(g)[1:]
        return GraphSummary(
            n=g.n,
            m=g.m,
            edge_count=view.edge_count,
            components=component_count(view),
            max_degree=int(degree.max()),
            mean_degree=float(degree.mean()),
        )
    except Exception as e:
        _fail("Summary", e)


@app.post("/matching", response_model=MatchingResponse)
async def matching_endpoint(request: MatchingRequest):
    """Maximum matching size, perfect-matching verdict and an optional Tutte check."""
    try:
        view = simple_view(generate(request.params()))
        matching = max_matching(view)
        witness = None
        if request.separator is not None:
            witness = tutte_certificate(view, request.separator)
        return MatchingResponse(
            matching_number=matching.size,
            perfect=matching.size == view.order // 2,
            tutte_deficiency=None if witness is None else witness.deficiency,
        )
    except Exception as e:
        _fail("Matching", e)


@app.post("/hamilton", response_model=HamiltonResponse)
async def hamilton_endpoint(request: HamiltonRequest):
    """Rotation-extension search, backed by the exact test on small graphs."""
    try:
        view = simple_view(generate(request.params()))
        if not is_connected(view):
            return HamiltonResponse(hamiltonian=False, connected=False, longest_path_len=0)
        found = posa_search(view, budget=request.budget, seed=request.seed)
        exact = exact_hamiltonian(view) if view.order <= HELD_KARP_LIMIT else None
        if isinstance(found, HamCycle):
            return HamiltonResponse(hamiltonian=True, connected=True, longest_path_len=view.order,
                                    cycle=list(found.sequence), exact=exact)
        return HamiltonResponse(hamiltonian=False, connected=True, longest_path_len=len(found), exact=exact)
    except Exception as e:
        _fail("Hamilton", e)


@app.get("/constants/{name}")
async def published_constants(name: str):
    """Check a published constant set (a, b, c or d)."""
    if name not in PUBLISHED_SETS:
        raise HTTPException(status_code=404, detail=f"Unknown constant set: {name}")
    return check_conditions(PUBLISHED_SETS[name]).to_dict()


@app.post("/constants")
async def custom_constants(request: ConstantSetRequest):
    """Check a user-supplied constant set."""
    try:
        return check_conditions(ConstantSet(**request.model_dump(), name="custom")).to_dict()
    except Exception as e:
        _fail("Constants", e)


@app.get("/roots/{m}")
async def roots(m: int):
    """beta(m), gamma(m) and their closed-form upper bounds."""
    try:
        return {
            "m": m,
            "beta": beta_of_m(m) if m >= 12 else None,
            "beta_upper_bound": beta_upper_bound(m) if m >= 1 else None,
            "gamma": gamma_of_m(m),
            "gamma_upper_bound": gamma_upper_bound(m),
        }
    except Exception as e:
        _fail("Roots", e)


@app.post("/lowerbound")
async def lowerbound_endpoint(request: LowerBoundRequest):
    """Lonely-vertex counts and the Tutte certificate for one two-edge graph."""
    try:
        g = generate(GenParams.plain(request.n, 2, PREFERENTIAL, request.seed))
        stats = lonely_stats(g, request.c)
        witness = no_pm_certificate(g, request.c)
        return {
            **stats.to_dict(),
            "reference": lonely_reference(request.c),
            "sweet_cherries": sweet_cherries(g).count,
            "certificate": None if witness is None else {
                "separator_size": len(witness.separator),
                "odd_components": witness.odd_components,
                "deficiency": witness.deficiency,
            },
        }
    except Exception as e:
        _fail("Lower bound", e)


@app.post("/experiments", response_model=ExperimentResponse)
async def start_experiment(config: ExperimentConfig, background_tasks: BackgroundTasks):
    """Schedule an experiment; results land under the results directory."""
    try:
        out_dir = experiment_dir(config.name)
        background_tasks.add_task(run_experiment, config, out_dir)
        return ExperimentResponse(success=True, message=f"Experiment {config.name} scheduled",
                                  out_dir=str(out_dir))
    except Exception as e:
        _fail("Experiment", e)


@app.get("/experiments/{name}")
async def experiment_results(name: str):
    """Aggregated per-cell table of a stored experiment."""
    try:
        out_dir = experiment_dir(name)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    if not out_dir.exists():
        raise HTTPException(status_code=404, detail=f"No experiment named {name}")
    try:
        store = ExperimentStore(str(out_dir))
        return {"name": name, "manifest": store.load_manifest(), "cells": store.get_cell_stats()}
    except Exception as e:
        _fail("Experiment results", e)


@app.on_event("startup")
async def startup_event():
    """Initialize the application on startup."""
    configure_logging()
    print("🧮 attachlab API starting up...")
    print("Available endpoints:")
    print("  POST /graphs/summary - Generate and summarise a graph")
    print("  POST /matching - Maximum matching")
    print("  POST /hamilton - Hamiltonian cycle search")
    print("  GET /constants/{name} - Verify a published constant set")
    print("  POST /lowerbound - Lonely-vertex statistics")
    print("  POST /experiments - Schedule an experiment")
    print("  GET /health - Health check")


@app.on_event("shutdown")
async def shutdown_event():
    """Cleanup on application shutdown."""
    print("🧮 attachlab API shutting down...")


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
