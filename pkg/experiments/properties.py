"""
Trial functions for every experiment property
Each entry takes one cell, a derived seed and the algorithm settings and
returns (success, outcome statistics).
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, Tuple

from pydantic import BaseModel, Field

from algorithms.hamilton import HAMILTONIAN, HamCycle, exact_hamiltonian, posa_search, two_round_hamilton_sim
from algorithms.matching import PERFECT, matching_number, two_round_matching_sim
from analysis.lemmas import (
    bigpair_check,
    degree_sum_trajectory,
    expansion_check,
    good_vertices_check,
    oldest_degree_bound_check,
)
from config.settings import (
    DEFAULT_A,
    DEFAULT_C,
    DEFAULT_CUTOFF,
    DEFAULT_POSA_BUDGET,
    HELD_KARP_LIMIT,
    default_omega,
)
from experiments.checks import graph_ccdf_slope
from graphs.core import MODELS, SimpleView, component_sizes, is_connected, simple_view
from graphs.errors import ParameterError, PreconditionError
from graphs.generate import GenParams, generate
from lowerbound.lonely import lonely_stats, no_pm_certificate, sweet_cherries

CYCLE = "cycle"
EXPERIMENT_MODELS = MODELS + (CYCLE,)


class AlgorithmParams(BaseModel):
    """Knobs shared by the property functions; unspecified lemma constants are exposed here."""
    budget: int = Field(DEFAULT_POSA_BUDGET, ge=1)
    k_max: int = Field(4, ge=1)
    random_budget: int = Field(0, ge=0)
    A: float = Field(DEFAULT_A, gt=0)
    C: float = Field(DEFAULT_C, gt=0)
    c: float = Field(DEFAULT_CUTOFF, gt=0, lt=1)
    omega: str = "log"
    alpha: float = Field(0.0538, gt=0, lt=1)
    ell: int = Field(1, ge=1, le=2)
    x: float = Field(0.22791, gt=0, lt=1)
    y: float = Field(0.020063, gt=0, lt=1)
    d: float = Field(0.387967, gt=0, lt=1)
    k: int = Field(50, ge=1)

    def omega_for(self, n: int) -> int:
        if self.omega == "log":
            return default_omega(n)
        return max(1, int(self.omega))


@dataclass(frozen=True)
class Cell:
    model: str
    m1: int
    m2: int
    n: int
    property: str

    @property
    def key(self) -> str:
        return f"{self.property}|{self.model}|{self.m1}+{self.m2}|{self.n}"

    @property
    def m(self) -> int:
        return self.m1 + self.m2


Outcome = Tuple[bool, Dict]
PropertyFn = Callable[[Cell, int, AlgorithmParams], Outcome]


def cycle_fixture(n: int) -> SimpleView:
    """C_n (a single edge for n = 2)."""
    return SimpleView.from_edges(n, [(v, v % n + 1) for v in range(1, n + 1)] if n > 1 else [])


def _graph(cell: Cell, seed: int, coloured: bool = False):
    if cell.model == CYCLE:
        raise ParameterError(f"Property {cell.property} needs a random model, not the cycle fixture")
    if coloured:
        return generate(GenParams(cell.n, cell.m1, cell.m2, cell.model, seed))
    return generate(GenParams.plain(cell.n, cell.m, cell.model, seed))


def _view(cell: Cell, seed: int) -> SimpleView:
    if cell.model == CYCLE:
        return cycle_fixture(cell.n)
    return simple_view(_graph(cell, seed))


def perfect_matching(cell: Cell, seed: int, params: AlgorithmParams) -> Outcome:
    view = _view(cell, seed)
    nu = matching_number(view)
    return nu == view.order // 2, {"matching_number": nu, "deficit": view.order // 2 - nu}


def hamilton_cycle(cell: Cell, seed: int, params: AlgorithmParams) -> Outcome:
    view = _view(cell, seed)
    if not is_connected(view):
        return False, {"connected": False, "method": "none"}
    if view.order <= HELD_KARP_LIMIT:
        return exact_hamiltonian(view), {"connected": True, "method": "exact"}
    found = posa_search(view, budget=params.budget, seed=seed)
    cycle = isinstance(found, HamCycle)
    return cycle, {"connected": True, "method": "posa", "longest_path": view.order if cycle else len(found)}


def matching_simulation(cell: Cell, seed: int, params: AlgorithmParams) -> Outcome:
    trace = two_round_matching_sim(_graph(cell, seed, coloured=True))
    return trace.status == PERFECT, {
        "initial_size": trace.initial_size,
        "final_size": trace.final_size,
        "exposures": len(trace.steps),
        "hits": trace.hits,
    }


def hamilton_simulation(cell: Cell, seed: int, params: AlgorithmParams) -> Outcome:
    try:
        trace = two_round_hamilton_sim(_graph(cell, seed, coloured=True), budget=params.budget, seed=seed)
    except PreconditionError:
        return False, {"blue_connected": False}
    return trace.status == HAMILTONIAN, {
        "blue_connected": True,
        "longest_path": trace.longest_path_len,
        "exposures": len(trace.steps),
        "hits": trace.successes,
    }


def lower_bound(cell: Cell, seed: int, params: AlgorithmParams) -> Outcome:
    g = _graph(cell, seed)
    stats = lonely_stats(g, params.c)
    witness = no_pm_certificate(g, params.c)
    cherries = sweet_cherries(g)
    outcome = {**stats.fractions(), "sweet_cherries": cherries.count,
               "deficiency": None if witness is None else witness.deficiency}
    return witness is not None, outcome


def total_weight(cell: Cell, seed: int, params: AlgorithmParams) -> Outcome:
    g = _graph(cell, seed)
    report = oldest_degree_bound_check(g, params.A, params.omega_for(cell.n),
                                       random_sets=params.random_budget, seed=seed)
    peak = max((row["max_ratio"] for row in report.ratio_stats), default=0.0)
    return report.holds, {"violations": len(report.violations), "max_ratio": peak}


def expansion(cell: Cell, seed: int, params: AlgorithmParams) -> Outcome:
    view = _view(cell, seed)
    violator = expansion_check(view, params.alpha, params.ell, params.k_max, params.random_budget, seed)
    return violator is None, {"violator_size": 0 if violator is None else len(violator)}


def good_old(cell: Cell, seed: int, params: AlgorithmParams) -> Outcome:
    count = good_vertices_check(_graph(cell, seed), params.x, params.d, params.k)
    return count <= params.y * params.k, {"count": count, "allowed": params.y * params.k}


def degree_sum(cell: Cell, seed: int, params: AlgorithmParams) -> Outcome:
    trajectory = degree_sum_trajectory(_graph(cell, seed), params.c)
    start_exact = int(trajectory.values[0]) == 2 * cell.m * int(math.floor(params.c * cell.n))
    return trajectory.monotone and start_exact, {"final_ratio": trajectory.final_ratio}


def component_structure(cell: Cell, seed: int, params: AlgorithmParams) -> Outcome:
    sizes = component_sizes(_view(cell, seed))
    return len(sizes) == 1, {"components": int(len(sizes)), "odd_components": int((sizes % 2).sum())}


def power_law(cell: Cell, seed: int, params: AlgorithmParams) -> Outcome:
    fit = graph_ccdf_slope(_graph(cell, seed))
    return fit.ok, {"slope": fit.slope, "r_squared": fit.r_squared}


def large_pairs(cell: Cell, seed: int, params: AlgorithmParams) -> Outcome:
    report = bigpair_check(_view(cell, seed), cell.m, seed=seed)
    return not (report.pair_violation or report.exposed_violation), {
        "largest_pair": report.largest_pair,
        "exposed": report.exposed,
        "path_length": report.path_length,
    }


PROPERTIES: Dict[str, PropertyFn] = {
    "pm": perfect_matching,
    "hc": hamilton_cycle,
    "pm-sim": matching_simulation,
    "hc-sim": hamilton_simulation,
    "lowerbound": lower_bound,
    "lemma:total_weight": total_weight,
    "lemma:expansion": expansion,
    "lemma:goodold": good_old,
    "lemma:degree_sum": degree_sum,
    "lemma:components": component_structure,
    "lemma:powerlaw": power_law,
    "lemma:bigpair": large_pairs,
}


def run_trial(cell: Cell, seed: int, params: AlgorithmParams) -> Outcome:
    try:
        fn = PROPERTIES[cell.property]
    except KeyError:
        raise ParameterError(f"Unknown property: {cell.property}")
    success, outcome = fn(cell, seed, params)
    return bool(success), outcome
