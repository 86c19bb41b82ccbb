"""
Lonely-vertex counting for two-edge preferential attachment graphs
Old/young and lonely classification, the deleted graph H, sweet cherries
and the Tutte certificate that rules out a perfect matching.

A vertex is old when its label is at most floor(c*n) and lonely when no
younger vertex sends a stem edge to it. A loop stem of a young lonely
vertex counts on the old side; it never contributes an edge of H.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from algorithms.matching import TutteWitness, has_perfect_matching, tutte_certificate
from config.settings import CROSS_CHECK_LIMIT, DEFAULT_CUTOFF
from graphs.core import PREFERENTIAL, AttachGraph, SimpleView, component_sizes, require_model, simple_view
from graphs.errors import ParameterError

logger = logging.getLogger(__name__)


def _check_cutoff(c: float) -> None:
    if not 0 < c < 1:
        raise ParameterError(f"Cutoff c must lie in (0, 1), got {c}")


def _require_two_edge_pa(g: AttachGraph) -> None:
    require_model(g, PREFERENTIAL, m=2)


def younger_in_degree(g: AttachGraph) -> np.ndarray:
    """Stem edges each vertex receives from younger vertices (loops excluded)."""
    received = g.targets[g.targets != g.stems]
    return np.bincount(received, minlength=g.n + 1)


def lonely_mask(g: AttachGraph) -> np.ndarray:
    mask = younger_in_degree(g) == 0
    mask[0] = False
    return mask


@dataclass(frozen=True)
class LonelyStats:
    c: float
    n: int
    A_n: int
    B_n: int
    C_n: int
    D_n: int

    @property
    def cut(self) -> int:
        return int(math.floor(self.c * self.n))

    def fractions(self) -> Dict[str, float]:
        return {key: getattr(self, key) / self.n for key in ("A_n", "B_n", "C_n", "D_n")}

    @property
    def hamilton_margin(self) -> float:
        """B/2 + A + C - D; positive means H has too many low-degree vertices for a cycle."""
        return self.B_n / 2 + self.A_n + self.C_n - self.D_n

    def to_dict(self) -> Dict:
        return {**asdict(self), "fractions": self.fractions(), "hamilton_margin": self.hamilton_margin}


def lonely_reference(c: float) -> Dict[str, float]:
    """Limiting values of A_n/n, B_n/n, C_n/n, D_n/n."""
    _check_cutoff(c)
    return {
        "A_n": c - c * c,
        "B_n": 4 * math.sqrt(c) / 3 - 2 * c + 2 * c * c / 3,
        "C_n": c * c / 2,
        "D_n": c - c * c / 2,
    }


def _classify(g: AttachGraph, c: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    cut = int(math.floor(c * g.n))
    labels = np.arange(g.n + 1)
    old = (labels >= 1) & (labels <= cut)
    lonely = lonely_mask(g)
    stems = g.targets.reshape(g.n, g.m)
    own = np.arange(1, g.n + 1)[:, None]
    old_side = np.zeros(g.n + 1, dtype=np.int64)
    old_side[1:] = np.count_nonzero((stems <= cut) | (stems == own), axis=1)
    return old, lonely, old_side


def lonely_stats(g: AttachGraph, c: float = DEFAULT_CUTOFF) -> LonelyStats:
    _require_two_edge_pa(g)
    _check_cutoff(c)
    old, lonely, old_side = _classify(g, c)
    young_lonely = lonely & ~old
    young_lonely[0] = False
    return LonelyStats(
        c=c,
        n=g.n,
        A_n=int(np.count_nonzero(young_lonely & (old_side == 2))),
        B_n=int(np.count_nonzero(young_lonely & (old_side == 1))),
        C_n=int(np.count_nonzero(old & lonely)),
        D_n=int(np.count_nonzero(old & ~lonely)),
    )


def deleted_vertices(g: AttachGraph, c: float = DEFAULT_CUTOFF) -> np.ndarray:
    """Labels of the old vertices that are not lonely."""
    _require_two_edge_pa(g)
    _check_cutoff(c)
    old, lonely, _ = _classify(g, c)
    return np.flatnonzero(old & ~lonely)


def build_H(g: AttachGraph, c: float = DEFAULT_CUTOFF) -> SimpleView:
    """Simple view of g with the old non-lonely vertices removed; labels are kept."""
    removed = deleted_vertices(g, c)
    return simple_view(g).without(removed)


def isolated_count(view: SimpleView) -> int:
    degrees = view.degrees()
    present = np.ones(view.n + 1, dtype=bool) if view.present is None else view.present.copy()
    present[0] = False
    return int(np.count_nonzero(present & (degrees == 0)))


@dataclass
class CherryReport:
    count: int
    witnesses: List[Tuple[int, int, int]] = field(default_factory=list)
    overlapping: bool = False

    def density(self, n: int) -> float:
        return self.count / n if n else 0.0


def sweet_cherries(g: AttachGraph) -> CherryReport:
    """Triples (v2, v3, v4) by quartile where v4 is lonely with older neighbours
    exactly {v2, v3}, v4 is the only younger neighbour of both, and v2, v3
    send both stems into the first quartile."""
    _require_two_edge_pa(g)
    n = g.n
    if n < 4:
        return CherryReport(count=0)

    q1, q2, q3 = n // 4, n // 2, (3 * n) // 4
    stems = g.targets.reshape(n, 2)
    received = younger_in_degree(g)
    lonely = received == 0
    rooted = np.zeros(n + 1, dtype=bool)
    rooted[1:] = np.all(stems <= q1, axis=1)

    v4 = np.arange(q3 + 1, n + 1)
    v4 = v4[lonely[v4]]
    pairs = np.sort(stems[v4 - 1], axis=1)
    v2, v3 = pairs[:, 0], pairs[:, 1]
    keep = (
        (v2 > q1) & (v2 <= q2) & (v3 > q2) & (v3 <= q3)
        & (received[v2] == 1) & (received[v3] == 1)
        & rooted[v2] & rooted[v3]
    )
    witnesses = [(int(a), int(b), int(c)) for a, b, c in zip(v2[keep], v3[keep], v4[keep])]

    seen = set()
    overlapping = False
    for triple in witnesses:
        if seen.intersection(triple):
            overlapping = True
        seen.update(triple)
    if overlapping:
        logger.warning("Sweet cherries share vertices in a graph with n=%d", n)
    return CherryReport(count=len(witnesses), witnesses=witnesses, overlapping=overlapping)


def no_pm_certificate(
    g: AttachGraph,
    c: float = DEFAULT_CUTOFF,
    cross_check_limit: int = CROSS_CHECK_LIMIT,
) -> Optional[TutteWitness]:
    """Tutte witness with S = old non-lonely vertices, when odd(H) - |S| >= 2.

    Graphs with at most cross_check_limit vertices are also run through the
    exact matching; a disagreement is logged as an error.
    """
    removed = deleted_vertices(g, c)
    view = simple_view(g)
    witness = tutte_certificate(view, removed)
    if witness is not None and g.n <= cross_check_limit and has_perfect_matching(view):
        logger.error("Tutte witness with deficiency %d but a perfect matching exists (n=%d, seed=%d)",
                     witness.deficiency, g.n, g.seed)
    return witness


def odd_component_count(view: SimpleView) -> int:
    sizes = component_sizes(view)
    return int(np.count_nonzero(sizes % 2))


def lonely_common_neighbours(g: AttachGraph, c: Optional[float] = None) -> List[int]:
    """Vertices with at least three lonely neighbours of simple degree <= 2.

    A Hamiltonian cycle would need all edges of those neighbours, so any
    returned vertex rules one out. With c given, only young lonely
    neighbours count.
    """
    if c is not None:
        _check_cutoff(c)
    view = simple_view(g)
    degrees = view.degrees()
    candidates = lonely_mask(g) & (degrees <= 2) & (degrees >= 1)
    if c is not None:
        candidates[: int(math.floor(c * g.n)) + 1] = False

    edges = view.edge_array()
    counts = np.zeros(g.n + 1, dtype=np.int64)
    np.add.at(counts, edges[candidates[edges[:, 0]], 1], 1)
    np.add.at(counts, edges[candidates[edges[:, 1]], 0], 1)
    return [int(v) for v in np.flatnonzero(counts >= 3)]
