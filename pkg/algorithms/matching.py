"""
Maximum matchings and the two-round augmentation procedure
A(G) (vertices isolated by some maximum matching), B(v), Tutte
certificates and the closed-form success integrals.
"""

import logging
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Set, Tuple

import numpy as np
from scipy.integrate import quad

from algorithms.blossom import augment_from, even_vertices, maximum_matching
from graphs.core import AttachGraph, SimpleView, component_sizes, neighbourhood, simple_view
from graphs.errors import ParameterError, PreconditionError
from graphs.generate import project

logger = logging.getLogger(__name__)

PERFECT = "perfect"
EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class Matching:
    pairs: FrozenSet[Tuple[int, int]]

    @property
    def size(self) -> int:
        return len(self.pairs)

    @classmethod
    def from_mate(cls, mate: List[int]) -> "Matching":
        return cls(frozenset((v, w) for v, w in enumerate(mate) if w > v))

    def covers(self, v: int) -> bool:
        return any(v in pair for pair in self.pairs)


def _working_copy(view: SimpleView) -> Tuple[List[List[int]], List[bool]]:
    adj = [list(row) for row in view.adjacency]
    active = [False] + [view.contains(v) for v in range(1, view.n + 1)]
    return adj, active


def _mate_of(view: SimpleView) -> Tuple[List[List[int]], List[bool], List[int]]:
    adj, active = _working_copy(view)
    return adj, active, maximum_matching(adj, active)


def max_matching(view: SimpleView) -> Matching:
    _, _, mate = _mate_of(view)
    return Matching.from_mate(mate)


def matching_number(view: SimpleView) -> int:
    return max_matching(view).size


def has_perfect_matching(view: SimpleView) -> bool:
    """True iff nu(G) = floor(n/2) (one unmatched vertex allowed at odd n)."""
    return matching_number(view) == view.order // 2


def isolatable_set(view: SimpleView) -> Set[int]:
    """A(G) = {u : nu(G - u) = nu(G)}."""
    adj, active, mate = _mate_of(view)
    return even_vertices(adj, mate, active)


def _isolate(u: int, adj, mate: List[int], active: List[bool]) -> None:
    """Turn a maximum matching into one that leaves u exposed; u becomes inactive.

    Requires u in A(G), so G - u keeps the matching number.
    """
    active[u] = False
    partner = mate[u]
    if partner == -1:
        return
    mate[u] = mate[partner] = -1
    if not augment_from(partner, adj, mate, active):
        raise PreconditionError(f"Vertex {u} is not isolated by any maximum matching")


def b_set(view: SimpleView, u: int) -> Set[int]:
    """B(u) = {w != u : nu(G - u - w) = nu(G)}; needs u in A(G)."""
    adj, active, mate = _mate_of(view)
    if u not in even_vertices(adj, mate, active):
        raise PreconditionError(f"Vertex {u} is not in A(G)")
    _isolate(u, adj, mate, active)
    return even_vertices(adj, mate, active)


@dataclass
class ExpansionReport:
    skipped: bool
    checked: int = 0
    counterexamples: List[Tuple[int, int, int]] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.counterexamples


def check_matching_expansion(view: SimpleView) -> ExpansionReport:
    """Verify |N(B(u))| < |B(u)| for every u in A with B(u) nonempty."""
    adj, active, mate = _mate_of(view)
    if sum(1 for w in mate if w > 0) // 2 == view.order // 2:
        return ExpansionReport(skipped=True)

    report = ExpansionReport(skipped=False)
    for u in sorted(even_vertices(adj, mate, active)):
        local_active, local_mate = list(active), list(mate)
        _isolate(u, adj, local_mate, local_active)
        b = even_vertices(adj, local_mate, local_active)
        if not b:
            continue
        report.checked += 1
        boundary = len(neighbourhood(view, b))
        if boundary >= len(b):
            logger.warning("Matching expansion fails at u=%d: |N(B)|=%d, |B|=%d", u, boundary, len(b))
            report.counterexamples.append((u, len(b), boundary))
    return report


@dataclass(frozen=True)
class AugStep:
    vertex: int
    a_size: int
    b_size: int
    hit: bool
    matching_size: int
    predicted: bool = False


@dataclass
class AugTrace:
    steps: List[AugStep]
    status: str
    initial_size: int
    final_size: int
    n: int
    expansion_floor: Optional[int] = None
    below_floor: int = 0

    @property
    def hits(self) -> int:
        return sum(1 for step in self.steps if step.hit)


def two_round_matching_sim(g: AttachGraph, check_floor: Optional[float] = None) -> AugTrace:
    """Replay red edges onto the blue graph, youngest unexposed vertex of A first.

    check_floor: when given (an alpha for which the blue graph has been
    verified to expand with l = 1), every queried |B(v)| is compared with
    alpha*n; shortfalls are logged and counted in `below_floor`. Each step
    also records whether a red edge of v lands in B(v), which must agree
    with the augmentation outcome.
    """
    if g.m1 < 1 or g.m2 < 1:
        raise ParameterError(f"Need m1, m2 >= 1, got ({g.m1}, {g.m2})")

    blue = simple_view(project(g, 1))
    red_targets = project(g, 2).targets.reshape(g.n, g.m2)
    adj, active, mate = _mate_of(blue)
    adjacency_sets = [set(row) for row in adj]
    size = sum(1 for w in mate if w > 0) // 2
    initial = size
    target = g.n // 2
    floor = None if check_floor is None else check_floor * g.n

    below_floor = 0
    exposed = [False] * (g.n + 1)
    steps: List[AugStep] = []
    while size < target:
        a = even_vertices(adj, mate, active)
        candidates = [v for v in a if not exposed[v]]
        if not candidates:
            break
        v = max(candidates)
        exposed[v] = True

        step_active, step_mate = list(active), list(mate)
        _isolate(v, adj, step_mate, step_active)
        b = even_vertices(adj, step_mate, step_active)
        if floor is not None and b and len(b) < floor:
            logger.warning("|B(%d)| = %d below the expansion floor %.1f", v, len(b), floor)
            below_floor += 1

        for w in red_targets[v - 1]:
            w = int(w)
            if w != v and w not in adjacency_sets[v]:
                adjacency_sets[v].add(w)
                adjacency_sets[w].add(v)
                adj[v].append(w)
                adj[w].append(v)

        hit = augment_from(v, adj, step_mate, active)
        if hit:
            mate = step_mate
            size += 1
        hit_predicted = any(int(w) in b for w in red_targets[v - 1])
        if hit != hit_predicted:
            logger.warning("Augmentation at %d disagrees with the B(v) test", v)
        steps.append(AugStep(vertex=v, a_size=len(a), b_size=len(b), hit=hit, matching_size=size,
                             predicted=hit_predicted))

    status = PERFECT if size == target else EXHAUSTED
    return AugTrace(steps=steps, status=status, initial_size=initial, final_size=size, n=g.n,
                    expansion_floor=None if floor is None else int(np.ceil(floor)),
                    below_floor=below_floor)


@dataclass(frozen=True)
class TutteWitness:
    separator: FrozenSet[int]
    odd_components: int
    deficiency: int


def tutte_certificate(view: SimpleView, S) -> Optional[TutteWitness]:
    """Witness iff o(G - S) - |S| >= 2, which rules out a perfect matching."""
    separator = frozenset(int(v) for v in S)
    for v in separator:
        if not view.contains(v):
            raise ParameterError(f"Separator vertex {v} is not in the graph")
    sizes = component_sizes(view.without(separator))
    odd = int(np.count_nonzero(sizes % 2))
    deficiency = odd - len(separator)
    if deficiency < 2:
        return None
    return TutteWitness(separator=separator, odd_components=odd, deficiency=deficiency)


def deficiency_separator(view: SimpleView) -> FrozenSet[int]:
    """S = N(A(G)): G - S has exactly n - 2 nu(G) more odd components than |S|."""
    return frozenset(neighbourhood(view, isolatable_set(view)))


def certify(view: SimpleView) -> Tuple[Matching, Optional[TutteWitness]]:
    """A maximum matching plus, when it misses two or more vertices, a Tutte witness."""
    matching = max_matching(view)
    witness = tutte_certificate(view, deficiency_separator(view))
    if witness is not None and witness.deficiency != view.order - 2 * matching.size:
        logger.warning("Separator deficiency %d disagrees with n - 2nu = %d",
                       witness.deficiency, view.order - 2 * matching.size)
    return matching, witness


def success_rate(alpha: float, m2: int, halved: bool = False) -> float:
    """Closed form of the expected-success integral over [0, alpha].

    halved=False: alpha - 1/(m2+1) + (1-alpha)^(m2+1)/(m2+1)
    halved=True:  alpha - 2/(m2+1) + 2(1-alpha/2)^(m2+1)/(m2+1)
    """
    if not 0 < alpha < 1:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    if m2 < 1:
        raise ParameterError(f"m2 must be at least 1, got {m2}")
    k = m2 + 1
    if halved:
        return alpha - 2.0 / k + 2.0 * (1.0 - alpha / 2.0) ** k / k
    return alpha - 1.0 / k + (1.0 - alpha) ** k / k


def success_rate_quadrature(alpha: float, m2: int, halved: bool = False) -> float:
    """The same integral evaluated numerically."""
    scale = 0.5 if halved else 1.0
    value, _ = quad(lambda x: 1.0 - (1.0 - scale * (alpha - x)) ** m2, 0.0, alpha,
                    epsabs=1e-14, epsrel=1e-13)
    return value
