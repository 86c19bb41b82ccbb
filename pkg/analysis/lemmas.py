"""
Empirical checkers for the degree, expansion and large-pair lemmas
Each checker measures one instance (or a batch of seeded instances) and
reports; bounds whose constants are unspecified are logged, never raised.
"""

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np

from algorithms.hamilton import longest_path_greedy
from algorithms.matching import matching_number
from analysis.constants import beta_of_m, gamma_of_m
from config.settings import DEFAULT_A, DEFAULT_C, default_omega
from graphs.core import PREFERENTIAL, UNIFORM, AttachGraph, SimpleView, degrees, require_model, simple_view
from graphs.errors import ParameterError, PreconditionError
from graphs.generate import GenParams, derive_seed, generate

logger = logging.getLogger(__name__)

RANDOM_SHRINK_CAP = 64


@dataclass
class Trajectory:
    times: np.ndarray
    values: np.ndarray
    reference: np.ndarray
    c: float
    m: int
    n: int

    @property
    def final_ratio(self) -> float:
        """Y_n / (2mn sqrt(c))."""
        return float(self.values[-1] / (2 * self.m * self.n * math.sqrt(self.c)))

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.values) >= 0))


def degree_sum_trajectory(g: AttachGraph, c: float) -> Trajectory:
    """Y_t = total degree of [floor(cn)] at time t, for t = floor(cn) .. n."""
    require_model(g, PREFERENTIAL)
    if not 0 < c < 1:
        raise ParameterError(f"c must lie in (0, 1), got {c}")
    n, m = g.n, g.m
    cut = int(math.floor(c * n))
    gained = ((g.stems <= cut).astype(np.int64) + (g.targets <= cut)).reshape(n, m).sum(axis=1)
    running = np.cumsum(gained)
    start = max(cut, 1)
    times = np.arange(start, n + 1)
    values = running[start - 1:]
    reference = 2 * m * n * np.sqrt(c * times / n)
    return Trajectory(times=times, values=values, reference=reference, c=c, m=m, n=n)


def total_weight_bound(m: int, k: int, t: np.ndarray, A: float, omega: int) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    main = (1 + A / (m * k + 1)) * (2 * m * np.sqrt(k * t) + np.sqrt(8 * m * k * t) * (1 + np.log(t / k)))
    return np.where(t >= omega, main, 2.0 * m * omega)


@dataclass
class DegreeBoundReport:
    checked: int = 0
    violations: List[Tuple[int, int, float, float]] = field(default_factory=list)
    ratio_stats: List[Dict] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.violations


def _decile_stats(k: int, times: np.ndarray, ratios: np.ndarray) -> List[Dict]:
    rows = []
    for i, chunk in enumerate(np.array_split(np.arange(len(times)), 10)):
        if len(chunk) == 0:
            continue
        rows.append({
            "k": k,
            "decile": i,
            "t_from": int(times[chunk[0]]),
            "t_to": int(times[chunk[-1]]),
            "max_ratio": float(ratios[chunk].max()),
            "mean_ratio": float(ratios[chunk].mean()),
        })
    return rows


def oldest_degree_bound_check(
    g: AttachGraph,
    A: float = DEFAULT_A,
    omega: Optional[int] = None,
    ks: Sequence[int] = (1, 10, 100),
    random_sets: int = 0,
    seed: int = 0,
) -> DegreeBoundReport:
    """Compare sum_{w in W} deg(w, t) with the total-weight bound.

    W = [k] is checked at every t >= k; `random_sets` extra (k, t, W)
    triples are drawn with W uniform in [t]. Ratios are value / bound.
    """
    require_model(g, PREFERENTIAL)
    n, m = g.n, g.m
    omega = default_omega(n) if omega is None else omega
    report = DegreeBoundReport()

    for k in ks:
        if not 1 <= k <= n:
            continue
        gained = ((g.stems <= k).astype(np.int64) + (g.targets <= k)).reshape(n, m).sum(axis=1)
        times = np.arange(k, n + 1)
        values = np.cumsum(gained)[k - 1:]
        bounds = total_weight_bound(m, k, times, A, omega)
        ratios = values / bounds
        report.checked += len(times)
        for i in np.flatnonzero(ratios > 1):
            report.violations.append((k, int(times[i]), float(values[i]), float(bounds[i])))
        report.ratio_stats.extend(_decile_stats(k, times, ratios))

    rng = np.random.default_rng(seed)
    for _ in range(random_sets):
        t = int(rng.integers(1, n + 1))
        k = int(rng.integers(1, t + 1))
        W = rng.choice(np.arange(1, t + 1), size=k, replace=False)
        value = float(degrees(g, t)[W].sum())
        bound = float(total_weight_bound(m, k, np.array([t]), A, omega)[0])
        report.checked += 1
        if value > bound:
            report.violations.append((k, t, value, bound))

    for k, t, value, bound in report.violations[:10]:
        logger.warning("Total-weight bound exceeded: k=%d t=%d value=%.0f bound=%.1f", k, t, value, bound)
    return report


def _square_adjacency(view: SimpleView, keep: Set[int]) -> Dict[int, Set[int]]:
    """Vertices of `keep` joined when they are at distance 1 or 2 in view."""
    adjacency = view.adjacency_sets
    square: Dict[int, Set[int]] = {}
    for u in keep:
        reach: Set[int] = set(adjacency[u])
        for w in adjacency[u]:
            reach |= adjacency[w]
        square[u] = (reach & keep) - {u}
    return square


def _connected_sets(square: Dict[int, Set[int]], k: int) -> Iterator[frozenset]:
    """Every connected vertex set of size <= k in `square`, each exactly once."""

    def extend(sub: frozenset, ext: Set[int], root: int, closed: Set[int]) -> Iterator[frozenset]:
        yield sub
        if len(sub) == k:
            return
        ext = set(ext)
        while ext:
            w = ext.pop()
            grown = ext | {u for u in square[w] if u > root and u not in closed}
            yield from extend(sub | {w}, grown, root, closed | square[w] | {w})

    for v in sorted(square):
        yield from extend(frozenset([v]), {u for u in square[v] if u > v}, v, square[v] | {v})


def _boundary_size(view: SimpleView, K: Set[int]) -> int:
    adjacency = view.adjacency_sets
    reach: Set[int] = set()
    for v in K:
        reach |= adjacency[v]
    return len(reach - K)


def _violates(view: SimpleView, K: Set[int], ell: int) -> bool:
    return _boundary_size(view, K) < ell * len(K)


def expansion_check(
    view: SimpleView,
    alpha: float,
    ell: int,
    k_max: int,
    random_budget: int = 0,
    seed: int = 0,
) -> Optional[frozenset]:
    """First set K with |K| <= alpha*n and |N(K)| < ell*|K|, or None.

    The exhaustive part covers every size up to min(floor(alpha*n), k_max).
    A violator splits into parts at distance >= 3 only if one part violates
    on its own, and every member of a violator of size k has degree below
    (ell+1)k - 1, so enumerating the connected sets of the distance-2 graph
    on those low-degree vertices decides the question.
    """
    if ell < 1:
        raise ParameterError(f"ell must be at least 1, got {ell}")
    vertices = view.vertices()
    n = len(vertices)
    limit = int(math.floor(alpha * n))
    exhaustive = min(limit, k_max)

    if exhaustive >= 1:
        degree = view.degrees()
        low = {v for v in vertices if degree[v] < (ell + 1) * exhaustive - 1}
        for K in _connected_sets(_square_adjacency(view, low), exhaustive):
            if _violates(view, K, ell):
                return K

    rng = np.random.default_rng(seed)
    cap = min(limit, RANDOM_SHRINK_CAP)
    for _ in range(random_budget if cap >= 1 else 0):
        size = int(rng.integers(1, cap + 1))
        K = {vertices[i] for i in rng.choice(n, size=size, replace=False)}
        while K:
            if _violates(view, K, ell):
                return frozenset(K)
            if len(K) == 1:
                break
            slack = {v: _boundary_size(view, K - {v}) - ell * (len(K) - 1) for v in K}
            K.discard(min(slack, key=lambda v: (slack[v], v)))
    return None


def expansion_check_bruteforce(view: SimpleView, alpha: float, ell: int) -> Optional[frozenset]:
    """Plain enumeration of every K with |K| <= alpha*n; small graphs only."""
    vertices = view.vertices()
    limit = int(math.floor(alpha * len(vertices)))
    for size in range(1, limit + 1):
        for K in combinations(vertices, size):
            if _violates(view, set(K), ell):
                return frozenset(K)
    return None


def good_cutoff(n: int, k: int, d: float) -> int:
    """j = floor(k (n/k)^d), clipped to [1, n]."""
    return min(n, max(1, int(math.floor(k * (n / k) ** d))))


def good_vertices_check(g: AttachGraph, x: float, d: float, k: int) -> int:
    """Vertices of [j] with fewer than (1-x) m log(n/j) neighbours beyond j."""
    n = g.n
    if not 1 <= k <= n:
        raise ParameterError(f"Need 1 <= k <= n, got k={k}, n={n}")
    j = good_cutoff(n, k, d)
    threshold = (1 - x) * g.m * math.log(n / j)
    edges = simple_view(g).edge_array()
    crossing = edges[(edges[:, 0] <= j) & (edges[:, 1] > j), 0]
    future = np.bincount(crossing, minlength=n + 1)
    return int(np.count_nonzero(future[1: j + 1] < threshold))


def _sigma_share(params: GenParams, sigma: int) -> int:
    if sigma not in (1, 2):
        raise ParameterError(f"sigma must be 1 or 2, got {sigma}")
    if not params.coloured:
        return params.m if sigma == 1 else 0
    return params.m1 if sigma == 1 else params.m2


def _sigma_stems(g: AttachGraph, v: int, sigma: int) -> np.ndarray:
    row = g.stems_of(v)
    if not g.coloured:
        return row if sigma == 1 else row[:0]
    return row[: g.m1] if sigma == 1 else row[g.m1:]


def binomial_sigma(p: float, trials: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / trials)


@dataclass
class EdgeAbsenceReport:
    frequency: float
    trials: int
    exact_uniform: float
    far_bound: float
    near_bound: float
    sigma: float


def edge_absence_freq(params: GenParams, v: int, W: Sequence[int], trials: int, sigma: int = 1) -> EdgeAbsenceReport:
    """Frequency of no sigma-edge between v and W over seeded trials.

    Only v's own stems can join v to W (members of W are older), so each
    trial generates the first v vertices.
    """
    W = {int(w) for w in W}
    if not 1 <= v <= params.n:
        raise ParameterError(f"Vertex {v} outside [1, {params.n}]")
    if any(not 1 <= w < v for w in W):
        raise PreconditionError(f"W must be a subset of [{v - 1}]")
    if trials < 1:
        raise ParameterError("trials must be at least 1")

    share = _sigma_share(params, sigma)
    members = np.fromiter(W, dtype=np.int64, count=len(W))
    misses = 0
    for trial in range(trials):
        g = generate(GenParams(v, params.m1, params.m2, params.model,
                               derive_seed(params.seed, "edge_absence", v, trial), params.coloured))
        if not np.isin(_sigma_stems(g, v, sigma), members).any():
            misses += 1

    size = len(W)
    exact = 1.0 if v == 1 else (1 - size / (v - 1)) ** share
    near = (1 - size / (2 * v)) ** share
    reference = exact if params.model == UNIFORM else near
    return EdgeAbsenceReport(
        frequency=misses / trials,
        trials=trials,
        exact_uniform=exact,
        far_bound=(1 - size / (2 * params.n)) ** share,
        near_bound=near,
        sigma=binomial_sigma(reference, trials),
    )


@dataclass
class NeighbourhoodReport:
    frequency: float
    trials: int
    bound: float
    exceeded: bool


def all_neighbours_in_set_freq(
    params: GenParams,
    j: int,
    R: Sequence[int],
    Q: Sequence[int],
    trials: int,
    C: float = DEFAULT_C,
    sigma: int = 1,
) -> NeighbourhoodReport:
    """Frequency that every vertex of R sends all its sigma-stems into Q."""
    R = sorted({int(v) for v in R})
    Q = {int(q) for q in Q}
    if not Q:
        raise ParameterError("Q must be nonempty")
    if not 1 <= j <= params.n or any(not j < v <= params.n for v in R):
        raise PreconditionError(f"R must lie in [{params.n}] minus [{j}]")
    if trials < 1:
        raise ParameterError("trials must be at least 1")

    share = _sigma_share(params, sigma)
    q, r, m = len(Q), len(R), params.m
    base = (1 + C / q) * (2 * math.sqrt(q / j) + math.sqrt(8 * q / (m * j)) * (1 + math.log1p(j / q)))
    bound = min(1.0, base ** (share * r))

    targets = np.fromiter(Q, dtype=np.int64, count=q)
    top = R[-1] if R else 1
    hits = 0
    for trial in range(trials):
        g = generate(GenParams(top, params.m1, params.m2, params.model,
                               derive_seed(params.seed, "all_in_set", j, trial), params.coloured))
        if all(np.isin(_sigma_stems(g, v, sigma), targets).all() for v in R):
            hits += 1

    frequency = hits / trials
    exceeded = frequency > bound + 4 * binomial_sigma(bound, trials)
    if exceeded:
        logger.warning("All-in-Q frequency %.4f above the bound %.4f (C=%.1f)", frequency, bound, C)
    return NeighbourhoodReport(frequency=frequency, trials=trials, bound=bound, exceeded=exceeded)


@dataclass
class BigPairReport:
    n: int
    m: int
    beta: Optional[float]
    gamma: float
    largest_pair: int
    pair_limit: Optional[int]
    path_length: int
    path_target: Optional[int]
    exposed: int
    matching_size: int

    @property
    def pair_violation(self) -> bool:
        return self.pair_limit is not None and self.largest_pair >= self.pair_limit

    @property
    def exposed_violation(self) -> bool:
        return self.exposed >= self.gamma * self.n


def bigpair_check(view: SimpleView, m: int, seed: int = 0) -> BigPairReport:
    """Edge-free pair sizes from the U/W greedy and the exposed set of a maximum matching."""
    n = view.order
    beta = beta_of_m(m) if m >= 12 else None
    gamma = gamma_of_m(m)
    greedy = longest_path_greedy(view, seed=seed)
    nu = matching_number(view)
    pair_limit = None if beta is None else math.ceil(beta * n)
    report = BigPairReport(
        n=n,
        m=m,
        beta=beta,
        gamma=gamma,
        largest_pair=greedy.largest_pair,
        pair_limit=pair_limit,
        path_length=len(greedy.path),
        path_target=None if pair_limit is None else n - 2 * pair_limit,
        exposed=n - 2 * nu,
        matching_size=nu,
    )
    if report.pair_violation or report.exposed_violation:
        logger.warning("Large-pair bounds exceeded at n=%d, m=%d: pair %d, exposed %d",
                       n, m, report.largest_pair, report.exposed)
    return report
