"""
Longest paths and Hamiltonian cycles
Posa rotations and END sets, the U/W greedy, rotation-extension search,
the two-round Hamiltonicity replay and exact subset-DP oracles.
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
from numba import njit

from config.settings import DEFAULT_POSA_BUDGET, DEFAULT_STALL_FACTOR, EXHAUSTIVE_PATH_LIMIT, HELD_KARP_LIMIT
from graphs.core import AttachGraph, SimpleView, is_connected, simple_view
from graphs.errors import ParameterError, PreconditionError
from graphs.generate import project

logger = logging.getLogger(__name__)

HAMILTONIAN = "hamiltonian"
EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class PathState:
    """A path; the first vertex is the fixed anchor."""
    sequence: Tuple[int, ...]

    @property
    def anchor(self) -> int:
        return self.sequence[0]

    @property
    def end(self) -> int:
        return self.sequence[-1]

    def __len__(self) -> int:
        return len(self.sequence)

    def is_valid(self, view: SimpleView) -> bool:
        seq = self.sequence
        return (
            len(seq) >= 1
            and len(set(seq)) == len(seq)
            and all(view.contains(v) for v in seq)
            and all(view.has_edge(a, b) for a, b in zip(seq, seq[1:]))
        )


@dataclass(frozen=True)
class HamCycle:
    sequence: Tuple[int, ...]

    def is_valid(self, view: SimpleView) -> bool:
        seq = self.sequence
        if len(seq) != view.order or len(seq) < 3 or set(seq) != set(view.vertices()):
            return False
        return all(view.has_edge(seq[i], seq[(i + 1) % len(seq)]) for i in range(len(seq)))


def _rotated(path: Sequence[int], i: int) -> List[int]:
    """(a..x, y..b) -> (a..x, b..y) for x = path[i]."""
    return list(path[: i + 1]) + list(path[: i: -1])


def rotate(view: SimpleView, p: PathState, pivot: int) -> PathState:
    seq = p.sequence
    if pivot == p.end:
        raise PreconditionError("The pivot cannot be the moving endpoint")
    if pivot not in seq:
        raise PreconditionError(f"Pivot {pivot} is not on the path")
    if not view.has_edge(p.end, pivot):
        raise PreconditionError(f"Pivot {pivot} is not adjacent to endpoint {p.end}")
    return PathState(tuple(_rotated(seq, seq.index(pivot))))


class _RotationSearch:
    """Rotation-extension machinery over a mutable adjacency (list of sets)."""

    def __init__(self, adj: List[Set[int]], order: int, budget: int):
        self.adj = adj
        self.order = order
        self.budget = budget
        self.steps = 0

    @property
    def exhausted(self) -> bool:
        return self.steps >= self.budget

    def closure(self, path: List[int], stop: Optional[Callable[[List[int]], bool]] = None,
                limit: Optional[int] = None) -> Tuple[Dict[int, List[int]], Optional[List[int]]]:
        """END(P, anchor) with one witness path per endpoint.

        Stops early when `stop` accepts a witness (returned second) or when the
        step budget runs out.
        """
        witnesses = {path[-1]: path}
        if stop is not None and stop(path):
            return witnesses, path
        limit = limit or self.order
        queue = deque([path])
        while queue:
            current = queue.popleft()
            position = {v: i for i, v in enumerate(current)}
            last = len(current) - 1
            for x in self.adj[current[-1]]:
                i = position.get(x)
                if i is None or i >= last - 1:
                    continue
                new_end = current[i + 1]
                if new_end in witnesses:
                    continue
                self.steps += 1
                rotated = _rotated(current, i)
                witnesses[new_end] = rotated
                if stop is not None and stop(rotated):
                    return witnesses, rotated
                if self.exhausted or len(witnesses) >= limit:
                    return witnesses, None
                queue.append(rotated)
        return witnesses, None

    def extend(self, path: List[int], on_path: Set[int]) -> int:
        """Greedy extension at the free end; returns the number of vertices added."""
        added = 0
        while not self.exhausted:
            head = path[-1]
            outside = [w for w in self.adj[head] if w not in on_path]
            self.steps += 1
            if not outside:
                break
            nxt = min(outside, key=lambda w: (len(self.adj[w] - on_path), w))
            path.append(nxt)
            on_path.add(nxt)
            added += 1
        return added

    def has_exit(self, path: List[int], on_path: Set[int]) -> bool:
        return any(w not in on_path for w in self.adj[path[-1]])

    def closes(self, path: List[int]) -> bool:
        return len(path) >= 3 and path[0] in self.adj[path[-1]]

    def open_cycle(self, cycle: List[int], on_path: Set[int]) -> Optional[List[int]]:
        """Cycle of length k < n to a path of length k + 1 through the lowest outside vertex."""
        outside = sorted({w for v in cycle for w in self.adj[v] if w not in on_path})
        if not outside:
            return None
        u = outside[0]
        c = min(v for v in cycle if v in self.adj[u])
        i = cycle.index(c)
        return [u] + cycle[i:] + cycle[:i]

    def grow(self, path: List[int], stall_window: int) -> Union[HamCycle, List[int]]:
        """Extend/rotate from `path` until a Hamiltonian cycle, a stall or the budget."""
        on_path = set(path)
        progress_mark = self.steps
        flipped = False
        while not self.exhausted:
            if self.extend(path, on_path):
                progress_mark = self.steps
                flipped = False
            if len(path) == self.order:
                _, closing = self.closure(path, stop=self.closes)
                if closing is not None:
                    return HamCycle(tuple(closing))
            else:
                _, found = self.closure(path, stop=lambda q: self.has_exit(q, on_path) or self.closes(q))
                if found is not None:
                    if self.has_exit(found, on_path):
                        path = found
                        continue
                    opened = self.open_cycle(found, on_path)
                    if opened is not None:
                        path = opened
                        on_path.add(opened[0])
                        progress_mark = self.steps
                        flipped = False
                        continue
            if self.steps - progress_mark > stall_window or flipped:
                break
            path = path[::-1]
            flipped = True
        return path


def end_set(view: SimpleView, p: PathState) -> Set[int]:
    """All endpoints reachable by rotations with the anchor fixed (includes p.end)."""
    search = _RotationSearch([set(row) for row in view.adjacency], view.order, budget=float("inf"))
    witnesses, _ = search.closure(list(p.sequence), limit=view.n + 1)
    return set(witnesses)


@dataclass
class GreedyPath:
    path: PathState
    largest_pair: int
    u_peak: int
    w_peak: int
    steps: int
    snapshots: Optional[List[Tuple[frozenset, frozenset]]] = None


def longest_path_greedy(view: SimpleView, seed: int = 0, record: bool = False) -> GreedyPath:
    """The U/W process: extend from the head, retire stuck heads to W, restart from U.

    There is never an edge between U and W; a retiring head is checked
    against U and a neighbour left there raises RuntimeError. `largest_pair`
    is the largest min(|U|, |W|) seen, an edge-free pair of that size, and
    is at least (n - longest path)/2 because |U| - |W| drops by one per
    step. With `record` the (U, W) pair after every step is kept.
    """
    rng = np.random.default_rng(seed)
    vertices = view.vertices()
    order = [vertices[i] for i in rng.permutation(len(vertices))]
    adjacency = view.adjacency
    unvisited = set(vertices)
    retired: Set[int] = set()
    cursor = {v: 0 for v in vertices}
    path: List[int] = []
    best: List[int] = []
    snapshots: Optional[List[Tuple[frozenset, frozenset]]] = [] if record else None
    largest_pair = u_peak = w_peak = steps = 0
    next_start = 0

    while unvisited or path:
        steps += 1
        if not path:
            while order[next_start] not in unvisited:
                next_start += 1
            start = order[next_start]
            unvisited.discard(start)
            path.append(start)
        else:
            head = path[-1]
            row = adjacency[head]
            while cursor[head] < len(row) and row[cursor[head]] not in unvisited:
                cursor[head] += 1
            if cursor[head] < len(row):
                nxt = row[cursor[head]]
                unvisited.discard(nxt)
                path.append(nxt)
            else:
                if not unvisited.isdisjoint(row):
                    raise RuntimeError(f"Retired vertex {head} still has a neighbour in U")
                retired.add(path.pop())
        if len(path) > len(best):
            best = list(path)
        if snapshots is not None:
            snapshots.append((frozenset(unvisited), frozenset(retired)))
        u_peak = max(u_peak, len(unvisited))
        w_peak = max(w_peak, len(retired))
        largest_pair = max(largest_pair, min(len(unvisited), len(retired)))

    return GreedyPath(path=PathState(tuple(best)), largest_pair=largest_pair,
                      u_peak=u_peak, w_peak=w_peak, steps=steps, snapshots=snapshots)


def posa_search(view: SimpleView, budget: int = DEFAULT_POSA_BUDGET, seed: int = 0,
                stall_window: Optional[int] = None) -> Union[HamCycle, PathState]:
    """Rotation-extension search for a Hamiltonian cycle.

    Restarts from a reshuffled start vertex whenever a run stalls for
    `stall_window` steps (default 5n). Returns the cycle, or the longest
    path seen once the budget is spent.
    """
    if not is_connected(view):
        raise PreconditionError("posa_search needs a connected graph")
    vertices = view.vertices()
    n = len(vertices)
    if n < 3:
        return PathState(tuple(vertices) if n < 2 else (vertices[0], vertices[1]))

    stall_window = stall_window or DEFAULT_STALL_FACTOR * n
    rng = np.random.default_rng(seed)
    search = _RotationSearch([set(row) for row in view.adjacency], n, budget)
    best: List[int] = []
    restarts = 0
    while not search.exhausted:
        start = vertices[int(rng.integers(n))]
        outcome = search.grow([start], stall_window)
        if isinstance(outcome, HamCycle):
            logger.debug("Hamiltonian cycle after %d steps and %d restarts", search.steps, restarts)
            return outcome
        if len(outcome) > len(best):
            best = outcome
        restarts += 1
    return PathState(tuple(best))


@dataclass(frozen=True)
class HamStep:
    vertex: int
    a_size: int
    b_size: int
    hit: bool
    length_before: int
    length_after: int


@dataclass
class HamTrace:
    steps: List[HamStep]
    status: str
    longest_path_len: int
    cycle: Optional[HamCycle] = None

    @property
    def successes(self) -> int:
        return sum(1 for step in self.steps if step.hit)


def two_round_hamilton_sim(g: AttachGraph, budget: int = DEFAULT_POSA_BUDGET, seed: int = 0) -> HamTrace:
    """Reveal red edges vertex by vertex, youngest unexposed endpoint first.

    A is the set of endpoints of rotation variants of the current longest
    path; B(v) = END(P', v) for a witness path P' ending at v. Each phase of
    rotation-extension search gets `budget` steps.
    """
    if g.m1 < 1 or g.m2 < 1:
        raise ParameterError(f"Need m1, m2 >= 1, got ({g.m1}, {g.m2})")
    blue = simple_view(project(g, 1))
    if not is_connected(blue):
        raise PreconditionError("The blue graph is disconnected")

    n = g.n
    if n < 3:
        return HamTrace(steps=[], status=EXHAUSTED, longest_path_len=n)
    red_targets = project(g, 2).targets.reshape(n, g.m2)
    adj = [set(row) for row in blue.adjacency]
    stall_window = DEFAULT_STALL_FACTOR * n

    def phase(path: List[int]) -> Union[HamCycle, List[int]]:
        return _RotationSearch(adj, n, budget).grow(list(path), stall_window)

    rng = np.random.default_rng(seed)
    outcome = phase([int(rng.integers(1, n + 1))])
    if isinstance(outcome, HamCycle):
        return HamTrace(steps=[], status=HAMILTONIAN, longest_path_len=n, cycle=outcome)

    path = outcome
    exposed = [False] * (n + 1)
    steps: List[HamStep] = []
    while True:
        search = _RotationSearch(adj, n, float("inf"))
        ends_forward, _ = search.closure(path)
        ends_backward, _ = search.closure(path[::-1])
        witnesses = {**ends_backward, **ends_forward}
        candidates = [v for v in witnesses if not exposed[v]]
        if not candidates:
            return HamTrace(steps=steps, status=EXHAUSTED, longest_path_len=len(path))

        v = max(candidates)
        exposed[v] = True
        anchored = witnesses[v][::-1]
        b_witnesses, _ = search.closure(anchored)
        b_set = set(b_witnesses) - {v}

        on_path = set(anchored)
        reveals = [int(w) for w in red_targets[v - 1] if int(w) != v]
        for w in reveals:
            adj[v].add(w)
            adj[w].add(v)

        before = len(anchored)
        grown: Optional[List[int]] = None
        cycle: Optional[HamCycle] = None
        exits = [w for w in reveals if w not in on_path]
        closers = [w for w in reveals if w in b_set]
        if exits:
            grown = anchored[::-1] + [min(exits)]
        elif closers:
            ring = b_witnesses[min(closers)]
            if len(ring) == n:
                cycle = HamCycle(tuple(ring))
            else:
                grown = search.open_cycle(ring, on_path)
        hit = cycle is not None or grown is not None

        if cycle is None:
            improved = phase(grown if grown is not None else anchored)
            if isinstance(improved, HamCycle):
                cycle = improved
            else:
                candidates_paths = [p for p in (improved, grown, path) if p is not None]
                path = max(candidates_paths, key=len)

        after = n if cycle is not None else len(path)
        if hit and after <= before:
            logger.warning("Successful exposure at %d did not lengthen the path", v)
        steps.append(HamStep(vertex=v, a_size=len(witnesses), b_size=len(b_set), hit=hit,
                             length_before=before, length_after=after))
        if cycle is not None:
            return HamTrace(steps=steps, status=HAMILTONIAN, longest_path_len=n, cycle=cycle)


@njit(cache=True)
def _anchored_reach(adjbits, n):
    """reach[idx]: end-vertex bitmask of paths from vertex 0 covering (idx << 1) | 1."""
    size = 1 << (n - 1)
    reach = np.zeros(size, dtype=np.int64)
    reach[0] = 1
    for idx in range(size):
        ends = reach[idx]
        if ends == 0:
            continue
        mask = (idx << 1) | 1
        e = 0
        while ends != 0:
            if ends & 1:
                free = adjbits[e] & ~mask
                v = 0
                while free != 0:
                    if free & 1:
                        grown = mask | (1 << v)
                        reach[grown >> 1] |= 1 << v
                    free >>= 1
                    v += 1
            ends >>= 1
            e += 1
    return reach


@njit(cache=True)
def _free_reach(adjbits, n):
    """reach[mask]: end-vertex bitmask of paths covering exactly `mask`."""
    size = 1 << n
    reach = np.zeros(size, dtype=np.int64)
    for v in range(n):
        reach[1 << v] = 1 << v
    for mask in range(1, size):
        ends = reach[mask]
        if ends == 0:
            continue
        e = 0
        while ends != 0:
            if ends & 1:
                free = adjbits[e] & ~mask
                v = 0
                while free != 0:
                    if free & 1:
                        reach[mask | (1 << v)] |= 1 << v
                    free >>= 1
                    v += 1
            ends >>= 1
            e += 1
    return reach


def _bitmasks(view: SimpleView) -> Tuple[List[int], np.ndarray]:
    vertices = view.vertices()
    index = {v: i for i, v in enumerate(vertices)}
    bits = np.zeros(len(vertices), dtype=np.int64)
    for v in vertices:
        for w in view.neighbours(v):
            if int(w) in index:
                bits[index[v]] |= 1 << index[int(w)]
    return vertices, bits


def exact_hamiltonian(view: SimpleView) -> bool:
    """Exact decision by dynamic programming over vertex subsets (n <= 24)."""
    n = view.order
    if n > HELD_KARP_LIMIT:
        raise ParameterError(f"Exact Hamiltonicity is limited to n <= {HELD_KARP_LIMIT}, got {n}")
    if n < 3:
        return False
    _, bits = _bitmasks(view)
    reach = _anchored_reach(bits, n)
    return bool(reach[-1] & bits[0])


def exact_longest_path(view: SimpleView) -> PathState:
    """A longest path by exhaustive subset DP (n <= 20)."""
    n = view.order
    if n > EXHAUSTIVE_PATH_LIMIT:
        raise ParameterError(f"Exhaustive longest path is limited to n <= {EXHAUSTIVE_PATH_LIMIT}, got {n}")
    vertices, bits = _bitmasks(view)
    if n == 0:
        return PathState(())
    reach = _free_reach(bits, n)
    reachable = np.flatnonzero(reach)
    popcounts = np.array([bin(int(mask)).count("1") for mask in reachable])
    mask = int(reachable[np.argmax(popcounts)])

    end = (int(reach[mask]) & -int(reach[mask])).bit_length() - 1
    order = [end]
    while mask != (1 << end):
        previous = mask ^ (1 << end)
        candidates = int(reach[previous]) & int(bits[end])
        end = (candidates & -candidates).bit_length() - 1
        order.append(end)
        mask = previous
    return PathState(tuple(vertices[i] for i in order))
