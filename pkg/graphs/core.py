"""
Graph data model for attachment processes
Raw process output (AttachGraph), the loop-free simple projection
(SimpleView) and time-indexed degree bookkeeping.

Vertices are 1-based everywhere in the public interface.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from graphs.errors import ModelMismatchError, ParameterError

UNIFORM = "uniform"
PREFERENTIAL = "preferential"
MODELS = (UNIFORM, PREFERENTIAL)

PLAIN, BLUE, RED = 0, 1, 2
COLOUR_LETTERS = {PLAIN: "p", BLUE: "b", RED: "r"}
COLOUR_NAMES = {PLAIN: "plain", BLUE: "blue", RED: "red"}
LETTER_COLOURS = {letter: code for code, letter in COLOUR_LETTERS.items()}


@dataclass(frozen=True)
class EdgeRecord:
    """One stem edge: created at time `stem`, pointing to an older vertex or itself."""
    time: int
    stem: int
    target: int
    colour: str
    ordinal: int


def _frozen(values, dtype) -> np.ndarray:
    array = np.ascontiguousarray(values, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class AttachGraph:
    """Immutable record of one attachment-process run.

    The four arrays are parallel and sorted by (stem, ordinal); record i is
    (stems[i], ordinals[i], targets[i], colours[i]).
    """
    n: int
    m1: int
    m2: int
    model: str
    seed: int
    stems: np.ndarray
    ordinals: np.ndarray
    targets: np.ndarray
    colours: np.ndarray
    coloured: bool = True

    def __post_init__(self):
        for name in ("stems", "ordinals", "targets"):
            object.__setattr__(self, name, _frozen(getattr(self, name), np.int64))
        object.__setattr__(self, "colours", _frozen(self.colours, np.uint8))
        self._validate()

    def _validate(self) -> None:
        if self.model not in MODELS:
            raise ParameterError(f"Unknown model: {self.model}")
        if self.n < 1:
            raise ParameterError(f"n must be at least 1, got {self.n}")
        if self.m1 < 0 or self.m2 < 0:
            raise ParameterError(f"Colour split must be non-negative, got ({self.m1}, {self.m2})")
        if not self.coloured and self.m2 != 0:
            raise ParameterError("An uncoloured graph cannot have red edges")

        m, n = self.m, self.n
        total = m * n
        for name in ("stems", "ordinals", "targets", "colours"):
            if len(getattr(self, name)) != total:
                raise ValueError(f"Expected {total} records, {name} has {len(getattr(self, name))}")
        if total == 0:
            return

        if not np.array_equal(self.stems, np.repeat(np.arange(1, n + 1), m)):
            raise ValueError("Every vertex needs exactly m records, sorted by stem")
        if not np.array_equal(self.ordinals, np.tile(np.arange(1, m + 1), n)):
            raise ValueError("Ordinals must run 1..m within each stem")
        if self.targets.min() < 1 or np.any(self.targets > self.stems):
            raise ValueError("Targets must lie in [stem]")
        if self.model == UNIFORM:
            first = self.stems == 1
            if np.any(self.targets[first] != 1) or np.any(self.targets[~first] == self.stems[~first]):
                raise ValueError("Uniform attachment: vertex 1 has loops, later vertices point strictly older")

        if self.coloured:
            expected = np.where(self.ordinals <= self.m1, BLUE, RED)
        else:
            expected = np.full(total, PLAIN)
        if not np.array_equal(self.colours, expected):
            raise ValueError("Colours do not match the ordinal split")

    @property
    def m(self) -> int:
        return self.m1 + self.m2

    def __len__(self) -> int:
        return len(self.stems)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AttachGraph):
            return NotImplemented
        return (
            (self.n, self.m1, self.m2, self.model, self.seed, self.coloured)
            == (other.n, other.m1, other.m2, other.model, other.seed, other.coloured)
            and np.array_equal(self.targets, other.targets)
            and np.array_equal(self.colours, other.colours)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.m1, self.m2, self.model, self.seed, self.targets.tobytes()))

    def records(self) -> Iterator[EdgeRecord]:
        for stem, ordinal, target, colour in zip(self.stems, self.ordinals, self.targets, self.colours):
            yield EdgeRecord(
                time=int(stem),
                stem=int(stem),
                target=int(target),
                colour=COLOUR_NAMES[int(colour)],
                ordinal=int(ordinal),
            )

    @cached_property
    def edges(self) -> Tuple[EdgeRecord, ...]:
        return tuple(self.records())

    def stems_of(self, v: int) -> np.ndarray:
        """Targets of v's m stem edges, in ordinal order."""
        if not 1 <= v <= self.n:
            raise ParameterError(f"Vertex {v} outside [1, {self.n}]")
        return self.targets[(v - 1) * self.m: v * self.m]

    @classmethod
    def from_targets(
        cls,
        model: str,
        n: int,
        m1: int,
        m2: int,
        targets: Sequence[int],
        seed: int = 0,
        coloured: bool = True,
    ) -> "AttachGraph":
        """Build a graph from the flat target list (m targets per vertex, vertex order)."""
        m = m1 + m2
        ordinals = np.tile(np.arange(1, m + 1), n)
        if coloured:
            colours = np.where(ordinals <= m1, BLUE, RED)
        else:
            colours = np.full(m * n, PLAIN)
        return cls(
            n=n,
            m1=m1,
            m2=m2,
            model=model,
            seed=seed,
            stems=np.repeat(np.arange(1, n + 1), m),
            ordinals=ordinals,
            targets=np.asarray(targets, dtype=np.int64).reshape(-1),
            colours=colours,
            coloured=coloured,
        )


@dataclass(frozen=True, eq=False)
class SimpleView:
    """Loop-free, deduplicated, symmetric adjacency in CSR layout.

    Labels run over [n]. `present` marks the vertices that belong to the
    graph (None means all of [n]); absent labels carry no edges and are
    skipped by every algorithm. Row v of the CSR arrays is vertex v, row 0
    is always empty.
    """
    n: int
    indptr: np.ndarray
    indices: np.ndarray
    present: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "indptr", _frozen(self.indptr, np.int64))
        object.__setattr__(self, "indices", _frozen(self.indices, np.int64))
        if self.present is not None:
            mask = _frozen(self.present, bool)
            if len(mask) != self.n + 1:
                raise ValueError("present mask must have length n + 1")
            object.__setattr__(self, "present", mask)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Tuple[int, int]],
        present: Optional[np.ndarray] = None,
    ) -> "SimpleView":
        pairs = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        pairs = pairs.reshape(-1, 2)
        if len(pairs) and (pairs.min() < 1 or pairs.max() > n):
            raise ParameterError(f"Edge endpoints must lie in [1, {n}]")
        pairs = pairs[pairs[:, 0] != pairs[:, 1]]
        lo = np.minimum(pairs[:, 0], pairs[:, 1])
        hi = np.maximum(pairs[:, 0], pairs[:, 1])
        keys = np.unique(lo * (n + 1) + hi)
        lo, hi = keys // (n + 1), keys % (n + 1)

        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        indptr = np.zeros(n + 2, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n + 1), out=indptr[1:])
        return cls(n=n, indptr=indptr, indices=cols, present=present)

    @property
    def order(self) -> int:
        """Number of vertices in the graph."""
        return self.n if self.present is None else int(self.present[1:].sum())

    def vertices(self) -> List[int]:
        if self.present is None:
            return list(range(1, self.n + 1))
        return [int(v) for v in np.flatnonzero(self.present)]

    def contains(self, v: int) -> bool:
        return 1 <= v <= self.n and (self.present is None or bool(self.present[v]))

    def neighbours(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]: self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        """Simple degrees indexed by label (entry 0 unused)."""
        return np.diff(self.indptr)

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbours(u)
        i = np.searchsorted(row, v)
        return bool(i < len(row) and row[i] == v)

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    def edge_array(self) -> np.ndarray:
        """Undirected edges as rows (u, v) with u < v."""
        rows = np.repeat(np.arange(self.n + 1), np.diff(self.indptr))
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    @cached_property
    def adjacency(self) -> Tuple[Tuple[int, ...], ...]:
        """Per-vertex sorted neighbour tuples, index 0 empty."""
        return tuple(tuple(int(w) for w in self.neighbours(v)) for v in range(self.n + 1))

    @cached_property
    def adjacency_sets(self) -> Tuple[frozenset, ...]:
        return tuple(frozenset(row) for row in self.adjacency)

    def to_csr(self) -> csr_matrix:
        """Adjacency matrix over labels 1..n (row/column i is vertex i+1)."""
        data = np.ones(len(self.indices), dtype=np.int8)
        return csr_matrix((data, self.indices - 1, self.indptr[1:] - self.indptr[1]), shape=(self.n, self.n))

    def induced(self, keep: np.ndarray) -> "SimpleView":
        """Subgraph induced by the labels where `keep` (length n + 1) is true."""
        keep = np.asarray(keep, dtype=bool).copy()
        keep[0] = False
        if self.present is not None:
            keep &= self.present
        edges = self.edge_array()
        edges = edges[keep[edges[:, 0]] & keep[edges[:, 1]]]
        return SimpleView.from_edges(self.n, edges, present=keep)

    def without(self, removed: Iterable[int]) -> "SimpleView":
        keep = np.ones(self.n + 1, dtype=bool)
        keep[list(removed)] = False
        return self.induced(keep)


def simple_view(g) -> SimpleView:
    """Drop loops and multiplicities; a SimpleView is returned unchanged."""
    if isinstance(g, SimpleView):
        return g
    return SimpleView.from_edges(g.n, np.column_stack([g.stems, g.targets]))


def degree_at_time(g: AttachGraph, s: int, t: int) -> int:
    """Multigraph degree of s counting records with stem <= t (loops count 2)."""
    if not 1 <= s <= t <= g.n:
        raise ParameterError(f"Need 1 <= s <= t <= n, got s={s}, t={t}, n={g.n}")
    prefix = g.m * t
    return int(np.count_nonzero(g.stems[:prefix] == s) + np.count_nonzero(g.targets[:prefix] == s))


def degrees(g: AttachGraph, t: Optional[int] = None) -> np.ndarray:
    """Multigraph degrees of every vertex at time t (default n), indexed by label."""
    t = g.n if t is None else t
    if not 0 <= t <= g.n:
        raise ParameterError(f"Time {t} outside [0, {g.n}]")
    prefix = g.m * t
    counts = np.bincount(g.stems[:prefix], minlength=g.n + 1)
    counts += np.bincount(g.targets[:prefix], minlength=g.n + 1)
    return counts


def neighbourhood(view: SimpleView, C: Iterable[int]) -> Set[int]:
    """N(C): vertices outside C adjacent to some vertex of C."""
    members = {int(v) for v in C}
    if not members:
        return set()
    pooled = np.concatenate([view.neighbours(v) for v in members])
    return {int(w) for w in np.unique(pooled)} - members


def component_labels(view: SimpleView) -> np.ndarray:
    """Component id per label (index 0 and absent vertices get -1)."""
    labels = np.full(view.n + 1, -1, dtype=np.int64)
    if view.n == 0:
        return labels
    _, raw = connected_components(view.to_csr(), directed=False)
    labels[1:] = raw
    if view.present is not None:
        labels[~view.present] = -1
    return labels


def components(view: SimpleView) -> List[np.ndarray]:
    """Vertex labels of each connected component, ordered by smallest member."""
    labels = component_labels(view)
    members = np.flatnonzero(labels >= 0)
    if len(members) == 0:
        return []
    ids = labels[members]
    order = np.argsort(ids, kind="stable")
    members, ids = members[order], ids[order]
    splits = np.flatnonzero(np.diff(ids)) + 1
    groups = np.split(members, splits)
    return sorted(groups, key=lambda group: int(group[0]))


def component_sizes(view: SimpleView) -> np.ndarray:
    labels = component_labels(view)
    present = labels[labels >= 0]
    if len(present) == 0:
        return np.zeros(0, dtype=np.int64)
    sizes = np.bincount(present)
    return sizes[sizes > 0]


def component_count(view: SimpleView) -> int:
    return len(component_sizes(view))


def is_connected(view: SimpleView) -> bool:
    return view.order <= 1 or component_count(view) == 1


def require_model(g: AttachGraph, model: str, m: Optional[int] = None) -> None:
    if g.model != model:
        raise ModelMismatchError(f"Expected a {model} graph, got {g.model}")
    if m is not None and g.m != m:
        raise ModelMismatchError(f"Expected m={m}, got m={g.m}")
