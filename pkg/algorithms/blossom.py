"""Edmonds' blossom search on adjacency lists.

Graphs are given as `adj[v]` (iterable of neighbour labels, index 0 unused)
and an `active` mask; inactive vertices are treated as deleted. `mate[v]`
is the partner of v or -1.

Two searches share the contraction machinery:
  * find_augmenting_path: single-root BFS, returns the exposed endpoint
    of an augmenting path (the path is read off `parent`/`mate`).
  * even_vertices: one forest grown from every exposed vertex at once.
    For a maximum matching the even (outer) vertices are exactly the
    vertices missed by some maximum matching.
"""

from collections import deque
from typing import Iterable, List, Optional, Sequence, Set


class NotMaximumError(RuntimeError):
    """An augmenting path exists where the caller promised a maximum matching."""


def greedy_matching(adj: Sequence[Iterable[int]], active: Sequence[bool]) -> List[int]:
    mate = [-1] * len(adj)
    for v in range(1, len(adj)):
        if not active[v] or mate[v] != -1:
            continue
        for w in adj[v]:
            if active[w] and mate[w] == -1 and w != v:
                mate[v], mate[w] = w, v
                break
    return mate


def _lca(a: int, b: int, base: List[int], mate: List[int], parent: List[int]) -> int:
    """Lowest common blossom base of a and b, or -1 if they sit in different trees."""
    seen = set()
    while True:
        a = base[a]
        seen.add(a)
        if mate[a] == -1:
            break
        a = parent[mate[a]]
    while True:
        b = base[b]
        if b in seen:
            return b
        if mate[b] == -1:
            return -1
        b = parent[mate[b]]


def _mark_path(v: int, stop: int, child: int, base, mate, parent, blossom: Set[int]) -> None:
    while base[v] != stop:
        blossom.add(base[v])
        blossom.add(base[mate[v]])
        parent[v] = child
        child = mate[v]
        v = parent[mate[v]]


class _Forest:
    """Labelling state for one search."""

    def __init__(self, size: int, roots: Iterable[int]):
        self.parent = [-1] * size
        self.base = list(range(size))
        self.even = [False] * size
        self.members: List[int] = []
        self.queue = deque()
        for r in roots:
            self.even[r] = True
            self.members.append(r)
            self.queue.append(r)

    def contract(self, v: int, to: int, mate: List[int]) -> bool:
        """Shrink the blossom closed by edge v-to; False if it links two trees."""
        top = _lca(v, to, self.base, mate, self.parent)
        if top == -1:
            return False
        blossom: Set[int] = set()
        _mark_path(v, top, to, self.base, mate, self.parent, blossom)
        _mark_path(to, top, v, self.base, mate, self.parent, blossom)
        for i in self.members:
            if self.base[i] in blossom:
                self.base[i] = top
                if not self.even[i]:
                    self.even[i] = True
                    self.queue.append(i)
        return True


def find_augmenting_path(root: int, adj, mate: List[int], active: Sequence[bool]) -> Optional[List[int]]:
    """Augmenting path from the exposed `root`, listed from its far end, or None."""
    forest = _Forest(len(adj), [root])
    parent, base, even = forest.parent, forest.base, forest.even

    while forest.queue:
        v = forest.queue.popleft()
        for to in adj[v]:
            if not active[to] or base[v] == base[to] or mate[v] == to:
                continue
            if to == root or (mate[to] != -1 and parent[mate[to]] != -1):
                forest.contract(v, to, mate)
            elif parent[to] == -1:
                parent[to] = v
                forest.members.append(to)
                if mate[to] == -1:
                    path = []
                    w = to
                    while w != -1:
                        path.append(w)
                        path.append(parent[w])
                        w = mate[parent[w]]
                    return path
                nxt = mate[to]
                even[nxt] = True
                forest.members.append(nxt)
                forest.queue.append(nxt)
    return None


def apply_path(path: List[int], mate: List[int]) -> None:
    """Flip an augmenting path produced by find_augmenting_path."""
    for i in range(0, len(path), 2):
        a, b = path[i], path[i + 1]
        mate[a], mate[b] = b, a


def augment_from(root: int, adj, mate: List[int], active: Sequence[bool]) -> bool:
    path = find_augmenting_path(root, adj, mate, active)
    if path is None:
        return False
    apply_path(path, mate)
    return True


def maximum_matching(adj, active: Sequence[bool], mate: Optional[List[int]] = None) -> List[int]:
    """Maximum matching, optionally warm-started from an existing matching."""
    mate = greedy_matching(adj, active) if mate is None else list(mate)
    for v in range(1, len(adj)):
        if active[v] and mate[v] == -1:
            augment_from(v, adj, mate, active)
    return mate


def even_vertices(adj, mate: List[int], active: Sequence[bool]) -> Set[int]:
    """Outer vertices of the alternating forest rooted at all exposed vertices.

    Raises NotMaximumError when two trees touch (the matching is not maximum).
    """
    roots = [v for v in range(1, len(adj)) if active[v] and mate[v] == -1]
    forest = _Forest(len(adj), roots)
    parent, base, even = forest.parent, forest.base, forest.even

    while forest.queue:
        v = forest.queue.popleft()
        for to in adj[v]:
            if not active[to] or base[v] == base[to] or mate[v] == to:
                continue
            if mate[to] == -1 or parent[mate[to]] != -1:
                if not forest.contract(v, to, mate):
                    raise NotMaximumError(f"Augmenting path between trees through {v}-{to}")
            elif parent[to] == -1:
                parent[to] = v
                forest.members.append(to)
                nxt = mate[to]
                even[nxt] = True
                forest.members.append(nxt)
                forest.queue.append(nxt)

    return {v for v in forest.members if even[v]}
