"""
Random attachment processes
Uniform attachment, preferential attachment (via the G1 endpoint-slot
process) and the two-round blue/red colouring. This module is the only
source of randomness for graphs.

Seeds: every trial seed is derived with splitmix64 chained over the
master seed and the trial keys, so trial i of a cell always sees the same
independent stream no matter which worker runs it.
"""

import hashlib
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np
from numba import njit

from graphs.core import BLUE, PLAIN, PREFERENTIAL, RED, UNIFORM, AttachGraph, MODELS
from graphs.errors import ModelMismatchError, ParameterError

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class GenParams:
    n: int
    m1: int
    m2: int = 0
    model: str = PREFERENTIAL
    seed: int = 0
    coloured: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"n must be at least 1, got {self.n}")
        if self.m1 < 0 or self.m2 < 0:
            raise ParameterError(f"Colour split must be non-negative, got ({self.m1}, {self.m2})")
        if self.model not in MODELS:
            raise ParameterError(f"Unknown model: {self.model}")
        if not 0 <= self.seed <= MASK64:
            raise ParameterError(f"Seed must fit in 64 bits, got {self.seed}")
        if not self.coloured and self.m2:
            raise ParameterError("Red edges need a coloured graph")

    @property
    def m(self) -> int:
        return self.m1 + self.m2

    @classmethod
    def plain(cls, n: int, m: int, model: str = PREFERENTIAL, seed: int = 0) -> "GenParams":
        """Single-colour parameters (every record plain)."""
        return cls(n=n, m1=m, m2=0, model=model, seed=seed, coloured=False)

    def with_seed(self, seed: int) -> "GenParams":
        return GenParams(self.n, self.m1, self.m2, self.model, seed, self.coloured)


def _splitmix64(state: int) -> int:
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def key_to_int(key: Union[int, str]) -> int:
    if isinstance(key, str):
        return int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:8], "little")
    return int(key) & MASK64


def derive_seed(master: int, *keys: Union[int, str]) -> int:
    """mix(master, k1, k2, ...): splitmix64 applied after xoring in each key."""
    state = _splitmix64(int(master) & MASK64)
    for key in keys:
        state = _splitmix64(state ^ key_to_int(key))
    return state


def _colour_codes(p: GenParams, ordinals: np.ndarray) -> np.ndarray:
    if not p.coloured:
        return np.full(len(ordinals), PLAIN, dtype=np.uint8)
    return np.where(ordinals <= p.m1, BLUE, RED).astype(np.uint8)


def _assemble(p: GenParams, targets: np.ndarray) -> AttachGraph:
    m, n = p.m, p.n
    ordinals = np.tile(np.arange(1, m + 1, dtype=np.int64), n)
    return AttachGraph(
        n=n,
        m1=p.m1,
        m2=p.m2,
        model=p.model,
        seed=p.seed,
        stems=np.repeat(np.arange(1, n + 1, dtype=np.int64), m),
        ordinals=ordinals,
        targets=targets,
        colours=_colour_codes(p, ordinals),
        coloured=p.coloured,
    )


def gen_uniform(p: GenParams) -> AttachGraph:
    """Vertex 1 gets m loops; every later v picks m uniform targets in [v-1]."""
    if p.model != UNIFORM:
        raise ModelMismatchError(f"gen_uniform needs the uniform model, got {p.model}")
    m, n = p.m, p.n
    rng = np.random.default_rng(p.seed)
    targets = np.ones(m * n, dtype=np.int64)
    if m and n > 1:
        highs = np.repeat(np.arange(2, n + 1, dtype=np.int64), m)
        targets[m:] = rng.integers(1, highs)
    return _assemble(p, targets)


@njit(cache=True)
def _attach_slots(draws):
    """Run G1 for len(draws) steps; draws[t-1] is uniform in [0, 2t-2].

    Slot 2t-2 holds the new vertex's own half-edge, so drawing it is a loop.
    """
    steps = draws.shape[0]
    slots = np.empty(2 * steps, dtype=np.int64)
    targets = np.empty(steps, dtype=np.int64)
    for t in range(1, steps + 1):
        r = draws[t - 1]
        slots[2 * t - 2] = t
        if r == 2 * t - 2:
            target = t
        else:
            target = slots[r]
        slots[2 * t - 1] = target
        targets[t - 1] = target
    return targets


def gen_preferential(p: GenParams) -> AttachGraph:
    """Run G1 for m*n steps and collapse consecutive blocks of m vertices."""
    if p.model != PREFERENTIAL:
        raise ModelMismatchError(f"gen_preferential needs the preferential model, got {p.model}")
    m, n = p.m, p.n
    if m == 0:
        return _assemble(p, np.zeros(0, dtype=np.int64))

    rng = np.random.default_rng(p.seed)
    steps = m * n
    highs = 2 * np.arange(1, steps + 1, dtype=np.int64) - 1
    draws = rng.integers(0, highs)
    g1_targets = _attach_slots(draws)
    return _assemble(p, (g1_targets - 1) // m + 1)


def generate(p: GenParams) -> AttachGraph:
    if p.model == UNIFORM:
        return gen_uniform(p)
    return gen_preferential(p)


def project(g: AttachGraph, sigma: int) -> AttachGraph:
    """pi_sigma: keep the blue (1) or red (2) records as a single-colour graph.

    Kept records are renumbered 1..m_sigma and recoloured blue, so the
    projection validates as an m_sigma-per-vertex graph with split (m_sigma, 0).
    """
    if sigma not in (1, 2):
        raise ParameterError(f"sigma must be 1 or 2, got {sigma}")

    if not g.coloured:
        if sigma == 1:
            return g
        keep = np.zeros(len(g), dtype=bool)
        m_sigma = 0
    else:
        keep = g.colours == (BLUE if sigma == 1 else RED)
        m_sigma = g.m1 if sigma == 1 else g.m2

    logger.debug("Projecting %s graph n=%d onto colour %d", g.model, g.n, sigma)
    return AttachGraph(
        n=g.n,
        m1=m_sigma,
        m2=0,
        model=g.model,
        seed=g.seed,
        stems=g.stems[keep],
        ordinals=np.tile(np.arange(1, m_sigma + 1, dtype=np.int64), g.n),
        targets=g.targets[keep],
        colours=np.full(int(keep.sum()), BLUE, dtype=np.uint8),
        coloured=True,
    )
