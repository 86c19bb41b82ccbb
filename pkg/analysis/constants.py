"""
Numeric utilities for the expansion and long-path lemmas
phi, c_{a,b}, the beta/gamma root solvers, the constant-set condition
checker and the published constant sets.
"""

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np
from scipy.optimize import bisect

from graphs.errors import ParameterError

logger = logging.getLogger(__name__)

ROOT_EDGE = 1e-9
ROOT_XTOL = 1e-15
ROOT_SCAN_POINTS = 4096


def phi(x: float) -> float:
    """phi(x) = (1+x)log(1+x) - x, with phi(-1) = 1."""
    if x < -1:
        raise ParameterError(f"phi is defined for x >= -1, got {x}")
    if x == -1:
        return 1.0
    return (1.0 + x) * math.log1p(x) - x


def _log_factors(a: int, b: int) -> np.ndarray:
    i = np.arange(a + 1, b + 1, dtype=np.float64)
    return np.log1p(-0.5 / i)


def c_product(a: int, b: int) -> float:
    """c_{a,b} = prod_{i=a+1}^{b} (2i-1)/(2i), accumulated in log space."""
    if a < 0 or a > b:
        raise ParameterError(f"c_product needs 0 <= a <= b, got a={a}, b={b}")
    if a == b:
        return 1.0
    return math.exp(math.fsum(_log_factors(a, b)))


def c_square_sum(a: int, b: int) -> float:
    """sum_{i=a+1}^{b} c_{a,i}^2."""
    if a < 0 or a > b:
        raise ParameterError(f"c_square_sum needs 0 <= a <= b, got a={a}, b={b}")
    if a == b:
        return 0.0
    logs = np.cumsum(_log_factors(a, b))
    return math.fsum(np.exp(2.0 * logs))


def c_square_sum_ratio(a: int, b: int) -> float:
    """c_square_sum(a, b) / (a log(b/a)); tends to 1 as a grows."""
    if a < 1 or b <= a:
        raise ParameterError(f"Need 1 <= a < b, got a={a}, b={b}")
    return c_square_sum(a, b) / (a * math.log(b / a))


def beta_equation(beta: float, m: float) -> float:
    return 2 * beta * math.log(beta) + (1 - 2 * beta) * math.log(1 - 2 * beta) + beta * beta * m / 4


def gamma_equation(gamma: float, m: float) -> float:
    return gamma * math.log(gamma) + (1 - gamma) * math.log(1 - gamma) + gamma * gamma * m / 2


def _largest_root(f: Callable[[float], float], lo: float, hi: float, label: str) -> float:
    grid = np.concatenate([np.geomspace(lo, hi / 2, ROOT_SCAN_POINTS // 2),
                           np.linspace(hi / 2, hi, ROOT_SCAN_POINTS // 2)[1:]])
    values = np.array([f(point) for point in grid])
    changes = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)
    if len(changes) == 0:
        raise ParameterError(f"No sign change for {label} on [{lo}, {hi}]")
    if len(changes) > 1:
        logger.warning("%s has %d sign changes; returning the largest root", label, len(changes))
    k = changes[-1]
    return bisect(f, grid[k], grid[k + 1], xtol=ROOT_XTOL, maxiter=500)


def beta_of_m(m: int) -> float:
    """Root in (0, 1/2) of 2b log b + (1-2b) log(1-2b) + b^2 m/4 = 0 (m >= 12)."""
    if m < 12:
        raise ParameterError(f"beta(m) is defined for m >= 12, got {m}")
    return _largest_root(lambda b: beta_equation(b, m), ROOT_EDGE, 0.5 - ROOT_EDGE, f"beta({m})")


def gamma_of_m(m: int) -> float:
    """Root in (0, 1) of g log g + (1-g) log(1-g) + g^2 m/2 = 0 (m >= 1)."""
    if m < 1:
        raise ParameterError(f"gamma(m) is defined for m >= 1, got {m}")
    return _largest_root(lambda g: gamma_equation(g, m), ROOT_EDGE, 1 - ROOT_EDGE, f"gamma({m})")


def beta_upper_bound(m: int) -> float:
    return math.sqrt(4 * math.log(3) / m)


def gamma_upper_bound(m: int) -> float:
    return math.sqrt(2 * math.log(2) / m)


def f_tm(t: float, m: float, x: float) -> float:
    """f_{t,m}(x) = 2m sqrt(xt) + sqrt(8mxt) log(e(1 + t/x))."""
    return 2 * m * math.sqrt(x * t) + math.sqrt(8 * m * x * t) * (1 + math.log1p(t / x))


def f_tm_monotone_check(t: float, m: float, A: float, xs: Sequence[float]) -> List[tuple]:
    """Pairs x <= y from xs where (1 + A/x) f(x) > (1 + A^5/y) f(y)."""
    points = sorted(float(x) for x in xs if x >= 1)
    shifted = A ** 5
    failures = []
    for i, x in enumerate(points):
        left = (1 + A / x) * f_tm(t, m, x)
        for y in points[i:]:
            right = (1 + shifted / y) * f_tm(t, m, y)
            if left > right:
                failures.append((x, y, left, right))
    return failures


@dataclass(frozen=True)
class ConstantSet:
    m: int
    ell: int
    alpha: float
    x: float
    y: float
    z: float
    d: float
    primed: bool = False
    rounding: float = 0.0
    name: Optional[str] = None

    def __post_init__(self):
        if self.m < 1:
            raise ParameterError(f"m must be at least 1, got {self.m}")
        if self.ell not in (1, 2):
            raise ParameterError(f"ell must be 1 or 2, got {self.ell}")
        for label in ("alpha", "x", "y", "z", "d"):
            value = getattr(self, label)
            if not 0 < value < 1:
                raise ParameterError(f"{label} must lie in (0, 1), got {value}")
        if not self.y < self.z:
            raise ParameterError(f"Need y < z, got y={self.y}, z={self.z}")
        if self.rounding < 0:
            raise ParameterError("rounding must be non-negative")

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "ConstantSet":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Constant set file not found: {path}")
        with open(path, "r") as f:
            payload = json.load(f)
        if "l" in payload and "ell" not in payload:
            payload["ell"] = payload.pop("l")
        return cls(**payload)


@dataclass(frozen=True)
class Condition:
    name: str
    lhs: float
    rhs: float
    satisfied: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


@dataclass
class ConditionReport:
    constants: ConstantSet
    conditions: List[Condition] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(c.satisfied for c in self.conditions)

    def by_name(self) -> Dict[str, Condition]:
        return {c.name: c for c in self.conditions}

    def to_dict(self) -> Dict:
        return {
            "constants": asdict(self.constants),
            "overall": self.overall,
            "conditions": [
                {**asdict(c), "margin": c.margin} for c in self.conditions
            ],
        }


def w_bound(m: int, ell: int, alpha: float, d: float) -> float:
    return math.sqrt(8 / m) * (1 + math.log1p(1 / ((ell + 1) * alpha ** d)))


def check_conditions(c: ConstantSet) -> ConditionReport:
    """Evaluate every inequality of the expansion lemma for a constant set.

    Upper bounds on alpha count as met when alpha - c.rounding is below them;
    published sets carry the half-width of their printed precision.
    """
    m, ell, alpha, x, y, z, d = c.m, c.ell, c.alpha, c.x, c.y, c.z, c.d
    report = ConditionReport(constants=c)

    def strict(name: str, lhs: float, rhs: float) -> None:
        report.conditions.append(Condition(name, lhs, rhs, bool(lhs < rhs)))

    def alpha_bound(name: str, rhs: float) -> None:
        ok = not math.isnan(rhs) and alpha - c.rounding < rhs
        report.conditions.append(Condition(name, alpha, rhs, bool(ok)))

    strict("zrange:lower", y, z)
    strict("zrange:upper", z, 1 - (ell + 1) / (d * m))

    exponent = (1 - d) * phi(-x) * m - d
    strict("dphim", 0.0, exponent)

    alpha_bound("alphabound1", (0.99 * y / math.e) ** (1 / exponent) if exponent > 0 else math.nan)
    alpha_bound("alphabound2", math.exp(-(ell + 1 - z) / ((1 - x) * (1 - d) * (z - y))))

    ell_log_ell = ell * math.log(ell)
    spread = d * (1 - z) * m - ell - 1
    if c.primed:
        w = w_bound(m, ell, alpha, d)
        alpha_bound("alphabound3'", 1 / (ell + 1) - (8 / 3) / (d * (1 - z) * m))
        log_term = math.log((2 + w) ** 2 * (ell + 1))
        rhs4 = math.exp(-((1 - z) * m * log_term + ell + 1 - ell_log_ell) / spread) if spread > 0 else math.nan
        alpha_bound("alphabound4'", rhs4)
    else:
        alpha_bound("alphabound3", 1 / (ell + 1) - 1 / (d * (1 - z) * m))
        log_term = math.log(ell + 1)
        rhs4 = math.exp(-((1 - z) * m * log_term + ell + 1 - ell_log_ell) / spread) if spread > 0 else math.nan
        alpha_bound("alphabound4", rhs4)

    if not report.overall:
        failed = [cond.name for cond in report.conditions if not cond.satisfied]
        logger.info("Constant set %s fails %s", c.name or "(custom)", ", ".join(failed))
    return report


PRINTED_PRECISION = 5e-7

PUBLISHED_SETS: Dict[str, ConstantSet] = {
    "a": ConstantSet(m=120, ell=1, alpha=0.0538, x=0.22791, y=0.020063, z=0.851649, d=0.387967,
                     primed=False, rounding=PRINTED_PRECISION, name="a"),
    "b": ConstantSet(m=2900, ell=2, alpha=0.032003, x=0.048929, y=0.003625, z=0.965269, d=0.353628,
                     primed=False, rounding=PRINTED_PRECISION, name="b"),
    "c": ConstantSet(m=500, ell=1, alpha=0.016801, x=0.149159, y=0.008856, z=0.905885, d=0.649188,
                     primed=True, rounding=PRINTED_PRECISION, name="c"),
    "d": ConstantSet(m=14000, ell=2, alpha=0.008874, x=0.026228, y=0.001272, z=0.980855, d=0.551906,
                     primed=True, rounding=PRINTED_PRECISION, name="d"),
}

# Published bounds on the long-path / large-matching roots for each set.
PUBLISHED_ROOTS = {
    "a": ("gamma", 0.06238),
    "b": ("beta", 0.014414),
    "c": ("gamma", 0.019675),
    "d": ("beta", 0.003760),
}

# (alpha, m2, halved) closing each main result, paired with the set that fixes m1.
SUCCESS_INEQUALITIES = {
    "a": (0.0538, 39, False),
    "b": (0.032003, 314, False),
    "c": (0.016801, 260, True),
    "d": (0.008874, 1500, True),
}


def success_threshold(name: str) -> float:
    """gamma(m1)/2 for the matching results, 2 beta(m1) for the cycle results."""
    kind, _ = PUBLISHED_ROOTS[name]
    m = PUBLISHED_SETS[name].m
    return gamma_of_m(m) / 2 if kind == "gamma" else 2 * beta_of_m(m)
