"""
Whole-distribution checks for preferential attachment
Component counts of the one-edge tree process and the degree power law.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from graphs.core import AttachGraph, component_sizes, degrees, simple_view
from graphs.generate import GenParams, derive_seed, generate

logger = logging.getLogger(__name__)

CCDF_RANGE = (5, 100)
SLOPE_BAND = (-2.3, -1.7)
MIN_FIT_POINTS = 5
MIN_R_SQUARED = 0.9


def expected_component_count(n: int) -> float:
    """sum_{t=1}^{n} 1/(2t-1): vertex t opens a new component by choosing its own loop."""
    t = np.arange(1, n + 1, dtype=np.float64)
    return math.fsum(1.0 / (2 * t - 1))


@dataclass
class ComponentReport:
    n: int
    trials: int
    counts: np.ndarray
    odd_counts: np.ndarray

    @property
    def mean(self) -> float:
        return float(self.counts.mean())

    @property
    def std(self) -> float:
        return float(self.counts.std(ddof=1)) if self.trials > 1 else 0.0

    @property
    def reference(self) -> float:
        """(1/2) log n."""
        return 0.5 * math.log(self.n)

    @property
    def exact(self) -> float:
        return expected_component_count(self.n)

    @property
    def standard_error(self) -> float:
        return self.std / math.sqrt(self.trials)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "mean": self.mean,
            "std": self.std,
            "reference": self.reference,
            "exact": self.exact,
            "odd_mean": float(self.odd_counts.mean()),
        }


def component_count_check(n: int, trials: int, seed: int = 0) -> ComponentReport:
    counts = np.zeros(trials, dtype=np.int64)
    odd = np.zeros(trials, dtype=np.int64)
    for i in range(trials):
        g = generate(GenParams.plain(n, 1, seed=derive_seed(seed, "components", n, i)))
        sizes = component_sizes(simple_view(g))
        counts[i] = len(sizes)
        odd[i] = int(np.count_nonzero(sizes % 2))
    report = ComponentReport(n=n, trials=trials, counts=counts, odd_counts=odd)
    logger.info("G1 components at n=%d: mean %.3f, exact %.3f", n, report.mean, report.exact)
    return report


@dataclass
class PowerLawFit:
    slope: float
    intercept: float
    r_squared: float
    points: int
    max_degree: int
    samples: int

    @property
    def fit_ok(self) -> bool:
        return self.points >= MIN_FIT_POINTS and self.r_squared >= MIN_R_SQUARED

    @property
    def in_band(self) -> bool:
        return not math.isnan(self.slope) and SLOPE_BAND[0] <= self.slope <= SLOPE_BAND[1]

    @property
    def ok(self) -> bool:
        return self.fit_ok and self.in_band


def ccdf_slope(samples: Sequence[int], k_range: Tuple[int, int] = CCDF_RANGE) -> PowerLawFit:
    """Least-squares slope of log P(D >= k) against log k over k_range."""
    values = np.asarray(samples, dtype=np.int64)
    total = len(values)
    histogram = np.bincount(values, minlength=k_range[1] + 1)
    tail = np.cumsum(histogram[::-1])[::-1] / total
    ks = np.arange(k_range[0], k_range[1] + 1)
    ccdf = tail[ks]
    keep = ccdf > 0
    ks, ccdf = ks[keep], ccdf[keep]
    distinct = len(np.unique(ccdf))
    max_degree = int(values.max()) if total else 0
    if distinct < 2:
        return PowerLawFit(float("nan"), float("nan"), 0.0, distinct, max_degree, total)

    x, y = np.log(ks), np.log(ccdf)
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    spread = float(((y - y.mean()) ** 2).sum())
    r_squared = 1.0 - float((residual ** 2).sum()) / spread if spread > 0 else 0.0
    return PowerLawFit(float(slope), float(intercept), r_squared, distinct, max_degree, total)


def graph_ccdf_slope(g: AttachGraph) -> PowerLawFit:
    return ccdf_slope(degrees(g)[1:])


def degree_powerlaw_check(n: int, m: int, trials: int, seed: int = 0) -> PowerLawFit:
    """Pool multigraph degrees over seeded trials and fit the ccdf tail."""
    pooled = [
        degrees(generate(GenParams.plain(n, m, seed=derive_seed(seed, "powerlaw", n, m, i))))[1:]
        for i in range(trials)
    ]
    fit = ccdf_slope(np.concatenate(pooled))
    if fit.max_degree > 2 * m * n:
        logger.warning("Degree %d above 2mn for n=%d, m=%d", fit.max_degree, n, m)
    if not fit.ok:
        logger.warning("Power-law fit rejected: slope %.3f, R^2 %.3f over %d points",
                       fit.slope, fit.r_squared, fit.points)
    return fit
