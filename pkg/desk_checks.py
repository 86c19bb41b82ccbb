#!/usr/bin/env python3
"""
Desk-scale acceptance checks for attachlab
Runs the full-size statistical checks that are too slow for the unit suite:
constants and roots, the n=3 generator law, degree sums, lonely-vertex
fractions, Tutte witnesses, component counts, the power law and the
two-round matching smoke run.
"""

from dotenv import load_dotenv
load_dotenv()

import json
import sys
import time

import numpy as np
from scipy.stats import chisquare

from algorithms.matching import PERFECT, has_perfect_matching, success_rate, two_round_matching_sim
from analysis.constants import (
    PUBLISHED_ROOTS, PUBLISHED_SETS, SUCCESS_INEQUALITIES, beta_of_m, beta_upper_bound,
    check_conditions, gamma_of_m, gamma_upper_bound, success_threshold,
)
from analysis.lemmas import degree_sum_trajectory
from config.settings import configure_logging
from experiments.checks import component_count_check, degree_powerlaw_check
from graphs.core import PREFERENTIAL, component_labels, simple_view
from graphs.generate import GenParams, derive_seed, generate
from lowerbound.lonely import (
    build_H, isolated_count, lonely_reference, lonely_stats, no_pm_certificate, sweet_cherries,
)

SEED = 20240601


def check_constants():
    """Published constant sets, roots and the closing success inequalities."""
    print("📐 Checking constant sets")
    print("=" * 40)
    ok = True
    for name, cset in PUBLISHED_SETS.items():
        report = check_conditions(cset)
        failed = [c.name for c in report.conditions if not c.satisfied]
        print(f"  set {name} (m={cset.m}, l={cset.ell}): {'pass' if report.overall else 'FAIL ' + ', '.join(failed)}")
        ok &= report.overall

    for name, (kind, bound) in PUBLISHED_ROOTS.items():
        m = PUBLISHED_SETS[name].m
        root = gamma_of_m(m) if kind == "gamma" else beta_of_m(m)
        closed = gamma_upper_bound(m) if kind == "gamma" else beta_upper_bound(m)
        good = root <= bound and bound - root < 5e-4 and root < closed
        print(f"  {kind}({m}) = {root:.10f} (bound {bound}, closed form {closed:.6f}) {'✓' if good else '✗'}")
        ok &= good

    for name, (alpha, m2, halved) in SUCCESS_INEQUALITIES.items():
        rate, threshold = success_rate(alpha, m2, halved), success_threshold(name)
        print(f"  success({alpha}, {m2}, halved={halved}) = {rate:.6f} > {threshold:.6f} {'✓' if rate > threshold else '✗'}")
        ok &= rate > threshold
    return ok


def check_small_case_law(samples=10**6):
    """Chi-square of the n=3, m=1 preferential law over many seeds."""
    print(f"\n🎲 Checking the n=3 generator law over {samples} seeds")
    print("=" * 40)
    expected = np.array([[2, 2, 1], [6, 2, 2]], dtype=float) / 15
    counts = np.zeros((2, 3))
    for trial in range(samples):
        g = generate(GenParams.plain(3, 1, PREFERENTIAL, seed=derive_seed(SEED, "law", trial)))
        row = 0 if g.targets[1] == 2 else 1
        counts[row, int(g.targets[2]) - 1] += 1
    _, p_value = chisquare(counts.reshape(-1), expected.reshape(-1) * samples)
    print(f"  observed {counts.astype(int).tolist()}, p = {p_value:.4f}")
    return p_value > 1e-3


def check_degree_sums(n=10**5, trials=30, c=0.25):
    print(f"\n📈 Checking degree sums of the oldest quarter (n={n}, {trials} trials)")
    print("=" * 40)
    ratios = [
        degree_sum_trajectory(generate(GenParams.plain(n, 2, seed=derive_seed(SEED, "ysum", i))), c).final_ratio
        for i in range(trials)
    ]
    mean = float(np.mean(ratios))
    print(f"  mean Y_n/(2mn sqrt(c)) = {mean:.4f}")
    return 0.97 <= mean <= 1.03


def _sweet_cherries_are_components(g) -> bool:
    labels = component_labels(build_H(g))
    sizes = np.bincount(labels[labels >= 0])
    for triple in sweet_cherries(g).witnesses:
        ids = {int(labels[v]) for v in triple}
        if len(ids) != 1 or sizes[ids.pop()] != 3:
            return False
    return True


def check_lonely_fractions(n=10**5, trials=30, c=0.25):
    print(f"\n🧩 Checking lonely-vertex fractions (n={n}, {trials} trials)")
    print("=" * 40)
    reference = lonely_reference(c)
    totals = {key: 0.0 for key in reference}
    exact = True
    for i in range(trials):
        g = generate(GenParams.plain(n, 2, seed=derive_seed(SEED, "lonely", i)))
        stats = lonely_stats(g, c)
        for key, value in stats.fractions().items():
            totals[key] += value / trials
        exact &= isolated_count(build_H(g, c)) == stats.A_n + stats.C_n
        exact &= _sweet_cherries_are_components(g)

    ok = exact
    for key, ref in reference.items():
        close = abs(totals[key] - ref) <= 0.1 * ref
        print(f"  {key}/n = {totals[key]:.5f} (limit {ref:.5f}) {'✓' if close else '✗'}")
        ok &= close
    print(f"  isolated(H) = A_n + C_n and sweet cherries are components: {'✓' if exact else '✗'}")
    return ok


def check_tutte_witnesses(n=2 * 10**5, trials=30, small_n=2000, small_trials=30):
    print(f"\n🚫 Checking Tutte witnesses in G_2 (n={n}, {trials} trials)")
    print("=" * 40)
    found = sum(
        no_pm_certificate(generate(GenParams.plain(n, 2, seed=derive_seed(SEED, "tutte", i)))) is not None
        for i in range(trials)
    )
    disagreements = 0
    for i in range(small_trials):
        g = generate(GenParams.plain(small_n, 2, seed=derive_seed(SEED, "tutte-small", i)))
        if no_pm_certificate(g) is not None and has_perfect_matching(simple_view(g)):
            disagreements += 1
    print(f"  witness rate {found}/{trials}, disagreements at n={small_n}: {disagreements}")
    return found >= trials / 2 and disagreements == 0


def check_components(n=10**4, trials=100):
    print(f"\n🌲 Checking component counts of G_1 (n={n}, {trials} trials)")
    print("=" * 40)
    report = component_count_check(n, trials, seed=SEED)
    print(json.dumps(report.to_dict(), indent=2))
    near_log = abs(report.mean - report.reference) <= 0.15 * report.reference
    near_exact = abs(report.mean - report.exact) <= 3 * report.standard_error
    return near_log and near_exact


def check_power_law(n=10**6, m=3, trials=5):
    print(f"\n📉 Checking the degree power law (n={n}, m={m}, {trials} trials)")
    print("=" * 40)
    fit = degree_powerlaw_check(n, m, trials=trials, seed=SEED)
    print(f"  slope {fit.slope:.3f}, r^2 {fit.r_squared:.3f}, max degree {fit.max_degree}")
    return fit.ok


def check_two_round_matching(n=2000, m1=120, m2=39, trials=50):
    print(f"\n🔁 Two-round matching smoke run (n={n}, m1={m1}, m2={m2}, {trials} trials)")
    print("=" * 40)
    perfect = 0
    for i in range(trials):
        g = generate(GenParams(n, m1, m2, PREFERENTIAL, seed=derive_seed(SEED, "tworound", i)))
        perfect += two_round_matching_sim(g).status == PERFECT
    print(f"  perfect matchings: {perfect}/{trials}")
    return perfect >= 0.95 * trials


CHECKS = [
    ("Constant sets, roots and success inequalities", check_constants),
    ("Generator law at n=3", check_small_case_law),
    ("Degree-sum trajectory", check_degree_sums),
    ("Lonely-vertex fractions", check_lonely_fractions),
    ("Tutte witnesses", check_tutte_witnesses),
    ("Component counts", check_components),
    ("Degree power law", check_power_law),
    ("Two-round matching", check_two_round_matching),
]


def main():
    """Run every desk check and print a summary."""
    configure_logging()
    print("🧮 attachlab: Desk-Scale Acceptance Checks")
    print("=" * 60)

    outcomes = []
    for label, check in CHECKS:
        start = time.time()
        try:
            passed = bool(check())
        except Exception as e:
            print(f"❌ {label} failed: {e}")
            passed = False
        outcomes.append((label, passed, time.time() - start))

    print("\n" + "=" * 60)
    print("Summary:")
    for label, passed, duration in outcomes:
        print(f"{'✓' if passed else '✗'} {label} ({duration:.1f}s)")
    return 0 if all(passed for _, passed, _ in outcomes) else 1


if __name__ == "__main__":
    sys.exit(main())
