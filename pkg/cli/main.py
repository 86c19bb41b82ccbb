#!/usr/bin/env python3
"""
Command-line interface for attachlab
Graph generation, matching and cycle searches, constant verification,
lemma checks, the lower-bound table and the experiment harness.
"""

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from algorithms.hamilton import HamCycle, exact_hamiltonian, longest_path_greedy, posa_search
from algorithms.matching import certify, max_matching
from analysis.constants import (
    PUBLISHED_SETS,
    ConstantSet,
    beta_of_m,
    beta_upper_bound,
    check_conditions,
    gamma_of_m,
    gamma_upper_bound,
)
from analysis.lemmas import (
    degree_sum_trajectory,
    edge_absence_freq,
    expansion_check,
    good_vertices_check,
    oldest_degree_bound_check,
)
from config.settings import (
    DEFAULT_A,
    DEFAULT_CUTOFF,
    DEFAULT_POSA_BUDGET,
    HELD_KARP_LIMIT,
    configure_logging,
    default_omega,
)
from experiments.runner import ExperimentConfig, run_experiment
from experiments.store import ExperimentStore
from graphs.core import is_connected, simple_view
from graphs.edgelist import TAG_MODELS, read_edgelist, write_edgelist
from graphs.generate import GenParams, derive_seed, generate
from lowerbound.lonely import (
    build_H,
    isolated_count,
    lonely_common_neighbours,
    lonely_reference,
    lonely_stats,
    no_pm_certificate,
    sweet_cherries,
)

EXIT_OK = 0
EXIT_ERROR = 2


def _emit(payload: Dict) -> None:
    print(json.dumps(payload, indent=2, default=_jsonable))


def _jsonable(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    raise TypeError(f"Cannot serialise {type(value).__name__}")


def _add_generator_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", choices=sorted(TAG_MODELS), default="pa")
    parser.add_argument("--n", type=int)
    parser.add_argument("--m", type=int)
    parser.add_argument("--m1", type=int)
    parser.add_argument("--m2", type=int, default=0)
    parser.add_argument("--seed", type=int, default=0)


def _params(args) -> GenParams:
    if args.n is None:
        raise ValueError("--n is required when generating a graph")
    model = TAG_MODELS[args.model]
    if args.m1 is not None:
        return GenParams(args.n, args.m1, args.m2, model, args.seed)
    if args.m is None:
        raise ValueError("Give --m or --m1/--m2")
    return GenParams.plain(args.n, args.m, model, args.seed)


def _graph(args):
    if getattr(args, "input", None):
        return read_edgelist(args.input)
    return generate(_params(args))


def cmd_gen(args) -> int:
    g = generate(_params(args))
    path = write_edgelist(g, args.out)
    print(f"✓ Wrote {g.model} graph n={g.n} m1={g.m1} m2={g.m2} to {path}", file=sys.stderr)
    return EXIT_OK


def cmd_match(args) -> int:
    view = simple_view(_graph(args))
    payload = {"n": view.order}
    if args.certify:
        matching, witness = certify(view)
        payload["certificate"] = (
            {"kind": "tutte", "separator": sorted(witness.separator),
             "odd_components": witness.odd_components, "deficiency": witness.deficiency}
            if witness is not None else
            {"kind": "matching", "pairs": sorted(matching.pairs)}
        )
    else:
        matching = max_matching(view)
    payload.update({"nu": matching.size, "perfect": matching.size == view.order // 2})
    _emit(payload)
    return EXIT_OK


def cmd_ham(args) -> int:
    view = simple_view(_graph(args))
    payload: Dict = {"n": view.order, "connected": is_connected(view)}
    if not payload["connected"]:
        greedy = longest_path_greedy(view, seed=args.seed)
        payload.update({"hamiltonian": False, "longest_path_len": len(greedy.path)})
        _emit(payload)
        return EXIT_OK

    found = posa_search(view, budget=args.budget, seed=args.seed)
    if isinstance(found, HamCycle):
        payload.update({"hamiltonian": True, "cycle": list(found.sequence), "longest_path_len": view.order})
    else:
        payload.update({"hamiltonian": False, "longest_path_len": len(found)})
        if view.order <= HELD_KARP_LIMIT:
            payload["exact_hamiltonian"] = exact_hamiltonian(view)
    _emit(payload)
    return EXIT_OK


def _constant_set(name: str) -> ConstantSet:
    if name in PUBLISHED_SETS:
        return PUBLISHED_SETS[name]
    return ConstantSet.from_json(name)


def cmd_verify_constants(args) -> int:
    constants = _constant_set(args.set)
    report = check_conditions(constants).to_dict()
    m = constants.m
    report["roots"] = {
        "gamma": gamma_of_m(m),
        "gamma_upper_bound": gamma_upper_bound(m),
        "beta": beta_of_m(m) if m >= 12 else None,
        "beta_upper_bound": beta_upper_bound(m),
    }
    _emit(report)
    return EXIT_OK if report["overall"] else 1


def cmd_verify_lemma(args) -> int:
    if args.name == "edge_absence":
        W = [int(w) for w in args.W.split(",") if w] if args.W else []
        report = edge_absence_freq(_params(args), args.v, W, args.trials, sigma=args.sigma)
        _emit(asdict(report))
        return EXIT_OK

    g = _graph(args)
    if args.name == "total_weight":
        omega = args.omega or default_omega(g.n)
        report = oldest_degree_bound_check(g, args.A, omega, random_sets=args.random_budget, seed=args.seed)
        _emit({"holds": report.holds, "checked": report.checked,
               "violations": report.violations, "ratio_stats": report.ratio_stats})
    elif args.name == "expansion":
        violator = expansion_check(simple_view(g), args.alpha, args.ell, args.k_max, args.random_budget, args.seed)
        _emit({"holds": violator is None, "violator": None if violator is None else sorted(violator)})
    elif args.name == "goodold":
        count = good_vertices_check(g, args.x, args.d, args.k)
        _emit({"count": count, "allowed": args.y * args.k, "holds": count <= args.y * args.k})
    elif args.name == "degree_sum":
        trajectory = degree_sum_trajectory(g, args.c)
        _emit({"final_ratio": trajectory.final_ratio, "monotone": trajectory.monotone,
               "start": int(trajectory.values[0]), "end": int(trajectory.values[-1])})
    return EXIT_OK


def cmd_lowerbound(args) -> int:
    rows: List[Dict] = []
    for trial in range(args.trials):
        g = generate(GenParams.plain(args.n, 2, seed=derive_seed(args.seed, "lowerbound", args.n, trial)))
        stats = lonely_stats(g, args.c)
        witness = no_pm_certificate(g, args.c)
        rows.append({
            **stats.fractions(),
            "certificate": witness is not None,
            "isolated_exact": isolated_count(build_H(g, args.c)) == stats.A_n + stats.C_n,
            "sweet_cherries": sweet_cherries(g).count,
            "common_neighbours": len(lonely_common_neighbours(g)),
        })
        print(f"📊 trial {trial + 1}/{args.trials} done", file=sys.stderr)

    keys = ("A_n", "B_n", "C_n", "D_n")
    _emit({
        "n": args.n,
        "c": args.c,
        "trials": args.trials,
        "mean_fractions": {key: float(np.mean([row[key] for row in rows])) for key in keys},
        "reference": lonely_reference(args.c),
        "certificate_rate": sum(row["certificate"] for row in rows) / args.trials,
        "isolated_exact": all(row["isolated_exact"] for row in rows),
        "mean_sweet_cherries": float(np.mean([row["sweet_cherries"] for row in rows])),
        "no_hamilton_rate": sum(row["common_neighbours"] > 0 for row in rows) / args.trials,
    })
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.from_json(args.config)
    table = run_experiment(cfg, out_dir=args.out, workers=args.workers)
    print(f"✓ Experiment {cfg.name}: {len(table)} cells", file=sys.stderr)
    print(table.to_string(index=False))
    return EXIT_OK


def cmd_report(args) -> int:
    if not Path(args.input).exists():
        raise FileNotFoundError(f"No experiment directory at {args.input}")
    store = ExperimentStore(args.input)
    if args.format == "csv":
        path = store.export_csv()
    else:
        path = store.export_markdown("results.md")
    print(Path(path).read_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="attachlab", description="Attachment graph experiments")
    parser.add_argument("--log-level", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a graph and write its edge list")
    _add_generator_options(gen)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen)

    match = sub.add_parser("match", help="maximum matching and certificate")
    match.add_argument("--in", dest="input")
    _add_generator_options(match)
    match.add_argument("--certify", action="store_true")
    match.set_defaults(func=cmd_match)

    ham = sub.add_parser("ham", help="rotation-extension Hamiltonian cycle search")
    ham.add_argument("--in", dest="input")
    _add_generator_options(ham)
    ham.add_argument("--budget", type=int, default=DEFAULT_POSA_BUDGET)
    ham.set_defaults(func=cmd_ham)

    verify = sub.add_parser("verify", help="constant sets and lemma checks")
    verify_sub = verify.add_subparsers(dest="target", required=True)
    constants = verify_sub.add_parser("constants")
    constants.add_argument("--set", required=True, help="a, b, c, d or a JSON file")
    constants.set_defaults(func=cmd_verify_constants)

    lemma = verify_sub.add_parser("lemma")
    lemma.add_argument("--name", required=True,
                       choices=["total_weight", "expansion", "goodold", "edge_absence", "degree_sum"])
    lemma.add_argument("--in", dest="input")
    _add_generator_options(lemma)
    lemma.add_argument("--A", type=float, default=DEFAULT_A)
    lemma.add_argument("--omega", type=int, default=None)
    lemma.add_argument("--random-budget", type=int, default=0)
    lemma.add_argument("--alpha", type=float, default=0.0538)
    lemma.add_argument("--ell", type=int, default=1)
    lemma.add_argument("--k-max", type=int, default=4)
    lemma.add_argument("--x", type=float, default=0.22791)
    lemma.add_argument("--y", type=float, default=0.020063)
    lemma.add_argument("--d", type=float, default=0.387967)
    lemma.add_argument("--k", type=int, default=50)
    lemma.add_argument("--c", type=float, default=DEFAULT_CUTOFF)
    lemma.add_argument("--v", type=int, default=2)
    lemma.add_argument("--W", default="")
    lemma.add_argument("--sigma", type=int, default=1)
    lemma.add_argument("--trials", type=int, default=1000)
    lemma.set_defaults(func=cmd_verify_lemma)

    lower = sub.add_parser("lowerbound", help="lonely-vertex statistics for two-edge attachment")
    lower.add_argument("--n", type=int, required=True)
    lower.add_argument("--trials", type=int, default=10)
    lower.add_argument("--c", type=float, default=DEFAULT_CUTOFF)
    lower.add_argument("--seed", type=int, default=0)
    lower.set_defaults(func=cmd_lowerbound)

    experiment = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    experiment.add_argument("--config", required=True)
    experiment.add_argument("--out", default=None)
    experiment.add_argument("--workers", type=int, default=None)
    experiment.set_defaults(func=cmd_experiment)

    report = sub.add_parser("report", help="render a stored experiment")
    report.add_argument("--in", dest="input", required=True)
    report.add_argument("--format", choices=["csv", "md"], default="md")
    report.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
