"""Command-line experiment harness.

Three subcommands:

  run           run one algorithm on one graph, append CSV rows
  oracle-check  exact-oracle invariant suite on the bundled fixtures
  bench         parameter sweeps (k / seed count / epsilon), one CSV

CSV rows are byte-identical for a fixed --rng-seed; wall-clock timings
therefore live only in the optional JSON report.  Distinct failure modes
map to distinct exit codes (see EXIT_*).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import fixtures
from .baselines import ag, gr, mc_greedy
from .diffusion import monte_carlo_spread
from .graph import (EdgeListParseError, GraphError,
                    assign_constant_probability, assign_wc_probabilities,
                    load_edge_list, unify_seeds)
from .optimize import AlgoParams
from .sandwich import lhga, sand_imin, sand_imin_minus

EXIT_OK = 0
EXIT_UNKNOWN_ALGO = 3
EXIT_BAD_K = 4
EXIT_BAD_SEEDS = 5
EXIT_BAD_GRAPH = 6
EXIT_CHECK_FAILED = 1

ALGORITHMS = ("ag", "gr", "mc", "sandimin", "sandimin-minus", "lhga")

CSV_FIELDS = ("dataset", "algo", "k", "n_seeds", "epsilon", "delta", "beta",
              "gamma", "repeat", "rng_seed", "decrease", "samples", "ratio")


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _load_graph(spec, undirected, prob, prob_value):
    if spec.startswith("fixture:"):
        name = spec.split(":", 1)[1]
        try:
            return fixtures.bundled(name).base, name
        except KeyError as exc:
            raise CliError(str(exc), EXIT_BAD_GRAPH) from None
    if not os.path.exists(spec):
        raise CliError(f"graph file not found: {spec}", EXIT_BAD_GRAPH)
    try:
        g = load_edge_list(spec, directed=not undirected)
    except EdgeListParseError as exc:
        raise CliError(str(exc), EXIT_BAD_GRAPH) from None
    if prob == "wc":
        g = assign_wc_probabilities(g)
    else:
        g = assign_constant_probability(g, prob_value)
    return g, os.path.basename(spec)


def _fixture_seeds(spec):
    return sorted(fixtures.bundled(spec.split(":", 1)[1]).seeds)


def _influence_pool(g, pool_size, pool_trials, cache_path=None):
    """Node ids ranked by estimated singleton influence (descending).

    Estimated once per graph with a fixed internal seed so the ranking is
    stable across runs, and cached next to the dataset when possible.
    """
    if cache_path is not None and os.path.exists(cache_path):
        with np.load(cache_path) as data:
            if (int(data["format_version"]) == 1
                    and int(data["pool_trials"]) == pool_trials
                    and int(data["n"]) == g.n):
                return [int(v) for v in data["ranked"][:pool_size]]
    rng = np.random.default_rng(np.random.SeedSequence(0xC0FFEE))
    scores = np.zeros(g.n, dtype=np.float64)
    for v in range(g.n):
        ug = unify_seeds(g, {v})
        scores[v] = monte_carlo_spread(ug, None, pool_trials, rng)
    ranked = np.argsort(-scores, kind="stable").astype(np.int64)
    if cache_path is not None:
        try:
            np.savez(cache_path, format_version=np.int64(1),
                     pool_trials=np.int64(pool_trials), n=np.int64(g.n),
                     ranked=ranked)
        except OSError:
            pass
    return [int(v) for v in ranked[:pool_size]]


def _resolve_seeds(args, g, dataset, rng):
    spec = args.seeds
    if spec is None:
        if args.graph.startswith("fixture:"):
            return _fixture_seeds(args.graph)
        raise CliError("--seeds is required for file datasets",
                       EXIT_BAD_SEEDS)
    if "," in spec or not spec.lstrip("-").isdigit():
        parts = [p for p in spec.split(",") if p]
        label_to_id = {int(lbl): i for i, lbl in enumerate(g.labels)}
        seeds = []
        for part in parts:
            try:
                label = int(part)
            except ValueError:
                raise CliError(f"bad seed id {part!r}",
                               EXIT_BAD_SEEDS) from None
            if label not in label_to_id:
                raise CliError(f"seed id {label} not in graph",
                               EXIT_BAD_SEEDS)
            seeds.append(label_to_id[label])
        if not seeds:
            raise CliError("empty seed list", EXIT_BAD_SEEDS)
        return sorted(set(seeds))
    count = int(spec)
    if count < 1 or count > g.n:
        raise CliError(f"seed count {count} out of range", EXIT_BAD_SEEDS)
    cache = None
    if not args.graph.startswith("fixture:"):
        cache = args.graph + ".infcache.npz"
    pool = _influence_pool(g, args.seed_rank_pool, args.pool_trials, cache)
    if count > len(pool):
        raise CliError(
            f"seed count {count} exceeds the rank pool ({len(pool)})",
            EXIT_BAD_SEEDS)
    picked = rng.choice(len(pool), size=count, replace=False)
    return sorted(int(pool[i]) for i in picked)


def _run_algo(algo, ug, args, rng):
    """Dispatch one algorithm; returns (blockers, samples, ratio, report)."""
    params = AlgoParams(k=args.k, epsilon=args.epsilon, delta=args.delta,
                        beta=args.beta, gamma=args.gamma)
    if algo == "sandimin" or algo == "sandimin-minus":
        fn = sand_imin if algo == "sandimin" else sand_imin_minus
        result = fn(ug, params, rng)
        samples = sum(cert.samples_primary
                      for cert in result.certificates.values())
        return (result.chosen, samples, result.empirical_ratio,
                result.as_dict())
    if algo == "lhga":
        blockers = lhga(ug, args.k)
        return blockers, 0, None, {"blockers": list(blockers)}
    if algo == "ag":
        blockers = ag(ug, args.k, args.realizations, rng)
    elif algo == "gr":
        blockers = gr(ug, args.k, args.realizations, rng)
    elif algo == "mc":
        blockers = mc_greedy(ug, args.k, args.trials, rng)
    else:
        raise CliError(f"unknown algorithm {algo!r}", EXIT_UNKNOWN_ALGO)
    samples = args.realizations if algo in ("ag", "gr") else args.trials
    return blockers, samples, None, {"blockers": list(blockers)}


def _evaluate_decrease(ug, blockers, trials, rng):
    base = monte_carlo_spread(ug, None, trials, rng)
    residual = monte_carlo_spread(ug, blockers, trials, rng)
    return base - residual


def _format_row(values):
    out = []
    for v in values:
        if v is None:
            out.append("")
        elif isinstance(v, float):
            out.append(f"{v:.6f}")
        else:
            out.append(str(v))
    return ",".join(out)


def _write_csv(path, rows):
    header = ",".join(CSV_FIELDS)
    exists = path is not None and os.path.exists(path)
    lines = [] if exists else [header]
    lines += [_format_row(r) for r in rows]
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(text)


def cmd_run(args):
    if args.algo not in ALGORITHMS:
        raise CliError(f"unknown algorithm {args.algo!r}; choose from "
                       f"{ALGORITHMS}", EXIT_UNKNOWN_ALGO)
    if args.k <= 0:
        raise CliError(f"k must be positive, got {args.k}", EXIT_BAD_K)
    g, dataset = _load_graph(args.graph, args.undirected, args.prob,
                             args.prob_value)
    if args.delta is None:
        args.delta = 1.0 / g.n

    root = np.random.SeedSequence(args.rng_seed)
    seed_rng = np.random.default_rng(root.spawn(1)[0])
    try:
        seeds = _resolve_seeds(args, g, dataset, seed_rng)
        ug = unify_seeds(g, seeds)
    except GraphError as exc:
        raise CliError(str(exc), EXIT_BAD_SEEDS) from None

    rows = []
    reports = []
    for rep in range(args.repeats):
        rep_seq = np.random.SeedSequence(args.rng_seed,
                                         spawn_key=(1, rep))
        algo_rng = np.random.default_rng(rep_seq.spawn(1)[0])
        eval_rng = np.random.default_rng(rep_seq.spawn(1)[0])
        t0 = time.perf_counter()
        blockers, samples, ratio, report = _run_algo(args.algo, ug, args,
                                                     algo_rng)
        elapsed = time.perf_counter() - t0
        decrease = _evaluate_decrease(ug, blockers, args.eval_trials,
                                      eval_rng)
        rows.append((dataset, args.algo, args.k, len(seeds), args.epsilon,
                     args.delta, args.beta, args.gamma, rep, args.rng_seed,
                     decrease, samples, ratio))
        report.update({"dataset": dataset, "algo": args.algo, "repeat": rep,
                       "decrease_mc": decrease, "runtime_s": elapsed,
                       "samples": samples})
        reports.append(report)

    _write_csv(args.out, rows)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(reports, fh, indent=2)
    return EXIT_OK


def cmd_bench(args):
    k_list = [int(x) for x in args.k_list.split(",")]
    eps_list = [float(x) for x in args.epsilon_list.split(",")]
    seeds_list = args.seeds_list.split(";") if args.seeds_list else [None]
    rows_written = 0
    for n_seeds in seeds_list:
        for k in k_list:
            for eps in eps_list:
                sub = argparse.Namespace(**vars(args))
                sub.k, sub.epsilon = k, eps
                sub.seeds = n_seeds if n_seeds is not None else args.seeds
                sub.repeats = args.repeats
                cmd_run(sub)
                rows_written += args.repeats
    print(f"bench: wrote {rows_written} rows to {args.out or 'stdout'}")
    return EXIT_OK


def cmd_oracle(args):
    """Ad-hoc exact values for a tiny graph and one blocker set."""
    from .oracle import ExactModel, OracleLimitError

    g, dataset = _load_graph(args.graph, args.undirected, args.prob,
                             args.prob_value)
    seed_rng = np.random.default_rng(np.random.SeedSequence(0))
    try:
        seeds = _resolve_seeds(args, g, dataset, seed_rng)
        ug = unify_seeds(g, seeds)
        blockers = []
        if args.blockers:
            label_to_id = {int(lbl): i for i, lbl in enumerate(g.labels)}
            for part in args.blockers.split(","):
                if part:
                    blockers.append(label_to_id[int(part)])
        model = ExactModel(ug)
        print(f"dataset={dataset} n={g.n} m={g.m} seeds={sorted(seeds)} "
              f"blockers={blockers}")
        print(f"spread(no blocking) = {model.spread():.6f}")
        print(f"decrease            = {model.decrease(blockers):.6f}")
        print(f"lower bound         = {model.lower_bound(blockers):.6f}")
        print(f"upper bound         = {model.upper_bound(blockers):.6f}")
    except (GraphError, KeyError) as exc:
        raise CliError(str(exc), EXIT_BAD_SEEDS) from None
    except OracleLimitError as exc:
        raise CliError(str(exc), EXIT_BAD_GRAPH) from None
    return EXIT_OK


def cmd_oracle_check(args):
    from .checks import run_invariant_suite

    results = run_invariant_suite(args.rng_seed)
    width = max(len(name) for name, _, _ in results)
    failed = 0
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        print(f"{name:<{width}}  {status}  {detail}")
        failed += 0 if ok else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


def _add_common_options(p, sweep=False):
    p.add_argument("--graph", required=True,
                   help="edge-list path or fixture:<name> "
                        f"({', '.join(sorted(fixtures.BUNDLED))})")
    p.add_argument("--undirected", action="store_true",
                   help="treat file edges as undirected (doubled)")
    p.add_argument("--prob", choices=("wc", "const"), default="wc",
                   help="edge probability rule for file graphs")
    p.add_argument("--prob-value", type=float, default=0.1)
    p.add_argument("--algo", required=True,
                   help=f"one of {', '.join(ALGORITHMS)}")
    if not sweep:
        p.add_argument("--k", type=int, required=True,
                       help="blocker budget")
        p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--seeds",
                   help="seed count (bare integer, drawn from the top "
                        "influence pool), or comma-separated node labels; "
                        "use a trailing comma for one explicit label, e.g. "
                        "'42,' (fixtures default to their built-in seeds)")
    p.add_argument("--seed-rank-pool", type=int, default=200)
    p.add_argument("--pool-trials", type=int, default=1000)
    p.add_argument("--delta", type=float, default=None,
                   help="failure probability (default 1/n)")
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--gamma", type=float, default=0.1)
    p.add_argument("--trials", type=int, default=1000,
                   help="Monte-Carlo trials per greedy evaluation (mc)")
    p.add_argument("--realizations", type=int, default=10_000,
                   help="realizations per round (ag/gr)")
    p.add_argument("--eval-trials", type=int, default=100_000,
                   help="Monte-Carlo trials for the final evaluation")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1,
                   help="accepted for compatibility; sampling streams "
                        "are deterministic regardless")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--json", help="JSON report path")


def make_parser():
    parser = argparse.ArgumentParser(
        prog="imin",
        description="Influence minimization via node blocking")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one algorithm, emit CSV")
    _add_common_options(run)
    run.set_defaults(func=cmd_run)

    oc = sub.add_parser("oracle-check",
                        help="exact-oracle invariant suite on fixtures")
    oc.add_argument("--rng-seed", type=int, default=0)
    oc.set_defaults(func=cmd_oracle_check)

    orc = sub.add_parser("oracle",
                         help="exact spread/decrease/bounds on a tiny graph")
    orc.add_argument("--graph", required=True)
    orc.add_argument("--undirected", action="store_true")
    orc.add_argument("--prob", choices=("wc", "const"), default="wc")
    orc.add_argument("--prob-value", type=float, default=0.1)
    orc.add_argument("--seeds", help="as in `run`")
    orc.add_argument("--seed-rank-pool", type=int, default=200)
    orc.add_argument("--pool-trials", type=int, default=1000)
    orc.add_argument("--blockers", default="",
                     help="comma-separated node labels to block")
    orc.set_defaults(func=cmd_oracle)

    bench = sub.add_parser("bench", help="sweep k / seeds / epsilon")
    _add_common_options(bench, sweep=True)
    bench.add_argument("--k-list", default="1",
                       help="comma-separated budgets")
    bench.add_argument("--epsilon-list", default="0.2")
    bench.add_argument("--seeds-list", default=None,
                       help="semicolon-separated --seeds specs")
    bench.set_defaults(func=cmd_bench, k=None, epsilon=None)
    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
