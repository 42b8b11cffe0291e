"""
Main pipeline orchestrator
Command-line entry point: generate instances, preprocess hierarchies,
answer query batches, verify against the Dijkstra oracle and benchmark.

Exit codes: 0 ok, 1 verification failure, 2 usage / parse / validation error.
"""

import argparse
import logging
import sys
import time
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

import config
from bench import Bench
from generator import generate_graph, generate_queries, grid_spec, random_spec
from loader import (ParseError, read_graph, read_hierarchy, read_queries, write_graph,
                    write_hierarchy, write_queries, write_results)
from preprocess import (AVERAGE_WEIGHT, DEPARTURE_SAMPLES, ContractionConfig,
                        OrderingStrategy, build_hierarchy, order_nodes)
from query import ModeMismatchError, run_query
from tdgraph import MODE_APPROX, MODE_EXACT
from ttf import TimeInterval
from utils import print_banner, print_step
from validators import ValidationError
from verifier import Verifier

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

STRATEGIES = {"average": AVERAGE_WEIGHT, "samples": DEPARTURE_SAMPLES}


def _strategy(args) -> OrderingStrategy:
    return OrderingStrategy(kind=STRATEGIES[args.strategy], samples=args.samples)


# =============================================================================
# SUBCOMMANDS
# =============================================================================

def cmd_gen(args) -> int:
    print_step(1, "INSTANCE GENERATION")
    points = dict(points_min=args.points[0], points_max=args.points[1])
    if args.grid:
        spec = grid_spec(args.grid[0], args.grid[1], seed=args.seed, **points)
        name = f"grid_{args.grid[0]}x{args.grid[1]}_s{args.seed}"
    else:
        spec = random_spec(args.random, args.degree, seed=args.seed, **points)
        name = f"random_{args.random}_s{args.seed}"
    graph = generate_graph(spec)
    out = Path(args.out) if args.out else config.GRAPH_DIR / f"{name}.tdg"
    write_graph(graph, out)
    print(f"  {graph!r}")
    print(f"  Saved: -> {out}")

    if args.queries:
        queries = generate_queries(graph.node_count, args.queries, seed=args.seed,
                                   period=graph.period)
        qpath = out.with_suffix(".queries") if args.out else config.QUERY_DIR / f"{name}.queries"
        write_queries(queries, qpath)
        print(f"  Saved: {len(queries):,} queries -> {qpath}")
    return EXIT_OK


def cmd_preprocess(args) -> int:
    print_step(1, "LOAD GRAPH")
    graph = read_graph(args.graph)
    print(f"  {graph!r}")

    print_step(2, "NODE ORDERING")
    start = time.perf_counter()
    order = order_nodes(graph, _strategy(args))
    print(f"  {args.strategy} strategy: {time.perf_counter() - start:.2f}s")

    print_step(3, "CONTRACTION")
    start = time.perf_counter()
    cfg = ContractionConfig(mode=args.mode, epsilon=args.epsilon)
    h = build_hierarchy(graph, order, cfg)
    stats = h.stats()
    print(f"  {args.mode} contraction: {time.perf_counter() - start:.2f}s")
    print(f"  shortcuts: {stats['shortcuts']:,}, points: {stats['shortcut_points']:,} "
          f"({stats['mean_points_per_shortcut']:.2f} per shortcut)")

    stem = Path(args.graph).stem
    out = Path(args.out) if args.out else config.HIERARCHY_DIR / f"{stem}.{args.mode}.tch"
    write_hierarchy(h, out)
    print(f"  Saved: -> {out}")
    return EXIT_OK


def cmd_query(args) -> int:
    h = read_hierarchy(args.hierarchy)
    queries = read_queries(args.queries, h.node_count)
    window = TimeInterval(*args.window) if args.window else None
    results = [run_query(h, args.algo, q.source, q.target, q.departure,
                         pruning=args.pruning, window=window) for q in queries]
    out = (Path(args.out) if args.out
           else config.QUERY_DIR / f"{Path(args.queries).stem}.{args.algo}.results")
    write_results(results, out)
    print(f"  {len(results):,} queries ({args.algo}) -> {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    graph = read_graph(args.graph)
    h = read_hierarchy(args.hierarchy)
    queries = generate_queries(graph.node_count, args.queries, seed=args.seed, period=graph.period)
    verifier = Verifier(graph, h, queries, profile_queries=args.profiles)
    passed = verifier.run_all()
    out = (Path(args.out) if args.out
           else config.REPORT_DIR / f"verify_{Path(args.hierarchy).stem}_s{args.seed}.csv")
    verifier.save_report(out)
    return EXIT_OK if passed else EXIT_VERIFY_FAILED


def cmd_bench(args) -> int:
    graph = read_graph(args.graph)
    h = read_hierarchy(args.hierarchy)
    queries = generate_queries(graph.node_count, args.queries, seed=args.seed, period=graph.period)
    bench = Bench(graph, h, queries, pruning=args.pruning, strategy=_strategy(args))
    bench.run_all(with_preprocessing=not args.no_preprocess)
    bench.save(Path(args.out_dir) if args.out_dir else config.REPORT_DIR,
               prefix=f"bench_{Path(args.hierarchy).stem}")
    return EXIT_OK


# =============================================================================
# ARGUMENTS
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tch", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def ordering_flags(p):
        p.add_argument("--strategy", choices=sorted(STRATEGIES), default="average")
        p.add_argument("--samples", type=int, default=config.ORDER_SAMPLES,
                       help="departure samples for --strategy samples")

    p = sub.add_parser("gen", help="generate a synthetic graph")
    model = p.add_mutually_exclusive_group(required=True)
    model.add_argument("--grid", type=int, nargs=2, metavar=("W", "H"))
    model.add_argument("--random", type=int, metavar="N")
    p.add_argument("--degree", type=float, default=config.GEN_AVG_DEGREE)
    p.add_argument("--points", type=int, nargs=2, metavar=("MIN", "MAX"),
                   default=(config.GEN_POINTS_MIN, config.GEN_POINTS_MAX))
    p.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    p.add_argument("--queries", type=int, default=0, help="also write N random queries")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("preprocess", help="build a hierarchy from a graph file")
    p.add_argument("graph")
    p.add_argument("--mode", choices=(MODE_EXACT, MODE_APPROX), default=MODE_EXACT)
    p.add_argument("--epsilon", type=float, default=0.0)
    ordering_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("query", help="answer a query file")
    p.add_argument("hierarchy")
    p.add_argument("queries")
    p.add_argument("--algo", choices=config.ALGORITHMS, default="tch")
    p.add_argument("--pruning", choices=config.PRUNING_METHODS, default=config.DEFAULT_PRUNING)
    p.add_argument("--window", type=float, nargs=2, metavar=("BEGIN", "END"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("verify", help="compare hierarchy queries with Dijkstra")
    p.add_argument("graph")
    p.add_argument("hierarchy")
    p.add_argument("--queries", type=int, default=config.VERIFY_QUERIES)
    p.add_argument("--profiles", type=int, default=config.VERIFY_PROFILE_QUERIES)
    p.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="time preprocessing and queries")
    p.add_argument("graph")
    p.add_argument("hierarchy")
    p.add_argument("--queries", type=int, default=config.BENCH_QUERIES)
    p.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    p.add_argument("--pruning", choices=config.PRUNING_METHODS, default=config.DEFAULT_PRUNING)
    ordering_flags(p)
    p.add_argument("--no-preprocess", action="store_true", help="skip timing preprocessing")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    """Run one subcommand and return its exit code"""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else config.LOG_LEVEL,
                        format=config.LOG_FORMAT)
    start_time = time.time()

    try:
        code = args.func(args)

    except (ParseError, ValidationError, ModeMismatchError, FileNotFoundError) as e:
        print(f"\nError: {e}", file=sys.stderr)
        return EXIT_USAGE

    except ValueError as e:
        print(f"\nInvalid arguments: {e}", file=sys.stderr)
        return EXIT_USAGE

    elapsed = time.time() - start_time
    if args.command != "query":
        print_banner(f"{args.command.upper()} COMPLETED ({elapsed:.1f} seconds)")
    return code


if __name__ == "__main__":
    sys.exit(main())
