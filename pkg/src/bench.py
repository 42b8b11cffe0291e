"""
Benchmark Module - Query and Preprocessing Timings
==================================================
Runs every applicable algorithm over one query set and produces:
  1. bench_queries.csv / .parquet -> one row per (algorithm, query)
  2. bench_summary.csv            -> per-algorithm mean/median time, settled
                                     states, speedup over Dijkstra
  3. preprocessing figures        -> time, shortcut count, points per shortcut
"""

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd

import config
from loader import Query
from preprocess import ContractionConfig, OrderingStrategy, build_hierarchy, order_nodes
from query import run_query
from tdgraph import Hierarchy, TDGraph
from utils import print_banner, safe_to_csv, safe_to_parquet

ORACLE = "dijkstra"


@dataclass
class BenchReport:
    per_query: pd.DataFrame
    summary: pd.DataFrame
    preprocessing: Dict[str, float] = field(default_factory=dict)

    def speedup(self, algo: str) -> float:
        row = self.summary[self.summary["algorithm"] == algo]
        return float(row["speedup"].iloc[0]) if len(row) else float("nan")


class Bench:
    """Time queries (and optionally preprocessing) on one instance."""

    def __init__(self, graph: TDGraph, hierarchy: Hierarchy, queries: Sequence[Query],
                 pruning: str = config.DEFAULT_PRUNING,
                 strategy: Optional[OrderingStrategy] = None):
        self.graph = graph
        self.hierarchy = hierarchy
        self.queries = list(queries)
        if not self.queries:
            raise ValueError("Benchmark needs at least one query")
        self.pruning = pruning
        self.strategy = strategy
        self.preprocessing: Dict[str, float] = {}
        self.per_query: Optional[pd.DataFrame] = None
        self.summary: Optional[pd.DataFrame] = None

    def algorithms(self) -> List[str]:
        if self.hierarchy.is_exact:
            return [ORACLE, "tch", "pruned"]
        return [ORACLE, "atch"]

    def time_preprocessing(self) -> Dict[str, float]:
        """Re-run ordering and contraction with the hierarchy's mode and epsilon."""
        print("\n[Bench] Timing preprocessing")
        cfg = ContractionConfig(mode=self.hierarchy.mode, epsilon=self.hierarchy.epsilon)
        start = time.perf_counter()
        order = order_nodes(self.graph, self.strategy)
        ordered = time.perf_counter()
        h = build_hierarchy(self.graph, order, cfg)
        done = time.perf_counter()
        self.preprocessing = {"ordering_seconds": ordered - start,
                              "contraction_seconds": done - ordered,
                              "preprocessing_seconds": done - start}
        print(f"  ordering: {ordered - start:.2f}s, contraction: {done - ordered:.2f}s")
        return self.preprocessing

    def time_queries(self) -> pd.DataFrame:
        rows = []
        for algo in self.algorithms():
            print(f"\n[Bench] {algo}: {len(self.queries):,} queries")
            for q in self.queries:
                start = time.perf_counter()
                result = run_query(self.hierarchy, algo, q.source, q.target, q.departure,
                                   pruning=self.pruning)
                elapsed = time.perf_counter() - start
                rows.append({"algorithm": algo, "source": q.source, "target": q.target,
                             "departure": q.departure, "travel_time": result.travel_time,
                             "settled": result.settled, "relaxed": result.relaxed,
                             "seconds": elapsed})
        self.per_query = pd.DataFrame(rows)
        return self.per_query

    def summarize(self) -> pd.DataFrame:
        agg = self.per_query.groupby("algorithm", as_index=False, sort=False).agg(
            queries=("seconds", "count"),
            mean_ms=("seconds", "mean"),
            median_ms=("seconds", "median"),
            mean_settled=("settled", "mean"),
            median_settled=("settled", "median"),
            mean_relaxed=("relaxed", "mean"),
        )
        agg[["mean_ms", "median_ms"]] = agg[["mean_ms", "median_ms"]] * 1000.0
        oracle_ms = agg.loc[agg["algorithm"] == ORACLE, "mean_ms"]
        oracle_ms = float(oracle_ms.iloc[0]) if len(oracle_ms) else float("nan")
        agg["speedup"] = oracle_ms / agg["mean_ms"]
        agg["settled_ratio"] = agg["mean_settled"] / float(
            agg.loc[agg["algorithm"] == ORACLE, "mean_settled"].iloc[0])

        stats = self.hierarchy.stats()
        agg["shortcuts"] = stats["shortcuts"]
        agg["shortcut_points"] = stats["shortcut_points"]
        agg["mean_points_per_shortcut"] = stats["mean_points_per_shortcut"]
        for key, value in self.preprocessing.items():
            agg[key] = value

        self.summary = agg
        return agg

    def save(self, out_dir: Path = config.REPORT_DIR, prefix: str = "bench") -> List[Path]:
        out_dir = Path(out_dir)
        paths = [out_dir / f"{prefix}_queries.csv", out_dir / f"{prefix}_queries.parquet",
                 out_dir / f"{prefix}_summary.csv"]
        safe_to_csv(self.per_query, paths[0])
        safe_to_parquet(self.per_query, paths[1])
        safe_to_csv(self.summary.round(6), paths[2])
        for p in paths:
            print(f"  Saved: -> {p.name}")
        return paths

    def run_all(self, with_preprocessing: bool = True) -> BenchReport:
        """Execute the complete benchmark."""
        print_banner("BENCHMARK")
        print(f"  {len(self.queries):,} queries, hierarchy {self.hierarchy!r}")

        if with_preprocessing:
            self.time_preprocessing()
        self.time_queries()
        self.summarize()

        print_banner("BENCHMARK SUMMARY")
        with pd.option_context("display.width", 120, "display.max_columns", 20):
            print(self.summary[["algorithm", "mean_ms", "median_ms", "mean_settled",
                                "speedup"]].round(3).to_string(index=False))
        return BenchReport(self.per_query, self.summary, dict(self.preprocessing))
