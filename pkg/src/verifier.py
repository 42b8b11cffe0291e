"""
Verifier Module - Oracle Comparison of Query Algorithms
=======================================================
Logic: every hierarchy query MUST give the same travel time as plain
time-dependent Dijkstra on the input graph (within VERIFY_REL_TOL).

Checks:
  1. Hierarchy base graph equals the input graph
  2. Exact hierarchy: tch, pruned (static and interval bounds) vs. oracle;
     pruned settles no more states than unpruned
  3. Approximate hierarchy: atch and condense-then-tch vs. oracle
  4. Profiles: profile_query sampled at PROFILE_SAMPLES departures vs. oracle
"""

from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

import config
from loader import Query, format_graph
from preprocess import condense
from query import (INTERVAL, STATIC_MIN, QueryResult, dijkstra_query, profile_query,
                   pruned_tch_query, run_query, tch_query)
from tdgraph import Hierarchy, TDGraph
from ttf import eval_many
from utils import print_banner, relative_error, safe_to_csv

REPORT_COLUMNS = ["check", "source", "target", "departure", "expected", "actual",
                  "rel_error", "settled", "passed"]


class Verifier:
    """Compare hierarchy queries against the Dijkstra oracle."""

    def __init__(self, graph: TDGraph, hierarchy: Hierarchy, queries: Sequence[Query],
                 profile_queries: int = config.VERIFY_PROFILE_QUERIES,
                 profile_samples: int = config.PROFILE_SAMPLES,
                 tolerance: float = config.VERIFY_REL_TOL):
        self.graph = graph
        self.hierarchy = hierarchy
        self.queries = list(queries)
        self.profile_queries = profile_queries
        self.profile_samples = profile_samples
        self.tolerance = tolerance
        self.results: Dict[str, bool] = {}
        self.rows: List[dict] = []
        self._oracle: Dict[Query, float] = {}
        self._condensed: Optional[Hierarchy] = None

    # =========================================================================
    # HELPERS
    # =========================================================================

    def oracle(self, q: Query) -> float:
        if q not in self._oracle:
            self._oracle[q] = dijkstra_query(self.graph, q.source, q.target, q.departure).travel_time
        return self._oracle[q]

    def _record(self, check: str, q: Query, expected: float, actual: float,
                settled: int = 0, extra_ok: bool = True) -> bool:
        err = relative_error(actual, expected)
        passed = bool(err <= self.tolerance and extra_ok)
        self.rows.append({"check": check, "source": q.source, "target": q.target,
                          "departure": q.departure, "expected": expected, "actual": actual,
                          "rel_error": err, "settled": settled, "passed": passed})
        return passed

    def _path_ok(self, result: QueryResult) -> bool:
        if result.path is None:
            return not result.found or result.source == result.target
        return result.path.is_consistent(self.graph, self.tolerance)

    def _summarize(self, check: str) -> bool:
        rows = [r for r in self.rows if r["check"] == check]
        failures = sum(not r["passed"] for r in rows)
        finite = [r["rel_error"] for r in rows if np.isfinite(r["rel_error"])]
        max_err = max(finite) if finite else 0.0
        print(f"  {check}: {len(rows)} queries, {failures} failures, max rel. error {max_err:.3g}")
        passed = failures == 0
        self.results[check] = passed
        return passed

    # =========================================================================
    # CHECK 1: Input consistency
    # =========================================================================

    def verify_base_graph(self) -> bool:
        print("\n[Verifier] Hierarchy base graph vs. input graph")
        print("-" * 50)
        passed = format_graph(self.hierarchy.base) == format_graph(self.graph)
        print(f"  base graph identical: {'PASS' if passed else 'FAIL'}")
        self.results["base_graph"] = passed
        return passed

    # =========================================================================
    # CHECK 2: Exact hierarchy
    # =========================================================================

    def verify_tch(self) -> bool:
        print("\n[Verifier] TCH queries vs. oracle")
        print("-" * 50)
        h = self.hierarchy
        for q in self.queries:
            expected = self.oracle(q)
            plain = tch_query(h, q.source, q.target, q.departure)
            self._record("tch", q, expected, plain.travel_time, plain.settled, self._path_ok(plain))
            for method, check in ((STATIC_MIN, "pruned_static"), (INTERVAL, "pruned_interval")):
                pruned = pruned_tch_query(h, q.source, q.target, q.departure, method=method)
                same = pruned.arrival == plain.arrival or relative_error(
                    pruned.travel_time, plain.travel_time) <= self.tolerance
                self._record(check, q, expected, pruned.travel_time, pruned.settled,
                             same and pruned.settled <= plain.settled and self._path_ok(pruned))
        passed = True
        for check in ("tch", "pruned_static", "pruned_interval"):
            passed = self._summarize(check) and passed
        return passed

    # =========================================================================
    # CHECK 3: Approximate hierarchy
    # =========================================================================

    def condensed(self) -> Hierarchy:
        if self._condensed is None:
            self._condensed = condense(self.hierarchy)
        return self._condensed

    def verify_atch(self) -> bool:
        print("\n[Verifier] ATCH queries vs. oracle")
        print("-" * 50)
        condensed = self.condensed()
        for q in self.queries:
            expected = self.oracle(q)
            result = run_query(self.hierarchy, "atch", q.source, q.target, q.departure)
            self._record("atch", q, expected, result.travel_time, result.settled,
                         self._path_ok(result))
            result = tch_query(condensed, q.source, q.target, q.departure)
            self._record("condensed_tch", q, expected, result.travel_time, result.settled,
                         self._path_ok(result))
        return self._summarize("atch") & self._summarize("condensed_tch")

    # =========================================================================
    # CHECK 4: Profiles
    # =========================================================================

    def verify_profiles(self) -> bool:
        print("\n[Verifier] Profile queries vs. oracle")
        print("-" * 50)
        h = self.hierarchy if self.hierarchy.is_exact else self.condensed()
        taus = np.linspace(0.0, self.graph.period, self.profile_samples, endpoint=False)
        for q in self.queries[:self.profile_queries]:
            profile = profile_query(h, q.source, q.target)
            sampled = eval_many(profile, taus) if profile is not None else np.full(taus.size, np.inf)
            for tau, value in zip(taus.tolist(), sampled.tolist()):
                at = Query(q.source, q.target, tau)
                self._record("profile", at, self.oracle(at), value)
        return self._summarize("profile")

    # =========================================================================
    # MAIN RUNNER
    # =========================================================================

    def report(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=REPORT_COLUMNS)

    def save_report(self, path: Path) -> Path:
        safe_to_csv(self.report(), path)
        print(f"  Saved: {len(self.rows):,} rows -> {Path(path).name}")
        return path

    def run_all(self) -> bool:
        """
        Run all verifications.

        Returns:
            True if all checks pass, False otherwise
        """
        print_banner("ORACLE VERIFICATION")
        print(f"  {len(self.queries):,} queries, hierarchy {self.hierarchy!r}")

        self.verify_base_graph()
        if self.hierarchy.is_exact:
            self.verify_tch()
        else:
            self.verify_atch()
        if self.profile_queries > 0:
            self.verify_profiles()

        print_banner("VERIFICATION SUMMARY")
        all_pass = True
        for name, passed in self.results.items():
            print(f"  {name}: {'PASS' if passed else 'FAIL'}")
            all_pass = all_pass and passed
        print(f"\n  OVERALL: {'ALL CHECKS PASSED' if all_pass else 'SOME CHECKS FAILED'}")
        print("=" * 60)
        return all_pass
