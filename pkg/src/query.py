"""
Query Module - Earliest-Arrival and Profile Queries on a Hierarchy
==================================================================
  - tch_query:        forward search from s in up-edges plus edges marked by
                      a backward reachability exploration from t
  - pruned_tch_query: same search, pruned with per-node lower bounds to t
                      and an upper bound U from an evaluated static path
  - atch_query:       exact query over an approximate hierarchy: bound-based
                      corridor, unpacking, exact search in the unpacked graph
  - profile_query:    full travel-time profile s -> t
  - dijkstra_query:   plain time-dependent Dijkstra on the input graph (oracle)

The forward search space is layered. Up-layer states are reached through
up-edges only; a marked edge leads into the down layer, where only marked
edges are relaxed. Every up-then-down path is present, and in the down layer
the rest of any path is a down path, which is what the lower bounds bound.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Union

import config
from search import (WEIGHT_LOWER, WEIGHT_UPPER, interval_dijkstra, profile_dijkstra,
                    static_dijkstra, td_dijkstra)
from tdgraph import (MODE_APPROX, MODE_EXACT, Arc, Hierarchy, PathResult, TDGraph,
                     expand_edge, unpack_all)
from ttf import TTF, TimeInterval, evaluate

logger = logging.getLogger(__name__)

INF = math.inf

REACHABILITY_ONLY = "reachability_only"
STATIC_MIN = "static_min"
INTERVAL = "interval"

# CLI pruning flag -> backward marking method
PRUNING_METHODS = {"none": REACHABILITY_ONLY, "static": STATIC_MIN, "interval": INTERVAL}


class ModeMismatchError(ValueError):
    """Algorithm and hierarchy mode do not fit together."""


# =============================================================================
# RESULT TYPES
# =============================================================================

@dataclass
class BackwardSpace:
    target: int
    method: str
    reached: Set[int] = field(default_factory=set)
    marked: Set[int] = field(default_factory=set)        # hierarchy edge ids
    lower: Dict[int, float] = field(default_factory=dict)

    def ell(self, v: int) -> float:
        """Lower bound on the down-path travel time v -> target (0 if unknown)."""
        return self.lower.get(v, 0.0)


@dataclass
class QueryResult:
    source: int
    target: int
    departure: float
    arrival: float
    path: Optional[PathResult] = None
    settled: int = 0
    relaxed: int = 0
    marked: int = 0

    @property
    def found(self) -> bool:
        return math.isfinite(self.arrival)

    @property
    def travel_time(self) -> float:
        return self.arrival - self.departure

    @classmethod
    def no_path(cls, s: int, t: int, tau0: float, **stats) -> "QueryResult":
        return cls(s, t, tau0, INF, None, **stats)

    @classmethod
    def trivial(cls, s: int, tau0: float) -> "QueryResult":
        return cls(s, s, tau0, tau0, PathResult((), (), tau0, tau0))


# =============================================================================
# BACKWARD MARKING
# =============================================================================

def backward_mark(h: Hierarchy, t: int, method: str = REACHABILITY_ONLY,
                  window: Optional[TimeInterval] = None) -> BackwardSpace:
    """Explore every node that reaches t in the downward graph and mark the edges.

    static_min adds l(v) from a static search on minimum weights; interval
    needs the arrival window at t and tightens l(v) with interval_dijkstra.
    """
    if not 0 <= t < h.node_count:
        raise ValueError(f"Target {t} out of range [0, {h.node_count})")
    space = BackwardSpace(t, method)
    space.reached.add(t)
    stack = [t]
    while stack:
        x = stack.pop()
        for arc in h.down_in[x]:
            space.marked.add(arc.ref)
            if arc.head not in space.reached:
                space.reached.add(arc.head)
                stack.append(arc.head)

    if method == REACHABILITY_ONLY:
        return space
    view = h.reverse_down_view()
    if method == STATIC_MIN:
        space.lower = static_dijkstra(view, t, "min").distance
    elif method == INTERVAL:
        if window is None:
            raise ValueError("interval marking needs an arrival window")
        upper = static_dijkstra(view, t, "max").distance
        space.lower = interval_dijkstra(view, t, window, upper=upper, backward=True).lower
    else:
        raise ValueError(f"Unknown marking method: {method}")
    return space


class _QueryView:
    """Layered forward search space (V, E_up + E_marked); see module docstring."""

    def __init__(self, h: Hierarchy, space: BackwardSpace):
        self.n = h.node_count
        self.node_count = 2 * self.n
        self.target_state = space.target + self.n
        self._h = h
        self._marked = space.marked
        self._cache: Dict[int, List[Arc]] = {}

    def arcs(self, state: int) -> List[Arc]:
        cached = self._cache.get(state)
        if cached is not None:
            return cached
        n, t = self.n, self.target_state - self.n
        arcs = []
        if state < n:
            for a in self._h.up_arcs[state]:
                head = a.head + n if a.head == t else a.head
                arcs.append(Arc(head, a.lower, a.upper, a.ref))
        u = state % n
        for a in self._h.down_arcs[u]:
            if a.ref in self._marked:
                arcs.append(Arc(a.head + n, a.lower, a.upper, a.ref))
        self._cache[state] = arcs
        return arcs


# =============================================================================
# PATHS
# =============================================================================

def unpack_path(h: Hierarchy, refs: Sequence[int], tau0: float) -> PathResult:
    """Original-edge path with departure times for a walk of hierarchy edges."""
    edges: List[int] = []
    departures: List[float] = []
    t = tau0
    previous = None
    for ref in refs:
        e = h.edges[ref]
        if previous is not None and e.tail != previous:
            raise ValueError(f"Hierarchy edges do not form a walk at edge {ref}")
        parts, t = expand_edge(h, ref, t)
        for orig, dep in parts:
            edges.append(orig)
            departures.append(dep)
        previous = e.head
    return PathResult(tuple(edges), tuple(departures), tau0, t)


def _graph_path(graph: TDGraph, refs: Sequence[int], tau0: float) -> PathResult:
    departures = []
    t = tau0
    for ref in refs:
        departures.append(t)
        t = t + evaluate(graph.edges[ref].ttf, t)
    return PathResult(tuple(refs), tuple(departures), tau0, t)


def _require_mode(h: Hierarchy, mode: str, algo: str) -> None:
    if h.mode != mode:
        raise ModeMismatchError(f"{algo} needs a {mode} hierarchy, got {h.mode}")


def _check_endpoints(node_count: int, s: int, t: int) -> None:
    for name, v in (("Source", s), ("Target", t)):
        if not 0 <= v < node_count:
            raise ValueError(f"{name} {v} out of range [0, {node_count})")


# =============================================================================
# QUERIES
# =============================================================================

def dijkstra_query(graph: TDGraph, s: int, t: int, tau0: float) -> QueryResult:
    """Time-dependent Dijkstra on the input graph; the reference answer."""
    _check_endpoints(graph.node_count, s, t)
    labels = td_dijkstra(graph.forward_view(), s, tau0, target=t)
    stats = dict(settled=len(labels.settled), relaxed=labels.relaxed)
    if not labels.is_settled(t):
        return QueryResult.no_path(s, t, tau0, **stats)
    path = _graph_path(graph, labels.path_to(t), tau0)
    return QueryResult(s, t, tau0, path.arrival, path, **stats)


def _finish(h: Hierarchy, labels, view: _QueryView, s: int, t: int, tau0: float,
            space: BackwardSpace, extra_settled: int = 0) -> QueryResult:
    stats = dict(settled=len(labels.settled) + extra_settled, relaxed=labels.relaxed,
                 marked=len(space.marked))
    if not labels.is_settled(view.target_state):
        return QueryResult.no_path(s, t, tau0, **stats)
    path = unpack_path(h, labels.path_to(view.target_state), tau0)
    return QueryResult(s, t, tau0, path.arrival, path, **stats)


def tch_query(h: Hierarchy, s: int, t: int, tau0: float) -> QueryResult:
    """Earliest arrival at t departing s at tau0 (exact hierarchy)."""
    _require_mode(h, MODE_EXACT, "tch_query")
    _check_endpoints(h.node_count, s, t)
    if s == t:
        return QueryResult.trivial(s, tau0)
    space = backward_mark(h, t, REACHABILITY_ONLY)
    view = _QueryView(h, space)
    labels = td_dijkstra(view, s, tau0, target=view.target_state)
    return _finish(h, labels, view, s, t, tau0, space)


def pruned_tch_query(h: Hierarchy, s: int, t: int, tau0: float,
                     method: str = STATIC_MIN,
                     window: Optional[TimeInterval] = None) -> QueryResult:
    """tch_query pruned by d(s,v) + l(v) > U.

    U is the time-dependent evaluation of the unpacked statically optimal
    (minimum-weight) path. With method=interval, l(v) comes from an interval
    search over the arrival window [tau0 + L, tau0 + U] unless window is given.
    """
    _require_mode(h, MODE_EXACT, "pruned_tch_query")
    _check_endpoints(h.node_count, s, t)
    if s == t:
        return QueryResult.trivial(s, tau0)
    if method not in (STATIC_MIN, INTERVAL):
        raise ValueError(f"Pruning needs static_min or interval bounds, got {method}")

    space = backward_mark(h, t, STATIC_MIN)
    view = _QueryView(h, space)
    target = view.target_state
    static = static_dijkstra(view, s, "min", target=target)
    if target not in static.distance:
        return QueryResult.no_path(s, t, tau0, marked=len(space.marked))
    upper_path = unpack_path(h, static.path_to(target), tau0)
    bound = upper_path.travel_time

    limit = bound + config.PRUNE_TOLERANCE * max(1.0, bound)
    if method == INTERVAL:
        if window is None:
            # L and U meet when the bounds are tight; keep the window non-empty
            earliest = tau0 + min(static.dist(target), bound)
            window = TimeInterval(earliest, tau0 + limit)
        space = backward_mark(h, t, INTERVAL, window=window)

    n = h.node_count
    ell = space.lower

    def prune(state: int, arrival: float) -> bool:
        d = arrival - tau0
        if state >= n:
            return d + ell.get(state - n, 0.0) > limit
        return d > limit

    labels = td_dijkstra(view, s, tau0, target=target, prune=prune)
    return _finish(h, labels, view, s, t, tau0, space)


def atch_query(h: Hierarchy, s: int, t: int, tau0: float) -> QueryResult:
    """Exact earliest arrival over an approximate hierarchy.

    1. corridor: upper-bound search gives U; lower-bound search (pruned at
       U) keeps every edge whose lower arrival at its head plus l(head)
       stays within U
    2. the surviving edges are unpacked to original edges
    3. exact time-dependent Dijkstra from s on that subgraph
    """
    _require_mode(h, MODE_APPROX, "atch_query")
    _check_endpoints(h.node_count, s, t)
    if s == t:
        return QueryResult.trivial(s, tau0)

    space = backward_mark(h, t, STATIC_MIN)
    view = _QueryView(h, space)
    target = view.target_state
    n = h.node_count

    upper = td_dijkstra(view, s, tau0, target=target, weight=WEIGHT_UPPER)
    if not upper.is_settled(target):
        return QueryResult.no_path(s, t, tau0, settled=len(upper.settled),
                                   relaxed=upper.relaxed, marked=len(space.marked))
    u_arrival = upper.arrival_at(target)
    limit = u_arrival + config.PRUNE_TOLERANCE * max(1.0, u_arrival - tau0)
    lower = td_dijkstra(view, s, tau0, weight=WEIGHT_LOWER,
                        prune=lambda state, a: a > limit)

    corridor: Set[int] = set()
    for state in lower.settled:
        a = lower.arrival[state]
        for arc in view.arcs(state):
            head = arc.head
            ell = space.ell(head - n) if head >= n else 0.0
            if a + evaluate(arc.lower, a) + ell <= limit:
                corridor.add(arc.ref)

    originals: Set[int] = set()
    for ref in corridor:
        originals |= unpack_all(h, ref)
    logger.debug("ATCH corridor: %d hierarchy edges, %d original edges",
                 len(corridor), len(originals))

    exact = td_dijkstra(h.base.forward_view(), s, tau0, target=t,
                        edge_filter=lambda arc: arc.ref in originals)
    stats = dict(settled=len(upper.settled) + len(lower.settled) + len(exact.settled),
                 relaxed=upper.relaxed + lower.relaxed + exact.relaxed,
                 marked=len(space.marked))
    if not exact.is_settled(t):
        return QueryResult.no_path(s, t, tau0, **stats)
    path = _graph_path(h.base, exact.path_to(t), tau0)
    return QueryResult(s, t, tau0, path.arrival, path, **stats)


def profile_query(network: Union[Hierarchy, TDGraph], s: int, t: int) -> Optional[TTF]:
    """Travel-time profile s -> t over all departure times, None if unreachable."""
    _check_endpoints(network.node_count, s, t)
    if s == t:
        return TTF.constant(0.0, network.period)
    if isinstance(network, TDGraph):
        labels = profile_dijkstra(network.forward_view(), s, targets=[t], period=network.period)
        return labels.label(t)
    _require_mode(network, MODE_EXACT, "profile_query")
    space = backward_mark(network, t, REACHABILITY_ONLY)
    view = _QueryView(network, space)
    labels = profile_dijkstra(view, s, targets=[view.target_state], period=network.period)
    return labels.label(view.target_state)


def run_query(h: Hierarchy, algo: str, s: int, t: int, tau0: float,
              pruning: str = config.DEFAULT_PRUNING,
              window: Optional[TimeInterval] = None) -> QueryResult:
    """Dispatch one query by algorithm name (see config.ALGORITHMS)."""
    if algo == "dijkstra":
        return dijkstra_query(h.base, s, t, tau0)
    if algo == "tch":
        return tch_query(h, s, t, tau0)
    if algo == "pruned":
        method = PRUNING_METHODS[pruning]
        if method == REACHABILITY_ONLY:
            return tch_query(h, s, t, tau0)
        return pruned_tch_query(h, s, t, tau0, method=method, window=window)
    if algo == "atch":
        return atch_query(h, s, t, tau0)
    if algo == "profile":
        profile = profile_query(h, s, t)
        if profile is None:
            return QueryResult.no_path(s, t, tau0)
        return QueryResult(s, t, tau0, tau0 + evaluate(profile, tau0))
    raise ValueError(f"Unknown algorithm: {algo}")
