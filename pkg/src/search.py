"""
Search Module - The Dijkstra Family
===================================
  - td_dijkstra:       earliest arrival for one departure time (label-setting, FIFO)
  - profile_dijkstra:  travel-time profiles for all departures (label-correcting)
  - interval_dijkstra: lower bounds on travel time over a departure window
  - static_dijkstra:   classic shortest paths on global min / max edge weights

Every search takes a GraphView (tdgraph.AdjacencyView or any object with
node_count and arcs(u)) and owns its label store, so searches over the same
immutable graph are independent. Queues are heapq binary heaps with lazy
deletion; ties are broken by the smaller node id.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Collection, Dict, List, Optional, Tuple

import config
from tdgraph import Arc, GraphView
from ttf import (TTF, TimeInterval, evaluate, global_max, global_min, link, min_over,
                 minimum, undercut_intervals)

logger = logging.getLogger(__name__)

INF = math.inf

# which TTF of an arc a search relaxes (bounds only differ on ATCH shortcuts)
WEIGHT_EXACT = "exact"
WEIGHT_LOWER = "lower"
WEIGHT_UPPER = "upper"


def _arc_ttf(arc: Arc, weight: str) -> TTF:
    return arc.upper if weight == WEIGHT_UPPER else arc.lower


# =============================================================================
# LABEL STORES
# =============================================================================

@dataclass
class ScalarLabels:
    """Earliest arrival per settled node of a time-dependent Dijkstra run."""
    source: int
    departure: float
    arrival: Dict[int, float] = field(default_factory=dict)
    parent: Dict[int, Tuple[int, int]] = field(default_factory=dict)   # node -> (pred, arc ref)
    settled: List[int] = field(default_factory=list)                   # settle order
    relaxed: int = 0
    _settled_set: set = field(default_factory=set, repr=False)

    def is_settled(self, v: int) -> bool:
        return v in self._settled_set

    def arrival_at(self, v: int) -> float:
        return self.arrival[v] if v in self._settled_set else INF

    def travel_time(self, v: int) -> float:
        return self.arrival_at(v) - self.departure

    def path_to(self, v: int) -> List[int]:
        """Arc refs of the tree path source -> v (empty for the source)."""
        if not self.is_settled(v):
            raise KeyError(f"Node {v} was not settled")
        refs = []
        while v != self.source:
            v, ref = self.parent[v]
            refs.append(ref)
        refs.reverse()
        return refs


@dataclass
class ProfileLabels:
    """Tentative travel-time functions of a profile search."""
    source: int
    period: float
    labels: Dict[int, Optional[TTF]] = field(default_factory=dict)   # source maps to None (zero)
    settled: int = 0
    truncated: bool = False

    def reached(self, v: int) -> bool:
        return v in self.labels

    def label(self, v: int) -> Optional[TTF]:
        """Travel-time profile source -> v, None if v was not reached."""
        if v not in self.labels:
            return None
        f = self.labels[v]
        return TTF.constant(0.0, self.period) if f is None else f


@dataclass
class IntervalLabels:
    """Per-node lower bound on travel time over a departure (or arrival) window."""
    source: int
    window: TimeInterval
    lower: Dict[int, float] = field(default_factory=dict)

    def bound(self, v: int) -> float:
        return self.lower.get(v, INF)


@dataclass
class StaticDistances:
    source: int
    distance: Dict[int, float] = field(default_factory=dict)
    parent: Dict[int, Tuple[int, int]] = field(default_factory=dict)

    def dist(self, v: int) -> float:
        return self.distance.get(v, INF)

    def path_to(self, v: int) -> List[int]:
        refs = []
        while v != self.source:
            v, ref = self.parent[v]
            refs.append(ref)
        refs.reverse()
        return refs


# =============================================================================
# TIME-DEPENDENT DIJKSTRA
# =============================================================================

def td_dijkstra(view: GraphView, source: int, tau0: float,
                target: Optional[int] = None,
                edge_filter: Optional[Callable[[Arc], bool]] = None,
                prune: Optional[Callable[[int, float], bool]] = None,
                weight: str = WEIGHT_EXACT) -> ScalarLabels:
    """Earliest arrivals departing from source at tau0.

    edge_filter(arc) returning False hides the arc from this search;
    prune(v, arrival) returning True keeps v out of the queue for that label.
    Stops as soon as target is settled.
    """
    labels = ScalarLabels(source, tau0)
    arrival = labels.arrival
    parent = labels.parent
    settled = labels._settled_set
    arrival[source] = tau0
    heap = [(tau0, source)]

    while heap:
        t, u = heapq.heappop(heap)
        if u in settled or t > arrival[u]:
            continue
        settled.add(u)
        labels.settled.append(u)
        if u == target:
            break
        for arc in view.arcs(u):
            if edge_filter is not None and not edge_filter(arc):
                continue
            v = arc.head
            if v in settled:
                continue
            labels.relaxed += 1
            tv = t + evaluate(_arc_ttf(arc, weight), t)
            if tv < arrival.get(v, INF):
                if prune is not None and prune(v, tv):
                    continue
                arrival[v] = tv
                parent[v] = (u, arc.ref)
                heapq.heappush(heap, (tv, v))
    return labels


# =============================================================================
# PROFILE DIJKSTRA
# =============================================================================

def profile_dijkstra(view: GraphView, source: int,
                     targets: Optional[Collection[int]] = None,
                     settle_limit: Optional[int] = None,
                     hop_limit: Optional[int] = None,
                     cutoff: float = INF,
                     transform: Optional[Callable[[TTF], TTF]] = None,
                     weight: str = WEIGHT_EXACT,
                     period: Optional[float] = None) -> ProfileLabels:
    """Label-correcting search over TTF labels.

    A node re-enters the queue whenever its label improves anywhere; the
    queue key is the label's global minimum. Every improvement found after
    popping key k is worth at least k, so a target whose label maximum is at
    most k is final. The search ends when the queue is empty, when the
    smallest key exceeds cutoff, or when every target is final.
    settle_limit counts distinct nodes; re-settling a node does not count.
    Hitting settle_limit or hop_limit marks the result truncated.
    """
    result = ProfileLabels(source, period if period is not None else config.PERIOD)
    labels = result.labels
    labels[source] = None
    hops = {source: 0}
    queued = {source: 0.0}
    heap = [(0.0, source)]
    open_targets = {w for w in targets if w != source} if targets else set()
    watch_targets = bool(open_targets)
    done = set()
    period_known = period is not None

    while heap:
        key, u = heapq.heappop(heap)
        if queued.get(u) != key:
            continue
        del queued[u]
        if key > cutoff:
            break
        if watch_targets:
            open_targets = {w for w in open_targets if key < _target_max(labels, w)}
            if not open_targets:
                break
        if u not in done:
            done.add(u)
            if settle_limit is not None and len(done) > settle_limit:
                result.truncated = True
                break
        result.settled = len(done)

        arcs = view.arcs(u)
        if hop_limit is not None and hops[u] >= hop_limit:
            if arcs:
                result.truncated = True
            continue

        lu = labels[u]
        for arc in arcs:
            v = arc.head
            if v == source:
                continue
            f = _arc_ttf(arc, weight)
            if not period_known:
                result.period = f.period
                period_known = True
            candidate = f if lu is None else link(lu, f)
            if v in labels:
                old = labels[v]
                if not undercut_intervals(candidate, old, tolerance=config.ABS_TOL):
                    continue
                new = minimum(old, candidate)
            else:
                new = candidate
            if transform is not None:
                new = transform(new)
            labels[v] = new
            hops[v] = min(hops.get(v, INF), hops[u] + 1)
            queued[v] = global_min(new)
            heapq.heappush(heap, (queued[v], v))
    if result.truncated:
        logger.debug("Profile search from %d truncated after %d settles", source, result.settled)
    return result


def _target_max(labels: Dict[int, Optional[TTF]], w: int) -> float:
    if w not in labels:
        return INF
    f = labels[w]
    return 0.0 if f is None else global_max(f)


# =============================================================================
# INTERVAL DIJKSTRA
# =============================================================================

def interval_dijkstra(view: GraphView, source: int, window: TimeInterval,
                      upper: Optional[Dict[int, float]] = None,
                      backward: bool = False) -> IntervalLabels:
    """Minimum travel times over a time window.

    Forward: window holds departure times at source, labels bound the travel
    time source -> v. Backward (view reversed, source is the target):
    window holds arrival times at the target, labels bound v -> target.

    upper[v] must bound the travel time between source and v from above
    (a static max-weight search by default); it sizes the window in which
    each edge can be entered. Windows longer than the period collapse to
    the edge's global minimum.
    """
    if upper is None:
        upper = static_dijkstra(view, source, "max").distance
    labels = IntervalLabels(source, window)
    lower = labels.lower
    lower[source] = 0.0
    settled = set()
    heap = [(0.0, source)]

    while heap:
        d, u = heapq.heappop(heap)
        if u in settled or d > lower[u]:
            continue
        settled.add(u)
        hi_u = upper.get(u, INF)
        for arc in view.arcs(u):
            v = arc.head
            if v in settled:
                continue
            f = arc.lower
            if backward:
                begin = window.begin - hi_u - global_max(arc.upper)
                end = window.end - d
            else:
                begin = window.begin + d
                end = window.end + hi_u
            if math.isfinite(begin) and math.isfinite(end) and end - begin < f.period:
                w = min_over(f, begin, end)
            else:
                w = global_min(f)
            nd = d + w
            if nd < lower.get(v, INF):
                lower[v] = nd
                heapq.heappush(heap, (nd, v))
    return labels


# =============================================================================
# STATIC DIJKSTRA
# =============================================================================

def static_dijkstra(view: GraphView, source: int, weight: str = "min",
                    target: Optional[int] = None, bound: float = INF) -> StaticDistances:
    """Shortest paths on scalar weights: global minimum of the lower TTF
    ("min", a lower bound on travel times) or global maximum of the upper
    TTF ("max", an upper bound).

    With a finite bound the search stops past it and distance keeps only
    the settled nodes, so every missing node is farther than bound.
    """
    if weight not in ("min", "max"):
        raise ValueError(f"weight must be 'min' or 'max', got {weight}")
    use_max = weight == "max"
    result = StaticDistances(source)
    dist = result.distance
    parent = result.parent
    dist[source] = 0.0
    settled = set()
    heap = [(0.0, source)]

    while heap:
        d, u = heapq.heappop(heap)
        if u in settled or d > dist[u]:
            continue
        if d > bound:
            break
        settled.add(u)
        if u == target:
            break
        for arc in view.arcs(u):
            v = arc.head
            if v in settled:
                continue
            nd = d + (global_max(arc.upper) if use_max else global_min(arc.lower))
            if nd < dist.get(v, INF):
                dist[v] = nd
                parent[v] = (u, arc.ref)
                heapq.heappush(heap, (nd, v))
    if bound < INF:
        for v in [v for v in dist if v not in settled]:
            del dist[v]
            parent.pop(v, None)
    return result
