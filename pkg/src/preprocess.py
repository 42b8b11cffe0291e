"""
Preprocessing Module - Node Ordering and Contraction
====================================================
  1. order_nodes:      static importance ordering on scalarised weights
  2. HierarchyBuilder: contracts nodes in ascending rank, inserting shortcuts
                       whose chained TTF may be shortest at some departure time
                       (exact) or whose lower bound undercuts the witness's
                       upper bound somewhere (approximate, ATCH)
  3. condense:         turns an ATCH into an exact TCH
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, replace
from functools import reduce
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from search import WEIGHT_EXACT, WEIGHT_UPPER, profile_dijkstra, static_dijkstra
from tdgraph import (MODE_APPROX, MODE_EXACT, Arc, Hierarchy, HierarchyEdge, TDGraph,
                     ranks_from_order)
from ttf import (TTF, BoundPair, TimeInterval, approximate, eval_many, global_max,
                 global_min, link, link_bounds, lower_bound, mean_value, minimum, minimum_bounds,
                 undercut_intervals, upper_bound)

logger = logging.getLogger(__name__)

AVERAGE_WEIGHT = "average_weight"
DEPARTURE_SAMPLES = "departure_samples"


# =============================================================================
# CONFIGURATION TYPES
# =============================================================================

@dataclass(frozen=True)
class OrderingStrategy:
    kind: str = AVERAGE_WEIGHT
    samples: int = config.ORDER_SAMPLES
    edge_diff_weight: float = config.ORDER_EDGE_DIFF_WEIGHT
    deleted_neighbor_weight: float = config.ORDER_DELETED_NEIGHBOR_WEIGHT
    witness_settle_limit: int = config.ORDER_WITNESS_SETTLE_LIMIT

    def __post_init__(self):
        if self.kind not in (AVERAGE_WEIGHT, DEPARTURE_SAMPLES):
            raise ValueError(f"Unknown ordering strategy: {self.kind}")
        if self.kind == DEPARTURE_SAMPLES and self.samples < 1:
            raise ValueError(f"departure_samples needs k >= 1, got {self.samples}")


@dataclass(frozen=True)
class ContractionConfig:
    mode: str = MODE_EXACT
    epsilon: float = 0.0
    settle_limit: int = config.WITNESS_SETTLE_LIMIT
    hop_limit: int = config.WITNESS_HOP_LIMIT
    label_max_points: int = config.APPROX_LABEL_MAX_POINTS
    insert_on_truncation: bool = True

    def __post_init__(self):
        if self.mode not in (MODE_EXACT, MODE_APPROX):
            raise ValueError(f"Unknown contraction mode: {self.mode}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.settle_limit < 1 or self.hop_limit < 1:
            raise ValueError("Witness limits must be >= 1")

    @property
    def approx(self) -> bool:
        return self.mode == MODE_APPROX


@dataclass(frozen=True)
class Shortcut:
    tail: int
    head: int
    middle: int
    weight: BoundPair                       # exact pair in exact mode
    validity: Tuple[TimeInterval, ...]


# =============================================================================
# NODE ORDERING
# =============================================================================

def _scalar_weights(graph: TDGraph, strategy: OrderingStrategy) -> List[np.ndarray]:
    if strategy.kind == AVERAGE_WEIGHT:
        return [np.array([mean_value(e.ttf)]) for e in graph.edges]
    k = strategy.samples
    departures = np.arange(k) * (graph.period / k)
    return [eval_many(e.ttf, departures) for e in graph.edges]


def _local_distances(out: List[Dict[int, np.ndarray]], source: int, excluded: int,
                     sample: int, bound: float, settle_limit: int) -> Dict[int, float]:
    """Bounded scalar Dijkstra on one weight sample of the ordering overlay."""
    dist = {source: 0.0}
    done = set()
    heap = [(0.0, source)]
    while heap and len(done) < settle_limit:
        d, u = heapq.heappop(heap)
        if u in done or d > dist[u]:
            continue
        if d > bound:
            break
        done.add(u)
        for w, weights in out[u].items():
            if w == excluded or w in done:
                continue
            nd = d + weights[sample]
            if nd < dist.get(w, np.inf):
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return dist


def order_nodes(graph: TDGraph, strategy: Optional[OrderingStrategy] = None) -> List[int]:
    """Contraction order (least important first) by simulated static contraction.

    priority = edge_diff_weight * edge_difference + deleted_neighbor_weight * deleted_neighbors,
    edge_difference averaged over the weight samples; lazy updates, ties by node id.
    """
    strategy = strategy or OrderingStrategy()
    n = graph.node_count
    if n == 0:
        return []

    weights = _scalar_weights(graph, strategy)
    samples = weights[0].size if weights else 1
    out: List[Dict[int, np.ndarray]] = [{} for _ in range(n)]
    inn: List[Dict[int, np.ndarray]] = [{} for _ in range(n)]
    for e, w in zip(graph.edges, weights):
        current = out[e.tail].get(e.head)
        merged = w if current is None else np.minimum(current, w)
        out[e.tail][e.head] = merged
        inn[e.head][e.tail] = merged
    deleted = [0] * n

    def simulate(v: int):
        shortcuts: Dict[Tuple[int, int], np.ndarray] = {}
        needed = 0
        for u, w_uv in inn[v].items():
            for j in range(samples):
                candidates = {w: w_uv[j] + w_vw[j] for w, w_vw in out[v].items() if w != u}
                if not candidates:
                    break
                dist = _local_distances(out, u, v, j, max(candidates.values()),
                                        strategy.witness_settle_limit)
                for w, c in candidates.items():
                    if c < dist.get(w, np.inf) - config.WITNESS_TOLERANCE:
                        needed += 1
                        if (u, w) not in shortcuts:
                            shortcuts[(u, w)] = w_uv + out[v][w]
        edge_difference = needed / samples - (len(inn[v]) + len(out[v]))
        priority = (strategy.edge_diff_weight * edge_difference
                    + strategy.deleted_neighbor_weight * deleted[v])
        return priority, shortcuts

    heap = [(simulate(v)[0], v) for v in range(n)]
    heapq.heapify(heap)
    order: List[int] = []
    while heap:
        _, v = heapq.heappop(heap)
        priority, shortcuts = simulate(v)
        if heap and (priority, v) > heap[0]:
            heapq.heappush(heap, (priority, v))
            continue

        order.append(v)
        neighbors = set(inn[v]) | set(out[v])
        for u in inn[v]:
            del out[u][v]
        for w in out[v]:
            del inn[w][v]
        inn[v].clear()
        out[v].clear()
        for (u, w), ws in shortcuts.items():
            current = out[u].get(w)
            merged = ws if current is None else np.minimum(current, ws)
            out[u][w] = merged
            inn[w][u] = merged
        for x in neighbors:
            deleted[x] += 1

    logger.info("Ordered %d nodes (%s)", n, strategy.kind)
    return order


# =============================================================================
# OVERLAY
# =============================================================================

class _WitnessView:
    """The overlay minus one node, as a GraphView."""

    def __init__(self, overlay: "Overlay", excluded: int):
        self.node_count = overlay.node_count
        self._out = overlay.out
        self._excluded = excluded

    def arcs(self, u: int) -> List[Arc]:
        return [Arc(w, bp.lower, bp.upper, -1)
                for w, bp in self._out[u].items() if w != self._excluded]


class Overlay:
    """Graph on the not-yet-contracted nodes; one envelope-merged edge per ordered pair."""

    def __init__(self, node_count: int, period: float):
        self.node_count = node_count
        self.period = period
        self.out: List[Dict[int, BoundPair]] = [{} for _ in range(node_count)]
        self.inn: List[Dict[int, BoundPair]] = [{} for _ in range(node_count)]
        self.alive = [True] * node_count

    @classmethod
    def from_graph(cls, graph: TDGraph) -> "Overlay":
        overlay = cls(graph.node_count, graph.period)
        for e in graph.edges:
            overlay.add(e.tail, e.head, BoundPair.exact(e.ttf))
        return overlay

    def add(self, u: int, w: int, weight: BoundPair) -> None:
        current = self.out[u].get(w)
        merged = weight if current is None else minimum_bounds(current, weight)
        self.out[u][w] = merged
        self.inn[w][u] = merged

    def remove(self, v: int) -> None:
        for u in self.inn[v]:
            del self.out[u][v]
        for w in self.out[v]:
            del self.inn[w][v]
        self.inn[v].clear()
        self.out[v].clear()
        self.alive[v] = False

    def remaining(self) -> List[int]:
        return [v for v in range(self.node_count) if self.alive[v]]

    def witness_view(self, excluded: int) -> _WitnessView:
        return _WitnessView(self, excluded)

    def full_view(self) -> _WitnessView:
        return _WitnessView(self, -1)


# =============================================================================
# CONTRACTION
# =============================================================================

def _candidate(first: BoundPair, second: BoundPair,
               cfg: ContractionConfig) -> Tuple[TTF, BoundPair]:
    """Lower bound of the chained path <u, v, w> and the weight stored for it.

    In approx mode the decision uses the composed lower bound before it is
    simplified; only the stored weight is widened by epsilon.
    """
    composed = link_bounds(first, second)
    if not cfg.approx:
        return composed.lower, composed
    if composed.is_exact:
        return composed.lower, approximate(composed.lower, cfg.epsilon)
    return composed.lower, BoundPair(lower_bound(composed.lower, cfg.epsilon),
                                     upper_bound(composed.upper, cfg.epsilon))


def _find_shortcuts(overlay: Overlay, v: int, cfg: ContractionConfig) -> List[Shortcut]:
    full_period = (TimeInterval(0.0, overlay.period),)
    tol = config.WITNESS_TOLERANCE
    view = overlay.witness_view(v)
    outs = list(overlay.out[v].items())
    weight = WEIGHT_UPPER if cfg.approx else WEIGHT_EXACT
    transform = None
    if cfg.approx and cfg.epsilon > 0:
        def transform(f: TTF) -> TTF:
            return upper_bound(f, cfg.epsilon) if len(f) > cfg.label_max_points else f

    accepted: List[Shortcut] = []
    for u, first in list(overlay.inn[v].items()):
        candidates = {w: _candidate(first, second, cfg) for w, second in outs if w != u}
        if not candidates:
            continue

        # scalar bounds first: a witness never slower than the candidate's
        # minimum drops it, one never faster than its maximum keeps it everywhere
        ceiling = static_dijkstra(view, u, "max",
                                  bound=max(global_min(c) for c, _ in candidates.values()) + tol)
        candidates = {w: c for w, c in candidates.items()
                      if ceiling.dist(w) > global_min(c[0]) + tol}
        if not candidates:
            continue
        floor = static_dijkstra(view, u, "min",
                                bound=max(global_max(c) for c, _ in candidates.values()) + tol)
        pending = [w for w, (c, _) in candidates.items()
                   if not global_max(c) < floor.dist(w) - tol]

        witness = None
        if pending:
            cutoff = max(global_max(candidates[w][0]) for w in pending)
            witness = profile_dijkstra(view, u, targets=pending,
                                       settle_limit=cfg.settle_limit, hop_limit=cfg.hop_limit,
                                       cutoff=cutoff, transform=transform, weight=weight,
                                       period=overlay.period)
        for w, (c, stored) in candidates.items():
            d = witness.label(w) if witness is not None and w in pending else None
            if d is None:
                validity = full_period
            else:
                intervals = undercut_intervals(c, d, tolerance=tol)
                if intervals:
                    validity = tuple(intervals)
                elif witness.truncated and cfg.insert_on_truncation:
                    validity = full_period
                else:
                    continue
            accepted.append(Shortcut(u, w, v, stored, validity))
    return accepted


def _apply(overlay: Overlay, v: int, shortcuts: List[Shortcut]) -> None:
    overlay.remove(v)
    for s in shortcuts:
        overlay.add(s.tail, s.head, s.weight)


def contract_node(overlay: Overlay, v: int, cfg: ContractionConfig) -> List[Shortcut]:
    """Contract v exactly: insert <u,v,w> wherever it beats every witness at some time."""
    if cfg.approx:
        raise ValueError("contract_node needs an exact ContractionConfig")
    shortcuts = _find_shortcuts(overlay, v, cfg)
    _apply(overlay, v, shortcuts)
    return shortcuts


def contract_node_approx(overlay: Overlay, v: int, cfg: ContractionConfig) -> List[Shortcut]:
    """Contract v comparing candidate lower bounds with witness upper bounds."""
    if not cfg.approx:
        raise ValueError("contract_node_approx needs mode='approx'")
    shortcuts = _find_shortcuts(overlay, v, cfg)
    _apply(overlay, v, shortcuts)
    return shortcuts


class HierarchyBuilder:
    """Contracts a graph node by node in the given order."""

    def __init__(self, graph: TDGraph, order: Sequence[int],
                 cfg: Optional[ContractionConfig] = None):
        self.graph = graph
        self.order = list(order)
        self.rank = ranks_from_order(self.order, graph.node_count)
        self.cfg = cfg or ContractionConfig()
        self.overlay = Overlay.from_graph(graph)
        self.edges: List[HierarchyEdge] = [
            HierarchyEdge(e.tail, e.head, e.ttf, original=i) for i, e in enumerate(graph.edges)
        ]
        self.position = 0
        self.shortcut_count = 0

    @property
    def done(self) -> bool:
        return self.position >= len(self.order)

    def contract_next(self) -> List[Shortcut]:
        v = self.order[self.position]
        contract = contract_node_approx if self.cfg.approx else contract_node
        shortcuts = contract(self.overlay, v, self.cfg)
        for s in shortcuts:
            weight = s.weight if self.cfg.approx else s.weight.lower
            self.edges.append(HierarchyEdge(s.tail, s.head, weight, middle=s.middle,
                                            validity=s.validity))
        self.position += 1
        self.shortcut_count += len(shortcuts)
        if self.position % config.CONTRACTION_LOG_EVERY == 0:
            logger.info("Contracted %d/%d nodes, %d shortcuts so far",
                        self.position, len(self.order), self.shortcut_count)
        return shortcuts

    def run_all(self) -> Hierarchy:
        while not self.done:
            self.contract_next()
        logger.info("Contraction finished: %d nodes, %d shortcuts (%s)",
                    len(self.order), self.shortcut_count, self.cfg.mode)
        return Hierarchy(self.graph, self.order, self.edges, mode=self.cfg.mode,
                         epsilon=self.cfg.epsilon)


def build_hierarchy(graph: TDGraph, order: Sequence[int],
                    cfg: Optional[ContractionConfig] = None) -> Hierarchy:
    return HierarchyBuilder(graph, order, cfg).run_all()


# =============================================================================
# CONDENSING
# =============================================================================

def condense(atch: Hierarchy) -> Hierarchy:
    """Replace every ATCH shortcut's bounds with its exact TTF.

    Shortcuts are processed by ascending rank of their middle node; every
    constituent of <u, m, w> has a lower middle rank, so it is already exact.
    """
    if atch.mode != MODE_APPROX:
        raise ValueError("condense expects an approximate hierarchy")

    exact: Dict[int, TTF] = {}
    envelopes: Dict[Tuple[int, int], TTF] = {}

    def envelope(u: int, w: int) -> TTF:
        if (u, w) not in envelopes:
            envelopes[(u, w)] = reduce(minimum, (exact[i] for i in atch.between[(u, w)]))
        return envelopes[(u, w)]

    for i, e in enumerate(atch.edges):
        if not e.is_shortcut:
            exact[i] = e.lower
    shortcuts = sorted(atch.shortcut_ids(), key=lambda i: atch.rank[atch.edges[i].middle])
    for i in shortcuts:
        e = atch.edges[i]
        exact[i] = link(envelope(e.tail, e.middle), envelope(e.middle, e.head))

    edges = [replace(e, weight=exact[i]) if e.is_shortcut else e
             for i, e in enumerate(atch.edges)]
    logger.info("Condensed %d shortcuts", len(shortcuts))
    return Hierarchy(atch.base, atch.order, edges, mode=MODE_EXACT, epsilon=0.0)
