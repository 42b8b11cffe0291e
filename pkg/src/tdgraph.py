"""
Network Data Model
==================
TDGraph: the input network, one travel-time function per directed edge.
Hierarchy: node order plus up/down edge sets of a (approximate)
time-dependent contraction hierarchy, with shortcut unpacking information.

Both are immutable after construction and expose per-node arc lists
(GraphView) to the search module.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Protocol, Sequence, Tuple, Union

import config
from ttf import TTF, BoundPair, TimeInterval, evaluate
from validators import validate_graph, validate_hierarchy, validate_stage

logger = logging.getLogger(__name__)

Weight = Union[TTF, BoundPair]

MODE_EXACT = "exact"
MODE_APPROX = "approx"


# =============================================================================
# GRAPH VIEWS
# =============================================================================

@dataclass(frozen=True, slots=True)
class Arc:
    """One traversable edge as seen by a search. lower is upper for exact weights."""
    head: int
    lower: TTF
    upper: TTF
    ref: int

    @classmethod
    def of(cls, head: int, weight: Weight, ref: int) -> "Arc":
        if isinstance(weight, BoundPair):
            return cls(head, weight.lower, weight.upper, ref)
        return cls(head, weight, weight, ref)

    @property
    def ttf(self) -> TTF:
        return self.lower


class GraphView(Protocol):
    node_count: int

    def arcs(self, u: int) -> Sequence[Arc]:
        ...


class AdjacencyView:
    """GraphView over precomputed per-node arc lists."""

    def __init__(self, node_count: int, adjacency: List[List[Arc]]):
        self.node_count = node_count
        self._adjacency = adjacency

    def arcs(self, u: int) -> Sequence[Arc]:
        return self._adjacency[u]


# =============================================================================
# INPUT GRAPH
# =============================================================================

@dataclass(frozen=True)
class Edge:
    tail: int
    head: int
    ttf: TTF


class TDGraph:
    """Directed multigraph G=(V,E) with TTF weights and a shared period."""

    def __init__(self, node_count: int, edges: Sequence[Edge], period: float):
        self.node_count = node_count
        self.edges: Tuple[Edge, ...] = tuple(edges)
        self.period = float(period)

        self.out_edges: List[List[int]] = [[] for _ in range(node_count)]
        self.in_edges: List[List[int]] = [[] for _ in range(node_count)]
        for i, e in enumerate(self.edges):
            self.out_edges[e.tail].append(i)
            self.in_edges[e.head].append(i)

        self._forward: Optional[AdjacencyView] = None
        self._reverse: Optional[AdjacencyView] = None

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def forward_view(self) -> AdjacencyView:
        if self._forward is None:
            adjacency = [[Arc.of(self.edges[i].head, self.edges[i].ttf, i) for i in ids]
                         for ids in self.out_edges]
            self._forward = AdjacencyView(self.node_count, adjacency)
        return self._forward

    def reverse_view(self) -> AdjacencyView:
        if self._reverse is None:
            adjacency = [[Arc.of(self.edges[i].tail, self.edges[i].ttf, i) for i in ids]
                         for ids in self.in_edges]
            self._reverse = AdjacencyView(self.node_count, adjacency)
        return self._reverse

    def __repr__(self) -> str:
        return f"TDGraph({self.node_count} nodes, {self.edge_count} edges, period={self.period:g})"


def build_graph(node_count: int,
                edges: Iterable[Tuple[int, int, TTF]],
                period: float = config.PERIOD) -> TDGraph:
    """Index an edge list; raises ValidationError on bad ids, TTFs or periods."""
    if node_count < 0:
        raise ValueError(f"node_count must be >= 0, got {node_count}")
    edge_list = [Edge(int(u), int(v), f) for u, v, f in edges]
    validate_stage(validate_graph(node_count, edge_list, period), "build_graph")
    graph = TDGraph(node_count, edge_list, period)
    logger.debug("Built %r", graph)
    return graph


def ranks_from_order(order: Sequence[int], node_count: int) -> List[int]:
    """rank[v] = position of v in the contraction order (higher = more important)."""
    if len(order) != node_count or sorted(order) != list(range(node_count)):
        raise ValueError("Node order is not a permutation of the graph's nodes")
    rank = [0] * node_count
    for position, v in enumerate(order):
        rank[v] = position
    return rank


def split_by_order(graph: TDGraph, order: Sequence[int]) -> Tuple[List[int], List[int]]:
    """Partition edge ids into (up, down): up iff rank[tail] < rank[head]."""
    rank = ranks_from_order(order, graph.node_count)
    up, down = [], []
    for i, e in enumerate(graph.edges):
        (up if rank[e.tail] < rank[e.head] else down).append(i)
    return up, down


# =============================================================================
# HIERARCHY
# =============================================================================

@dataclass(frozen=True)
class HierarchyEdge:
    tail: int
    head: int
    weight: Weight
    middle: Optional[int] = None            # contracted node of <tail, middle, head>
    original: Optional[int] = None          # base-graph edge id for original edges
    validity: Optional[Tuple[TimeInterval, ...]] = None

    @property
    def is_shortcut(self) -> bool:
        return self.middle is not None

    @property
    def lower(self) -> TTF:
        return self.weight.lower if isinstance(self.weight, BoundPair) else self.weight

    @property
    def upper(self) -> TTF:
        return self.weight.upper if isinstance(self.weight, BoundPair) else self.weight

    @property
    def point_count(self) -> int:
        if isinstance(self.weight, BoundPair):
            return self.weight.point_count
        return len(self.weight)


@dataclass(frozen=True)
class PathResult:
    edges: Tuple[int, ...]              # base-graph edge ids
    departures: Tuple[float, ...]       # departure time at each edge's tail
    departure: float
    arrival: float

    @property
    def travel_time(self) -> float:
        return self.arrival - self.departure

    def is_consistent(self, graph: TDGraph, tol: float = config.ABS_TOL) -> bool:
        """Re-evaluate edge by edge and compare with the stored times."""
        t = self.departure
        previous_head = None
        for edge_id, dep in zip(self.edges, self.departures):
            e = graph.edges[edge_id]
            if previous_head is not None and e.tail != previous_head:
                return False
            if abs(dep - t) > tol * max(1.0, abs(t)):
                return False
            t = t + evaluate(e.ttf, t)
            previous_head = e.head
        return abs(t - self.arrival) <= tol * max(1.0, abs(t))


class Hierarchy:
    """Contraction hierarchy: rank per node and edges split into up and down."""

    def __init__(self, base: TDGraph, order: Sequence[int], edges: Sequence[HierarchyEdge],
                 mode: str = MODE_EXACT, epsilon: float = 0.0, validate: bool = True):
        if mode not in (MODE_EXACT, MODE_APPROX):
            raise ValueError(f"Unknown hierarchy mode: {mode}")
        self.base = base
        self.node_count = base.node_count
        self.period = base.period
        self.order: Tuple[int, ...] = tuple(order)
        self.rank = ranks_from_order(self.order, self.node_count)
        self.edges: Tuple[HierarchyEdge, ...] = tuple(edges)
        self.mode = mode
        self.epsilon = float(epsilon)

        n = self.node_count
        self.up_ids: List[int] = []
        self.down_ids: List[int] = []
        self.up_arcs: List[List[Arc]] = [[] for _ in range(n)]
        self.down_arcs: List[List[Arc]] = [[] for _ in range(n)]
        self.down_in: List[List[Arc]] = [[] for _ in range(n)]   # reversed: head -> tail
        self.between: Dict[Tuple[int, int], List[int]] = {}

        for i, e in enumerate(self.edges):
            self.between.setdefault((e.tail, e.head), []).append(i)
            if self.rank[e.tail] < self.rank[e.head]:
                self.up_ids.append(i)
                self.up_arcs[e.tail].append(Arc.of(e.head, e.weight, i))
            else:
                self.down_ids.append(i)
                self.down_arcs[e.tail].append(Arc.of(e.head, e.weight, i))
                self.down_in[e.head].append(Arc.of(e.tail, e.weight, i))

        if validate:
            validate_stage(validate_hierarchy(self), "hierarchy")

    @property
    def is_exact(self) -> bool:
        return self.mode == MODE_EXACT

    def is_up(self, edge_id: int) -> bool:
        e = self.edges[edge_id]
        return self.rank[e.tail] < self.rank[e.head]

    def shortcut_ids(self) -> List[int]:
        return [i for i, e in enumerate(self.edges) if e.is_shortcut]

    def up_view(self) -> AdjacencyView:
        return AdjacencyView(self.node_count, self.up_arcs)

    def reverse_down_view(self) -> AdjacencyView:
        return AdjacencyView(self.node_count, self.down_in)

    def stats(self) -> Dict[str, float]:
        shortcuts = [self.edges[i] for i in self.shortcut_ids()]
        points = sum(e.point_count for e in shortcuts)
        return {
            "nodes": self.node_count,
            "edges": len(self.edges),
            "shortcuts": len(shortcuts),
            "up_edges": len(self.up_ids),
            "down_edges": len(self.down_ids),
            "shortcut_points": points,
            "mean_points_per_shortcut": points / len(shortcuts) if shortcuts else 0.0,
        }

    def __repr__(self) -> str:
        return (f"Hierarchy({self.mode}, eps={self.epsilon:g}, {self.node_count} nodes, "
                f"{len(self.edges)} edges)")


def base_graph_from_edges(node_count: int, edges: Sequence[HierarchyEdge], period: float) -> TDGraph:
    """Rebuild the input graph from the original edges a hierarchy carries."""
    originals = sorted((e for e in edges if e.original is not None), key=lambda e: e.original)
    if [e.original for e in originals] != list(range(len(originals))):
        raise ValueError("Original edge ids of the hierarchy are not 0..m-1")
    return build_graph(node_count, [(e.tail, e.head, e.lower) for e in originals], period)


# =============================================================================
# UNPACKING
# =============================================================================

def _exact_arrival(h: Hierarchy, edge_id: int, tau: float) -> float:
    e = h.edges[edge_id]
    if h.is_exact or not isinstance(e.weight, BoundPair) or e.weight.is_exact:
        return tau + evaluate(e.lower, tau)
    return expand_edge(h, edge_id, tau)[1]


def _fastest(h: Hierarchy, candidates: List[int], tau: float) -> int:
    if len(candidates) == 1:
        return candidates[0]
    return min(candidates, key=lambda i: (_exact_arrival(h, i, tau), i))


def expand_edge(h: Hierarchy, edge_id: int, tau: float) -> Tuple[List[Tuple[int, float]], float]:
    """Original edges (with departure times) of a hierarchy edge departing at tau.

    Where several hierarchy edges join the same pair, the one arriving
    first at the current time is followed.
    """
    out: List[Tuple[int, float]] = []
    t = tau
    # stack items: edge id, or (tail, head) pair still to be chosen
    stack: List[Union[int, Tuple[int, int]]] = [edge_id]
    while stack:
        item = stack.pop()
        if isinstance(item, tuple):
            item = _fastest(h, h.between[item], t)
        e = h.edges[item]
        if e.middle is None:
            out.append((e.original, t))
            t = t + evaluate(h.base.edges[e.original].ttf, t)
            continue
        stack.append((e.middle, e.head))
        stack.append((e.tail, e.middle))
    return out, t


def unpack_edge(h: Hierarchy, edge_id: int, tau: Optional[float] = None) -> List[int]:
    """Original-edge ids a hierarchy edge stands for.

    With tau, parallel constituents are resolved at that departure time;
    without it the first constituent of every pair is taken. That chain is
    one valid expansion but its chained TTF can exceed the envelope the
    shortcut stores; weight checks must use the tau form.
    """
    if tau is not None:
        return [orig for orig, _ in expand_edge(h, edge_id, tau)[0]]

    out: List[int] = []
    stack: List[int] = [edge_id]
    while stack:
        e = h.edges[stack.pop()]
        if e.middle is None:
            out.append(e.original)
            continue
        stack.append(h.between[(e.middle, e.head)][0])
        stack.append(h.between[(e.tail, e.middle)][0])
    return out


def unpack_all(h: Hierarchy, edge_id: int) -> set:
    """Every original edge any departure time could unpack edge_id to."""
    originals = set()
    seen = set()
    stack = [edge_id]
    while stack:
        i = stack.pop()
        if i in seen:
            continue
        seen.add(i)
        e = h.edges[i]
        if e.middle is None:
            originals.add(e.original)
            continue
        stack.extend(h.between[(e.tail, e.middle)])
        stack.extend(h.between[(e.middle, e.head)])
    return originals
