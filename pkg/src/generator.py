"""
Synthetic Instance Generator
============================
Grid and random graphs with periodic FIFO travel-time functions, plus
random query sets. All randomness flows from one seed through
numpy.random.SeedSequence.spawn: one child stream for the structure, one
for the TTFs and one for queries, so adding queries never changes the graph.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

import config
from loader import Query
from tdgraph import TDGraph, build_graph
from ttf import TTF

logger = logging.getLogger(__name__)

GRID = "grid"
RANDOM = "random"


@dataclass(frozen=True)
class GeneratorSpec:
    """Graph model plus TTF model.

    grid uses width x height nodes with 4-neighbour bidirected edges;
    random uses nodes and avg_degree (out-edges per node, a Hamiltonian
    cycle first so every node reaches every other).
    """
    model: str = GRID
    width: int = 0
    height: int = 0
    nodes: int = 0
    avg_degree: float = config.GEN_AVG_DEGREE
    points_min: int = config.GEN_POINTS_MIN
    points_max: int = config.GEN_POINTS_MAX
    base_min: float = config.GEN_BASE_MIN
    base_max: float = config.GEN_BASE_MAX
    amplitude: float = config.GEN_PEAK_AMPLITUDE
    seed: int = config.DEFAULT_SEED
    period: float = config.PERIOD

    def __post_init__(self):
        if self.model == GRID:
            if self.width < 1 or self.height < 1:
                raise ValueError(f"Degenerate grid {self.width}x{self.height}")
        elif self.model == RANDOM:
            if self.nodes < 1:
                raise ValueError(f"Random graph needs at least one node, got {self.nodes}")
            if self.avg_degree < 0:
                raise ValueError(f"avg_degree must be >= 0, got {self.avg_degree}")
        else:
            raise ValueError(f"Unknown graph model: {self.model}")
        if not 1 <= self.points_min <= self.points_max:
            raise ValueError(f"Invalid point range [{self.points_min}, {self.points_max}]")
        if not 0 < self.base_min <= self.base_max:
            raise ValueError(f"Invalid base weight range [{self.base_min}, {self.base_max}]")
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be >= 0, got {self.amplitude}")

    @property
    def node_count(self) -> int:
        return self.width * self.height if self.model == GRID else self.nodes


def grid_spec(width: int, height: int, seed: int = config.DEFAULT_SEED, **kwargs) -> GeneratorSpec:
    return GeneratorSpec(model=GRID, width=width, height=height, seed=seed, **kwargs)


def random_spec(nodes: int, avg_degree: float = config.GEN_AVG_DEGREE,
                seed: int = config.DEFAULT_SEED, **kwargs) -> GeneratorSpec:
    return GeneratorSpec(model=RANDOM, nodes=nodes, avg_degree=avg_degree, seed=seed, **kwargs)


def _streams(seed: int) -> List[np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(3)
    return [np.random.default_rng(child) for child in children]


# =============================================================================
# STRUCTURE
# =============================================================================

def grid_pairs(width: int, height: int) -> List[Tuple[int, int]]:
    pairs = []
    for y in range(height):
        for x in range(width):
            u = y * width + x
            if x + 1 < width:
                pairs += [(u, u + 1), (u + 1, u)]
            if y + 1 < height:
                pairs += [(u, u + width), (u + width, u)]
    return pairs


def random_pairs(nodes: int, avg_degree: float, rng: np.random.Generator) -> List[Tuple[int, int]]:
    if nodes < 2:
        return []
    cycle = rng.permutation(nodes).tolist()
    pairs = [(cycle[i], cycle[(i + 1) % nodes]) for i in range(nodes)]
    extra = max(0, int(round(nodes * avg_degree)) - nodes)
    tails = rng.integers(0, nodes, size=extra)
    # head offset in 1..n-1 rules out self-loops
    offsets = rng.integers(1, nodes, size=extra)
    pairs += [(int(u), int((u + d) % nodes)) for u, d in zip(tails, offsets)]
    return pairs


# =============================================================================
# TRAVEL-TIME FUNCTIONS
# =============================================================================

def fifo_clamp(times: np.ndarray, values: np.ndarray, period: float,
               min_slope: float = config.GEN_MIN_SLOPE) -> np.ndarray:
    """Raise values until every (cyclic) segment slope is >= min_slope.

    Walks once around the period starting at the maximum; raised values never
    exceed it, so the segment back into the maximum needs no fix.
    """
    values = values.astype(np.float64).copy()
    k = len(times)
    if k < 2:
        return values
    start = int(np.argmax(values))
    for step in range(1, k):
        i = (start + step - 1) % k
        j = (start + step) % k
        dt = (times[j] - times[i]) % period
        floor = values[i] + min_slope * dt
        if values[j] < floor:
            values[j] = floor
    return values


def random_ttf(rng: np.random.Generator, points: int, base: float, amplitude: float,
               period: float = config.PERIOD) -> TTF:
    """FIFO TTF with `points` breakpoints between base and base * (1 + amplitude)."""
    if points <= 1:
        return TTF.constant(base, period)
    times = np.unique(rng.uniform(0.0, period, size=points))
    values = base * (1.0 + amplitude * rng.random(times.size))
    return TTF(times, fifo_clamp(times, values, period), period)


def generate_graph(spec: GeneratorSpec) -> TDGraph:
    structure_rng, ttf_rng, _ = _streams(spec.seed)
    if spec.model == GRID:
        pairs = grid_pairs(spec.width, spec.height)
    else:
        pairs = random_pairs(spec.nodes, spec.avg_degree, structure_rng)

    edges = []
    for u, v in pairs:
        points = int(ttf_rng.integers(spec.points_min, spec.points_max + 1))
        base = float(ttf_rng.uniform(spec.base_min, spec.base_max))
        edges.append((u, v, random_ttf(ttf_rng, points, base, spec.amplitude, spec.period)))
    graph = build_graph(spec.node_count, edges, spec.period)
    logger.info("Generated %r (model=%s, seed=%d)", graph, spec.model, spec.seed)
    return graph


# =============================================================================
# QUERIES
# =============================================================================

def generate_queries(node_count: int, count: int, seed: int = config.DEFAULT_SEED,
                     period: float = config.PERIOD,
                     rng: Optional[np.random.Generator] = None) -> List[Query]:
    """count uniform (s, t, tau) triples; tau uniform in [0, period)."""
    if node_count < 1:
        raise ValueError("Cannot sample queries on an empty graph")
    rng = rng if rng is not None else _streams(seed)[2]
    sources = rng.integers(0, node_count, size=count)
    targets = rng.integers(0, node_count, size=count)
    taus = rng.uniform(0.0, period, size=count)
    return [Query(int(s), int(t), float(tau)) for s, t, tau in zip(sources, targets, taus)]
