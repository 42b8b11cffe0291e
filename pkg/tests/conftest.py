"""Shared fixtures: src/ on the import path and small reference instances."""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from generator import generate_graph, grid_spec, random_spec, random_ttf  # noqa: E402
from preprocess import ContractionConfig, build_hierarchy, order_nodes  # noqa: E402
from tdgraph import MODE_APPROX, build_graph  # noqa: E402
from ttf import TTF  # noqa: E402

PERIOD = 1000.0


def const(value, period=PERIOD):
    return TTF.constant(value, period)


def ttf(points, period=PERIOD):
    times, values = zip(*points)
    return TTF(times, values, period)


def chain_graph(weights, period=PERIOD):
    """0 -> 1 -> ... -> len(weights), edge i carries weights[i]."""
    edges = [(i, i + 1, w) for i, w in enumerate(weights)]
    return build_graph(len(weights) + 1, edges, period)


def random_fifo_ttf(rng, points_max=8, period=PERIOD, base=(10.0, 100.0), amplitude=0.8):
    points = int(rng.integers(1, points_max + 1))
    return random_ttf(rng, points, float(rng.uniform(*base)), amplitude, period)


def exact_and_approx(graph, epsilon):
    order = order_nodes(graph)
    exact = build_hierarchy(graph, order)
    approx = build_hierarchy(graph, order, ContractionConfig(mode=MODE_APPROX, epsilon=epsilon))
    return exact, approx


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def grid_graph():
    return generate_graph(grid_spec(5, 5, seed=1, period=PERIOD,
                                    base_min=10.0, base_max=100.0))


@pytest.fixture(scope="session")
def random_graph():
    return generate_graph(random_spec(40, 3.0, seed=2, period=PERIOD,
                                      base_min=10.0, base_max=100.0))


@pytest.fixture(scope="session")
def const_grid():
    return generate_graph(grid_spec(4, 4, seed=3, points_min=1, points_max=1, period=PERIOD,
                                    base_min=10.0, base_max=100.0))


@pytest.fixture(scope="session")
def grid_tch(grid_graph):
    return build_hierarchy(grid_graph, order_nodes(grid_graph))


@pytest.fixture(scope="session")
def random_tch(random_graph):
    return build_hierarchy(random_graph, order_nodes(random_graph))


@pytest.fixture(scope="session")
def random_atch(random_graph):
    cfg = ContractionConfig(mode=MODE_APPROX, epsilon=0.1)
    return build_hierarchy(random_graph, order_nodes(random_graph), cfg)
