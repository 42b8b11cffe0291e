import math

import pytest

from bench import Bench
from conftest import PERIOD
from generator import generate_graph, generate_queries, grid_spec
from loader import Query
from preprocess import ContractionConfig, OrderingStrategy, build_hierarchy, order_nodes
from tdgraph import MODE_APPROX
from utils import relative_error, relative_errors
from verifier import REPORT_COLUMNS, Verifier


@pytest.fixture(scope="module")
def small():
    graph = generate_graph(grid_spec(4, 3, seed=8, period=PERIOD))
    order = order_nodes(graph)
    tch = build_hierarchy(graph, order)
    atch = build_hierarchy(graph, order, ContractionConfig(mode=MODE_APPROX, epsilon=0.1))
    queries = generate_queries(graph.node_count, 10, seed=8, period=PERIOD)
    return graph, tch, atch, queries


def test_relative_error_edge_cases():
    assert relative_error(5.0, 5.0) == 0.0
    assert relative_error(math.inf, math.inf) == 0.0
    assert math.isinf(relative_error(math.inf, 3.0))
    assert relative_error(0.5, 0.0) == 0.5
    errs = relative_errors([1.0, math.inf, 2.0], [1.0, math.inf, math.inf])
    assert errs[0] == 0.0 and errs[1] == 0.0 and math.isinf(errs[2])


def test_verifier_exact_hierarchy(tmp_path, small):
    graph, tch, _, queries = small
    verifier = Verifier(graph, tch, queries, profile_queries=2, profile_samples=5)
    assert verifier.run_all()
    assert set(verifier.results) == {"base_graph", "tch", "pruned_static", "pruned_interval",
                                     "profile"}
    report = verifier.report()
    assert list(report.columns) == REPORT_COLUMNS
    assert len(report[report["check"] == "profile"]) == 10
    path = verifier.save_report(tmp_path / "verify.csv")
    assert path.exists()


def test_verifier_approx_hierarchy(small):
    graph, _, atch, queries = small
    verifier = Verifier(graph, atch, queries, profile_queries=1, profile_samples=4)
    assert verifier.run_all()
    assert {"atch", "condensed_tch", "profile"} <= set(verifier.results)


def test_verifier_flags_wrong_answers(small):
    graph, tch, _, _ = small
    other = generate_graph(grid_spec(4, 3, seed=9, period=PERIOD))
    queries = [Query(0, 11, 0.0), Query(11, 0, 400.0)]
    verifier = Verifier(other, tch, queries, profile_queries=0)
    assert not verifier.run_all()
    assert not verifier.results["base_graph"]


def test_bench_exact(tmp_path, small):
    graph, tch, _, queries = small
    bench = Bench(graph, tch, queries[:4], pruning="interval",
                  strategy=OrderingStrategy())
    report = bench.run_all(with_preprocessing=True)
    assert list(report.summary["algorithm"]) == ["dijkstra", "tch", "pruned"]
    assert len(report.per_query) == 12
    assert report.speedup("dijkstra") == pytest.approx(1.0)
    assert math.isnan(report.speedup("atch"))
    assert {"preprocessing_seconds", "shortcuts", "settled_ratio"} <= set(report.summary.columns)
    paths = bench.save(tmp_path, prefix="b")
    assert all(p.exists() for p in paths)


def test_bench_approx_and_travel_times_agree(small):
    graph, _, atch, queries = small
    report = Bench(graph, atch, queries[:4]).run_all(with_preprocessing=False)
    assert list(report.summary["algorithm"]) == ["dijkstra", "atch"]
    assert report.preprocessing == {}
    df = report.per_query
    oracle = df[df["algorithm"] == "dijkstra"]["travel_time"].to_numpy()
    atch_times = df[df["algorithm"] == "atch"]["travel_time"].to_numpy()
    assert atch_times == pytest.approx(oracle, rel=1e-6)


def test_bench_needs_queries(small):
    graph, tch, _, _ = small
    with pytest.raises(ValueError):
        Bench(graph, tch, [])
