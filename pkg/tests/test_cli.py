import sys
from pathlib import Path

import pandas as pd
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from main import EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED, main  # noqa: E402
from loader import read_graph, read_hierarchy, read_queries  # noqa: E402


@pytest.fixture
def instance(tmp_path):
    """Generated 3x3 grid with queries, contracted exactly."""
    graph = tmp_path / "grid.tdg"
    assert main(["gen", "--grid", "3", "3", "--seed", "5", "--queries", "12",
                 "--out", str(graph)]) == EXIT_OK
    hierarchy = tmp_path / "grid.tch"
    assert main(["preprocess", str(graph), "--out", str(hierarchy)]) == EXIT_OK
    return graph, hierarchy, graph.with_suffix(".queries")


def test_gen_writes_graph_and_queries(instance):
    graph, _, queries = instance
    g = read_graph(graph)
    assert g.node_count == 9 and g.edge_count == 24
    assert len(read_queries(queries, g.node_count)) == 12


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.tdg", tmp_path / "b.tdg"
    for out in (a, b):
        assert main(["gen", "--random", "15", "--degree", "2.5", "--seed", "3",
                     "--points", "1", "4", "--out", str(out)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_preprocess_approx_with_sampled_ordering(tmp_path, instance):
    graph, _, _ = instance
    out = tmp_path / "grid.approx.tch"
    assert main(["preprocess", str(graph), "--mode", "approx", "--epsilon", "0.5",
                 "--strategy", "samples", "--samples", "3", "--out", str(out)]) == EXIT_OK
    h = read_hierarchy(out)
    assert h.mode == "approx" and h.epsilon == 0.5


@pytest.mark.parametrize("mode_args", [[], ["--mode", "approx", "--epsilon", "0.5"]])
def test_preprocess_and_verify_are_byte_identical_across_runs(tmp_path, instance, mode_args):
    graph, _, _ = instance
    hierarchies, reports = [], []
    for run in ("a", "b"):
        hierarchy = tmp_path / f"{run}.tch"
        report = tmp_path / f"{run}.csv"
        assert main(["preprocess", str(graph), *mode_args, "--out", str(hierarchy)]) == EXIT_OK
        assert main(["verify", str(graph), str(hierarchy), "--queries", "20", "--seed", "4",
                     "--profiles", "2", "--out", str(report)]) == EXIT_OK
        hierarchies.append(hierarchy.read_bytes())
        reports.append(report.read_bytes())
    assert hierarchies[0] == hierarchies[1]
    assert reports[0] == reports[1]


@pytest.mark.parametrize("algo, pruning", [("tch", "static"), ("pruned", "interval"),
                                           ("dijkstra", "none"), ("profile", "static")])
def test_query_writes_one_row_per_query(tmp_path, instance, algo, pruning):
    _, hierarchy, queries = instance
    out = tmp_path / f"{algo}.results"
    assert main(["query", str(hierarchy), str(queries), "--algo", algo,
                 "--pruning", pruning, "--out", str(out)]) == EXIT_OK
    rows = out.read_text().splitlines()
    assert len(rows) == 12


def test_query_same_source_and_target(tmp_path, instance):
    _, hierarchy, _ = instance
    queries = tmp_path / "self.queries"
    queries.write_text("4 4 100.0\n0 0 0.0\n")
    out = tmp_path / "self.results"
    assert main(["query", str(hierarchy), str(queries), "--out", str(out)]) == EXIT_OK
    for row in out.read_text().splitlines():
        assert float(row.split()[4]) == 0.0


def test_queries_agree_across_algorithms(tmp_path, instance):
    _, hierarchy, queries = instance
    columns = {}
    for algo in ("dijkstra", "tch", "pruned"):
        out = tmp_path / f"{algo}.results"
        main(["query", str(hierarchy), str(queries), "--algo", algo, "--out", str(out)])
        columns[algo] = [float(r.split()[4]) for r in out.read_text().splitlines()]
    assert columns["tch"] == pytest.approx(columns["dijkstra"], rel=1e-6)
    assert columns["pruned"] == pytest.approx(columns["dijkstra"], rel=1e-6)


def test_verify_passes_on_constant_grid(tmp_path):
    graph, hierarchy = tmp_path / "c.tdg", tmp_path / "c.tch"
    main(["gen", "--grid", "3", "3", "--points", "1", "1", "--out", str(graph)])
    main(["preprocess", str(graph), "--out", str(hierarchy)])
    report = tmp_path / "verify.csv"
    assert main(["verify", str(graph), str(hierarchy), "--queries", "15", "--profiles", "2",
                 "--out", str(report)]) == EXIT_OK
    df = pd.read_csv(report)
    assert df["passed"].all()
    assert {"tch", "pruned_static", "pruned_interval", "profile"} <= set(df["check"])


def test_verify_fails_when_hierarchy_belongs_to_another_graph(tmp_path, instance):
    _, hierarchy, _ = instance
    other = tmp_path / "other.tdg"
    main(["gen", "--grid", "3", "3", "--seed", "6", "--out", str(other)])
    assert main(["verify", str(other), str(hierarchy), "--queries", "10", "--profiles", "0",
                 "--out", str(tmp_path / "v.csv")]) == EXIT_VERIFY_FAILED


def test_bench_writes_reports(tmp_path, instance):
    graph, hierarchy, _ = instance
    assert main(["bench", str(graph), str(hierarchy), "--queries", "5", "--no-preprocess",
                 "--out-dir", str(tmp_path)]) == EXIT_OK
    summary = pd.read_csv(tmp_path / "bench_grid_summary.csv")
    assert list(summary["algorithm"]) == ["dijkstra", "tch", "pruned"]
    assert (tmp_path / "bench_grid_queries.parquet").exists()


# =============================================================================
# error exits
# =============================================================================

def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.tdg"
    bad.write_text("tdg 1\n2 1 1000.0\n0 1 3 0.0\n")
    assert main(["preprocess", str(bad)]) == EXIT_USAGE


def test_missing_file_exit_code(tmp_path):
    assert main(["preprocess", str(tmp_path / "missing.tdg")]) == EXIT_USAGE


def test_atch_on_exact_hierarchy_exit_code(tmp_path, instance):
    _, hierarchy, queries = instance
    assert main(["query", str(hierarchy), str(queries), "--algo", "atch",
                 "--out", str(tmp_path / "r.results")]) == EXIT_USAGE


def test_query_out_of_range_exit_code(tmp_path, instance):
    _, hierarchy, _ = instance
    queries = tmp_path / "far.queries"
    queries.write_text("0 99 0.0\n")
    assert main(["query", str(hierarchy), str(queries)]) == EXIT_USAGE


def test_negative_epsilon_exit_code(instance):
    graph, _, _ = instance
    assert main(["preprocess", str(graph), "--mode", "approx", "--epsilon", "-1"]) == EXIT_USAGE


def test_bad_arguments_exit_with_usage():
    with pytest.raises(SystemExit) as info:
        main(["query"])
    assert info.value.code == EXIT_USAGE
