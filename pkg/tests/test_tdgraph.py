import pytest

from conftest import PERIOD, chain_graph, const, ttf
from preprocess import build_hierarchy
from tdgraph import (Hierarchy, HierarchyEdge, PathResult, build_graph, expand_edge,
                     ranks_from_order, split_by_order, unpack_all, unpack_edge)
from ttf import BoundPair, evaluate
from validators import ValidationError


def test_build_graph_without_edges():
    g = build_graph(3, [], PERIOD)
    assert g.edge_count == 0
    assert all(not g.forward_view().arcs(v) for v in range(3))


def test_parallel_edges_are_kept():
    g = build_graph(2, [(0, 1, const(5)), (0, 1, const(3))], PERIOD)
    assert g.edge_count == 2
    assert [a.ref for a in g.forward_view().arcs(0)] == [0, 1]
    assert [a.head for a in g.reverse_view().arcs(1)] == [0, 0]


@pytest.mark.parametrize("edges", [
    [(0, 5, const(1))],
    [(1, 1, const(1))],
    [(0, 1, const(1, period=10))],
    [(0, 1, ttf([(0, 10), (5, 0)]))],
])
def test_build_graph_rejects_invalid_edges(edges):
    with pytest.raises(ValidationError):
        build_graph(2, edges, PERIOD)


def test_ranks_from_order_requires_permutation():
    assert ranks_from_order([2, 0, 1], 3) == [1, 2, 0]
    with pytest.raises(ValueError):
        ranks_from_order([0, 0, 1], 3)


def test_split_by_order_chain():
    g = chain_graph([const(1), const(2)])
    assert split_by_order(g, [0, 1, 2]) == ([0, 1], [])
    assert split_by_order(g, [2, 1, 0]) == ([], [0, 1])


def test_original_edge_unpacks_to_itself():
    g = chain_graph([const(1), const(2)])
    h = build_hierarchy(g, [0, 1, 2])
    assert unpack_edge(h, 1) == [1]


def test_one_level_shortcut_unpacks_to_two_edges():
    g = chain_graph([const(1), const(2)])
    h = build_hierarchy(g, [1, 0, 2])
    [sc] = h.shortcut_ids()
    assert (h.edges[sc].tail, h.edges[sc].head, h.edges[sc].middle) == (0, 2, 1)
    assert unpack_edge(h, sc) == [0, 1]
    parts, arrival = expand_edge(h, sc, 10.0)
    assert parts == [(0, 10.0), (1, 11.0)]
    assert arrival == pytest.approx(13.0)


def test_nested_shortcut_on_chain_unpacks_fully():
    g = chain_graph([ttf([(0, 10), (500, 30)]), const(2), const(3), const(4), const(5)])
    h = build_hierarchy(g, [1, 2, 3, 4, 0, 5])
    top = [i for i in h.shortcut_ids() if (h.edges[i].tail, h.edges[i].head) == (0, 5)]
    assert len(top) == 1
    assert unpack_edge(h, top[0]) == [0, 1, 2, 3, 4]
    assert unpack_edge(h, top[0], tau=250.0) == [0, 1, 2, 3, 4]
    assert unpack_all(h, top[0]) == {0, 1, 2, 3, 4}


def test_parallel_constituents_resolved_by_departure_time():
    # two parallel 0->1 edges, each faster on half of the period
    morning = ttf([(0, 10), (500, 50)])
    evening = ttf([(0, 50), (500, 10)])
    g = build_graph(3, [(0, 1, morning), (0, 1, evening), (1, 2, const(1))], PERIOD)
    h = build_hierarchy(g, [1, 0, 2])
    [sc] = h.shortcut_ids()
    assert unpack_edge(h, sc, tau=0.0) == [0, 2]
    assert unpack_edge(h, sc, tau=500.0) == [1, 2]
    assert unpack_all(h, sc) == {0, 1, 2}


def test_untimed_unpacking_is_one_expansion_not_the_envelope():
    morning = ttf([(0, 10), (500, 50)])
    evening = ttf([(0, 50), (500, 10)])
    g = build_graph(3, [(0, 1, morning), (0, 1, evening), (1, 2, const(1))], PERIOD)
    h = build_hierarchy(g, [1, 0, 2])
    [sc] = h.shortcut_ids()
    assert unpack_edge(h, sc) == [0, 2]
    weight = h.edges[sc].weight
    assert evaluate(weight, 500.0) == pytest.approx(11.0)
    assert evaluate(morning, 500.0) + 1.0 == pytest.approx(51.0)
    _, arrival = expand_edge(h, sc, 500.0)
    assert arrival - 500.0 == pytest.approx(evaluate(weight, 500.0))


def test_hierarchy_split_and_stats():
    g = chain_graph([const(1), const(2)])
    h = build_hierarchy(g, [1, 0, 2])
    assert h.up_ids == [1, 2]           # 1->2 and shortcut 0->2 go up
    assert h.down_ids == [0]
    assert [a.head for a in h.down_in[1]] == [0]
    stats = h.stats()
    assert stats["shortcuts"] == 1
    assert stats["shortcut_points"] == 1
    assert stats["mean_points_per_shortcut"] == 1.0


def test_hierarchy_validation_catches_bad_middle():
    g = chain_graph([const(1), const(2)])
    edges = [HierarchyEdge(0, 1, const(1), original=0),
             HierarchyEdge(1, 2, const(2), original=1),
             HierarchyEdge(0, 2, const(3), middle=1)]
    with pytest.raises(ValidationError):
        Hierarchy(g, [0, 1, 2], edges)       # middle 1 ranks above tail 0


def test_exact_hierarchy_rejects_bounds():
    g = chain_graph([const(1), const(2)])
    edges = [HierarchyEdge(0, 1, const(1), original=0),
             HierarchyEdge(1, 2, const(2), original=1),
             HierarchyEdge(0, 2, BoundPair(const(2), const(4)), middle=1)]
    with pytest.raises(ValidationError):
        Hierarchy(g, [1, 0, 2], edges, mode="exact")
    assert Hierarchy(g, [1, 0, 2], edges, mode="approx", epsilon=1.0).stats()["shortcuts"] == 1


def test_path_result_consistency():
    g = chain_graph([const(1), const(2)])
    good = PathResult((0, 1), (5.0, 6.0), 5.0, 8.0)
    assert good.travel_time == 3.0
    assert good.is_consistent(g)
    assert not PathResult((0, 1), (5.0, 6.0), 5.0, 9.0).is_consistent(g)
    assert not PathResult((1, 0), (5.0, 7.0), 5.0, 8.0).is_consistent(g)
