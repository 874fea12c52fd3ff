from scripts.connectors import (
    adjacency_view,
    participation_target,
    rule_indirect,
    rule_marked,
    rule_no_marked_neighbor,
)
from scripts.graph_access import Graph, QueryCounter
from scripts.partition import cluster_of
from tests.builders import make_params, make_source, path


def _clusters(g, src, params, *vertices):
    ctr = QueryCounter()
    return ctr, [cluster_of(g, src, params, v, ctr) for v in vertices]


def test_view_of_a_single_boundary_edge():
    g = path(4)
    src = make_source(centers={0, 3}, ell=1)
    params = make_params(g, src, k=10)
    ctr, (a,) = _clusters(g, src, params, 0)
    view = adjacency_view(g, src, params, a, ctr)
    assert view.adjacent_cells == frozenset({3})
    assert [b.edge for b in view.boundary] == [(1, 2)]
    assert view.min_edge_into_cell(3) == (1, 2)
    assert view.min_edge_into_cell(0) is None


def test_view_picks_rank_minimum_edge_per_cell():
    g = Graph.from_edges(8, [(0, 1), (0, 2), (1, 6), (2, 5), (5, 7), (6, 7)], 2)
    src = make_source(centers={0, 7}, ell=1)
    params = make_params(g, src, k=10)
    ctr, (a, b) = _clusters(g, src, params, 0, 7)
    view = adjacency_view(g, src, params, a, ctr)
    assert [x.edge for x in view.boundary] == [(1, 6), (2, 5)]
    assert view.min_edge_into_cell(7) == (1, 6)
    assert view.min_edge_into(b.members) == (1, 6)


def test_view_skips_remote_and_same_cell_neighbors():
    # 0-1-2-3-4-5: center 0 with ell=1 covers {0, 1}; the rest is remote.
    g = path(6)
    src = make_source(centers={0}, ell=1)
    params = make_params(g, src, k=1)
    ctr, (one,) = _clusters(g, src, params, 1)
    assert one.kind == "singleton"
    view = adjacency_view(g, src, params, one, ctr)
    assert view.boundary == ()
    assert view.adjacent_cells == frozenset()


def test_isolated_cell_has_no_adjacent_cells():
    g = Graph.from_edges(2, [], 2)
    src = make_source(centers={0, 1}, ell=1)
    params = make_params(g, src, k=2)
    ctr, (a,) = _clusters(g, src, params, 0)
    assert adjacency_view(g, src, params, a, ctr).adjacent_cells == frozenset()


def test_marked_adjacent_cells_follow_marks(indirect_scenario):
    g, src, params = indirect_scenario
    ctr, (zero, one) = _clusters(g, src, params, 0, 1)
    assert adjacency_view(g, src, params, zero, ctr).marked_adjacent_cells == frozenset({2})
    assert adjacency_view(g, src, params, one, ctr).marked_adjacent_cells == frozenset({3})


def test_participation_lands_in_the_marked_cluster(indirect_scenario):
    g, src, params = indirect_scenario
    ctr, (zero,) = _clusters(g, src, params, 0)
    target = participation_target(g, src, params, zero, 2, ctr)
    assert target.root == 2 and target.marked
    assert participation_target(g, src, params, zero, 2, QueryCounter()) == target


def test_rule_marked():
    g = path(3)
    src = make_source(centers={0, 1, 2}, marks={1}, ell=1)
    params = make_params(g, src, k=3)
    ctr, (zero, one) = _clusters(g, src, params, 0, 1)
    view_zero = adjacency_view(g, src, params, zero, ctr)
    view_one = adjacency_view(g, src, params, one, ctr)
    assert rule_marked(one, zero, (0, 1), view_zero)
    assert not rule_marked(zero, one, (0, 1), view_one)


def test_rule_marked_needs_the_minimum_parallel_edge():
    # Two edges between cells {0, 1} and {2, 3}; only (0, 3) is rank-minimum.
    g = Graph.from_edges(4, [(0, 1), (0, 3), (1, 2), (2, 3)], 2)
    src = make_source(centers={0, 3}, marks={3}, ell=1)
    params = make_params(g, src, k=4)
    ctr, (a, b) = _clusters(g, src, params, 3, 0)
    view_b = adjacency_view(g, src, params, b, ctr)
    assert rule_marked(a, b, (0, 3), view_b)
    assert not rule_marked(a, b, (1, 2), view_b)


def test_rule_no_marked_neighbor(c8_two_cells):
    g, src, params = c8_two_cells
    ctr, (left, right) = _clusters(g, src, params, 0, 4)
    view_left = adjacency_view(g, src, params, left, ctr)
    view_right = adjacency_view(g, src, params, right, ctr)
    assert rule_no_marked_neighbor(left, right, (2, 3), view_left)
    assert not rule_no_marked_neighbor(left, right, (5, 6), view_left)
    assert not rule_no_marked_neighbor(right, left, (5, 6), view_right)


def test_rule_no_marked_neighbor_blocked_by_a_mark():
    g = path(3)
    src = make_source(centers={0, 1, 2}, marks={2}, ell=1)
    params = make_params(g, src, k=3)
    ctr, (one, zero) = _clusters(g, src, params, 1, 0)
    assert not rule_no_marked_neighbor(one, zero, (0, 1), adjacency_view(g, src, params, one, ctr))
    assert rule_no_marked_neighbor(zero, one, (0, 1), adjacency_view(g, src, params, zero, ctr))


def test_rule_indirect_accepts_when_own_cell_wins(indirect_scenario):
    g, src, params = indirect_scenario
    ctr, (zero, one) = _clusters(g, src, params, 0, 1)
    trace = []
    assert rule_indirect(g, src, params, zero, one, (0, 1), ctr, trace=trace)
    assert trace[-1]["marked_cell"] == 2
    assert trace[-1]["common_cells"] == [0]
    assert trace[-1]["winner"] == 0


def test_rule_indirect_rejects_when_another_cell_outranks(outranked_scenario):
    g, src, params = outranked_scenario
    ctr, (zero, one) = _clusters(g, src, params, 0, 1)
    trace = []
    assert not rule_indirect(g, src, params, zero, one, (0, 1), ctr, trace=trace)
    assert trace[-1]["common_cells"] == [0, 3, 4]
    assert trace[-1]["winner"] == 3
    assert not rule_indirect(g, src, params, one, zero, (0, 1), ctr)


def test_rule_indirect_without_marked_neighbors(c8_two_cells):
    g, src, params = c8_two_cells
    ctr, (left, right) = _clusters(g, src, params, 0, 4)
    assert not rule_indirect(g, src, params, left, right, (2, 3), ctr)
