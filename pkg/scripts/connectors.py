"""Inter-cluster edge selection: adjacency views, participation, and the three rules.

Each rule is a local predicate on one candidate edge. The oracle evaluates them
for both role assignments of the edge's clusters; their disjunction is the set
of selected inter-cell edges.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, List, NamedTuple, Optional, Tuple

from scripts.graph_access import Edge, Graph, QueryCounter, edge_key, neighbors
from scripts.partition import Cluster, cluster_of, find_center
from scripts.randomness import Params, RandomSource, cell_order_key, is_marked

logger = logging.getLogger(__name__)

RuleTrace = Dict[str, Any]


class BoundaryEdge(NamedTuple):
    edge: Edge
    inside: int
    outside: int
    cell: int


@dataclass(frozen=True)
class AdjacencyView:
    cluster: Cluster
    boundary: Tuple[BoundaryEdge, ...]
    min_edge_by_cell: Dict[int, BoundaryEdge]
    adjacent_cells: FrozenSet[int]
    marked_adjacent_cells: FrozenSet[int]

    def min_edge_into(self, members: FrozenSet[int]) -> Optional[Edge]:
        """Rank-minimum edge from this cluster into the vertex set `members`."""
        for b in self.boundary:
            if b.outside in members:
                return b.edge
        return None

    def min_edge_into_cell(self, cell: int) -> Optional[Edge]:
        b = self.min_edge_by_cell.get(cell)
        return b.edge if b is not None else None


def adjacency_view(g: Graph, src: RandomSource, params: Params, cluster: Cluster, ctr: QueryCounter) -> AdjacencyView:
    cache = ctr.memo("view")
    hit = cache.get(cluster.root)
    if hit is not None:
        return hit
    found: List[BoundaryEdge] = []
    for a in sorted(cluster.members):
        for w in neighbors(g, a, ctr):
            if w in cluster.members:
                continue
            info = find_center(g, src, params, w, ctr)
            # Remote neighbors go through the boundary rule; same-cell ones through the BFS tree.
            if info.remote or info.center == cluster.center:
                continue
            found.append(BoundaryEdge(edge=edge_key(a, w), inside=a, outside=w, cell=info.center))
    found.sort(key=lambda b: b.edge)
    by_cell: Dict[int, BoundaryEdge] = {}
    for b in found:
        by_cell.setdefault(b.cell, b)
    cells = frozenset(by_cell)
    view = AdjacencyView(
        cluster=cluster,
        boundary=tuple(found),
        min_edge_by_cell=by_cell,
        adjacent_cells=cells,
        marked_adjacent_cells=frozenset(c for c in cells if is_marked(src, params, c)),
    )
    cache[cluster.root] = view
    return view


def participation_target(
    g: Graph,
    src: RandomSource,
    params: Params,
    b_cluster: Cluster,
    marked_cell: int,
    ctr: QueryCounter,
) -> Cluster:
    """The unique cluster C of `marked_cell` whose cluster-of-clusters B participates in."""
    view = adjacency_view(g, src, params, b_cluster, ctr)
    entry = view.min_edge_by_cell[marked_cell]
    return cluster_of(g, src, params, entry.outside, ctr)


def rule_marked(a: Cluster, b: Cluster, e: Edge, view_b: AdjacencyView) -> bool:
    return a.marked and view_b.min_edge_into(a.members) == edge_key(*e)


def rule_no_marked_neighbor(a: Cluster, b: Cluster, e: Edge, view_a: AdjacencyView) -> bool:
    if view_a.marked_adjacent_cells:
        return False
    return view_a.min_edge_into_cell(b.center) == edge_key(*e)


def rule_indirect(
    g: Graph,
    src: RandomSource,
    params: Params,
    a: Cluster,
    b: Cluster,
    e: Edge,
    ctr: QueryCounter,
    trace: Optional[List[RuleTrace]] = None,
) -> bool:
    """True iff A participates in some marked C such that Vor(A) is rank-minimum in
    Vor(dB) & Vor(dC) and e is rank-minimum in E(B, Vor(A))."""
    e = edge_key(*e)
    view_a = adjacency_view(g, src, params, a, ctr)
    view_b = adjacency_view(g, src, params, b, ctr)
    if view_b.min_edge_into_cell(a.center) != e:
        if trace is not None:
            trace.append({"reason": "not rank-minimum in E(B, Vor(A))", "min": view_b.min_edge_into_cell(a.center)})
        return False
    for marked_cell in sorted(view_a.marked_adjacent_cells):
        c = participation_target(g, src, params, a, marked_cell, ctr)
        view_c = adjacency_view(g, src, params, c, ctr)
        common = view_b.adjacent_cells & view_c.adjacent_cells
        winner = min(common, key=lambda cell: cell_order_key(src, cell)) if common else None
        if trace is not None:
            trace.append(
                {
                    "marked_cell": marked_cell,
                    "target_root": c.root,
                    "common_cells": sorted(common),
                    "winner": winner,
                    "ranks": {str(cell): str(cell_order_key(src, cell)[0]) for cell in sorted(common)},
                }
            )
        if winner == a.center:
            return True
    return False
