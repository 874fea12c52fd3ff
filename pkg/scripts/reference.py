"""Global (non-local) construction of the same spanner, used as the test oracle.

Everything here is computed over the whole graph at once: a multi-source BFS
for centers, subtree sizes bottom-up, cluster-level adjacency tables, the three
inter-cluster rules in their cluster-centric form, exponential-shift edges on
the remote set, and every remote/non-remote edge.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

import networkx as nx

from scripts.graph_access import Edge, Graph, edge_key
from scripts.randomness import Params, RandomSource, cell_order_key, exp_radius, is_center, is_marked

logger = logging.getLogger(__name__)


@dataclass
class ReferencePartition:
    centers: List[int]
    center_of: Dict[int, int]
    dist: Dict[int, int]
    remote: FrozenSet[int]
    parent: Dict[int, Optional[int]]
    subtree_size: Dict[int, int]
    cluster_root: Dict[int, int]
    cluster_kind: Dict[int, str]
    clusters: Dict[int, FrozenSet[int]]
    marked_cells: FrozenSet[int]

    def cells(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = defaultdict(list)
        for v, c in self.center_of.items():
            out[c].append(v)
        return dict(out)

    def bfs_edges(self) -> Set[Edge]:
        return {edge_key(v, p) for v, p in self.parent.items() if p is not None}


@dataclass
class ReferenceResult:
    edges: FrozenSet[Edge]
    attribution: Dict[Edge, str]
    partition: ReferencePartition
    en_radius_violation: bool
    boundary_edges: int
    counts: Dict[str, int] = field(default_factory=dict)


def build_partition(g: Graph, src: RandomSource, params: Params) -> ReferencePartition:
    centers = [v for v in range(g.n) if is_center(src, params, v)]
    center_of: Dict[int, int] = {c: c for c in centers}
    dist: Dict[int, int] = {c: 0 for c in centers}
    frontier = sorted(centers)
    depth = 0
    while frontier and depth < params.ell:
        # Best (min-id) center over all previous-level neighbors at the new level.
        candidates: Dict[int, int] = {}
        for x in frontier:
            for w in g.adjacency[x]:
                if w in dist:
                    continue
                c = center_of[x]
                if w not in candidates or c < candidates[w]:
                    candidates[w] = c
        depth += 1
        for w, c in candidates.items():
            center_of[w] = c
            dist[w] = depth
        frontier = sorted(candidates)
    remote = frozenset(v for v in range(g.n) if v not in center_of)

    parent: Dict[int, Optional[int]] = {}
    for v, c in center_of.items():
        if dist[v] == 0:
            parent[v] = None
            continue
        options = [w for w in g.adjacency[v] if center_of.get(w) == c and dist[w] == dist[v] - 1]
        parent[v] = min(options)

    subtree_size: Dict[int, int] = {v: 1 for v in center_of}
    for v in sorted(center_of, key=lambda x: -dist[x]):
        if parent[v] is not None:
            subtree_size[parent[v]] += subtree_size[v]

    cell_size: Dict[int, int] = defaultdict(int)
    for v, c in center_of.items():
        cell_size[c] += 1

    k = params.k
    cluster_root: Dict[int, int] = {}
    cluster_kind: Dict[int, str] = {}
    for v, c in center_of.items():
        if cell_size[c] <= k:
            root, kind = c, "whole-cell"
        elif subtree_size[v] >= k:
            root, kind = v, "singleton"
        else:
            root = v
            while subtree_size[parent[root]] < k:
                root = parent[root]
            kind = "subtree"
        cluster_root[v] = root
        cluster_kind[root] = kind

    members: Dict[int, Set[int]] = defaultdict(set)
    for v, root in cluster_root.items():
        members[root].add(v)
    return ReferencePartition(
        centers=centers,
        center_of=center_of,
        dist=dist,
        remote=remote,
        parent=parent,
        subtree_size=subtree_size,
        cluster_root=cluster_root,
        cluster_kind=cluster_kind,
        clusters={root: frozenset(ms) for root, ms in members.items()},
        marked_cells=frozenset(c for c in centers if is_marked(src, params, c)),
    )


def _inter_cluster_edges(g: Graph, src: RandomSource, part: ReferencePartition) -> Dict[Edge, str]:
    center_of = part.center_of
    root_of = part.cluster_root

    # Per cluster: rank-minimum edge into each adjacent cluster and each adjacent cell.
    min_to_cluster: Dict[int, Dict[int, Edge]] = defaultdict(dict)
    min_to_cell: Dict[int, Dict[int, Edge]] = defaultdict(dict)
    for u, w in g.edges():
        if u not in center_of or w not in center_of or center_of[u] == center_of[w]:
            continue
        for a, b in ((u, w), (w, u)):
            ra, rb, cb = root_of[a], root_of[b], center_of[b]
            e = (u, w)
            if rb not in min_to_cluster[ra] or e < min_to_cluster[ra][rb]:
                min_to_cluster[ra][rb] = e
            if cb not in min_to_cell[ra] or e < min_to_cell[ra][cb]:
                min_to_cell[ra][cb] = e

    def cell_of_root(root: int) -> int:
        return center_of[root]

    def other_end(e: Edge, root: int) -> int:
        return e[1] if root_of[e[0]] == root else e[0]

    chosen: Dict[Edge, str] = {}

    def take(e: Edge, rule: str) -> None:
        chosen.setdefault(e, rule)

    # Connect every cluster to every adjacent marked cluster.
    for ra, nbrs in min_to_cluster.items():
        for rb, e in nbrs.items():
            if cell_of_root(rb) in part.marked_cells:
                take(e, "rule-a")

    # Clusters with no adjacent marked cell connect to each adjacent cell.
    for ra, cells in min_to_cell.items():
        if any(c in part.marked_cells for c in cells):
            continue
        for e in cells.values():
            take(e, "rule-b")

    # B participates in C(C) for each adjacent marked cell; A adjacent to B takes
    # min E(A, Vor(B)) when it lands in B and Vor(B) wins the rank contest.
    for rb, cells in min_to_cell.items():
        vor_b = cell_of_root(rb)
        for cell, e_bc in cells.items():
            if cell not in part.marked_cells:
                continue
            rc = root_of[other_end(e_bc, rb)]
            cells_c = set(min_to_cell.get(rc, {}))
            for ra in min_to_cluster[rb]:
                e_a = min_to_cell[ra].get(vor_b)
                if e_a is None or root_of[other_end(e_a, ra)] != rb:
                    continue
                common = set(min_to_cell[ra]) & cells_c
                if vor_b in common and min(common, key=lambda c: cell_order_key(src, c)) == vor_b:
                    take(e_a, "rule-c")
    return chosen


def _en_edges(g: Graph, src: RandomSource, params: Params, remote: FrozenSet[int]) -> Tuple[Set[Edge], bool]:
    sub = nx.Graph()
    sub.add_nodes_from(remote)
    sub.add_edges_from((u, w) for u, w in g.edges() if u in remote and w in remote)
    h = params.h
    dists = {v: nx.single_source_shortest_path_length(sub, v, cutoff=h) for v in remote}
    radii = {v: exp_radius(src, params, v) for v in remote}
    violation = any(r >= h for r in radii.values())

    edges: Set[Edge] = set()
    for v in remote:
        shifted = {u: radii[u] - d for u, d in dists[v].items()}
        threshold = max(shifted.values()) - 1.0
        for u, m_u in shifted.items():
            if u == v or m_u < threshold:
                continue
            d = dists[v][u]
            via = min(x for x in sub.neighbors(v) if dists[x].get(u) == d - 1)
            edges.add(edge_key(v, via))
    return edges, violation


def reference_spanner(g: Graph, src: RandomSource, params: Params) -> ReferenceResult:
    part = build_partition(g, src, params)
    attribution: Dict[Edge, str] = {}
    for e in part.bfs_edges():
        attribution[e] = "bfs-tree"
    for e, rule in _inter_cluster_edges(g, src, part).items():
        attribution.setdefault(e, rule)
    en, violation = _en_edges(g, src, params, part.remote)
    for e in en:
        attribution.setdefault(e, "en")
    boundary = 0
    for u, w in g.edges():
        if (u in part.remote) != (w in part.remote):
            attribution[(u, w)] = "boundary"
            boundary += 1
    counts: Dict[str, int] = defaultdict(int)
    for rule in attribution.values():
        counts[rule] += 1
    if violation:
        logger.warning("exponential radius reached h=%d for seed %s", params.h, src.hex[:12])
    return ReferenceResult(
        edges=frozenset(attribution),
        attribution=attribution,
        partition=part,
        en_radius_violation=violation,
        boundary_edges=boundary,
        counts=dict(counts),
    )
