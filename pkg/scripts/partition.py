"""Local reconstruction of centers, Voronoi BFS trees and clusters.

Remoteness and center distances are measured in G. Trees and clusters live on
the non-remote vertices only; every vertex on a shortest path to a center is
itself non-remote and shares that center, which `bfs_parent` asserts.

All lookups are memoized in the counter's call-private scratch, never across
oracle calls.
"""

import logging
from dataclasses import dataclass
from typing import FrozenSet, List, Literal, Optional, Tuple

from scripts.errors import GraphInputError, InvariantViolation
from scripts.graph_access import Graph, QueryCounter, bfs_levels, neighbors
from scripts.randomness import Params, RandomSource, is_center, is_marked

logger = logging.getLogger(__name__)

ClusterKind = Literal["whole-cell", "singleton", "subtree"]


@dataclass(frozen=True)
class CenterInfo:
    vertex: int
    center: Optional[int] = None
    dist: Optional[int] = None

    @property
    def remote(self) -> bool:
        return self.center is None

    def to_dict(self):
        if self.remote:
            return {"vertex": self.vertex, "status": "remote"}
        return {"vertex": self.vertex, "status": "assigned", "center": self.center, "dist": self.dist}


@dataclass(frozen=True)
class Cluster:
    center: int
    root: int
    members: FrozenSet[int]
    marked: bool
    kind: ClusterKind

    def to_dict(self):
        return {
            "center": self.center,
            "root": self.root,
            "members": sorted(self.members),
            "marked": self.marked,
            "kind": self.kind,
        }


def find_center(g: Graph, src: RandomSource, params: Params, v: int, ctr: QueryCounter) -> CenterInfo:
    """Nearest center within ell hops (minimum id on ties), or remote."""
    cache = ctr.memo("center")
    hit = cache.get(v)
    if hit is not None:
        return hit
    info = CenterInfo(vertex=v)
    for depth, level in bfs_levels(g, v, params.ell, ctr):
        found = [x for x in level if is_center(src, params, x)]
        if found:
            info = CenterInfo(vertex=v, center=min(found), dist=depth)
            break
    cache[v] = info
    return info


def is_remote(g: Graph, src: RandomSource, params: Params, v: int, ctr: QueryCounter) -> bool:
    return find_center(g, src, params, v, ctr).remote


def _require_assigned(g: Graph, src: RandomSource, params: Params, u: int, ctr: QueryCounter) -> CenterInfo:
    info = find_center(g, src, params, u, ctr)
    if info.remote:
        raise GraphInputError(f"vertex {u} is remote; it belongs to no Voronoi cell")
    return info


def bfs_parent(g: Graph, src: RandomSource, params: Params, u: int, ctr: QueryCounter) -> Optional[int]:
    cache = ctr.memo("parent")
    if u in cache:
        return cache[u]
    info = _require_assigned(g, src, params, u, ctr)
    parent: Optional[int] = None
    if info.dist > 0:
        for w in neighbors(g, u, ctr):
            other = find_center(g, src, params, w, ctr)
            if other.center == info.center and other.dist == info.dist - 1:
                parent = w
                break
        else:
            raise InvariantViolation(
                f"vertex {u} at distance {info.dist} from center {info.center} has no parent candidate"
            )
    cache[u] = parent
    return parent


def bfs_children(g: Graph, src: RandomSource, params: Params, u: int, ctr: QueryCounter) -> List[int]:
    cache = ctr.memo("children")
    hit = cache.get(u)
    if hit is not None:
        return hit
    info = _require_assigned(g, src, params, u, ctr)
    children: List[int] = []
    for w in neighbors(g, u, ctr):
        other = find_center(g, src, params, w, ctr)
        if other.center != info.center or other.dist != info.dist + 1:
            continue
        if bfs_parent(g, src, params, w, ctr) == u:
            children.append(w)
    cache[u] = children
    return children


def subtree_probe(
    g: Graph,
    src: RandomSource,
    params: Params,
    u: int,
    ctr: QueryCounter,
    cap: Optional[int] = None,
) -> Tuple[int, Optional[FrozenSet[int]]]:
    """Explore T(u) until `cap` (default k) vertices are seen.

    Returns (cap, None) when |T(u)| >= cap, else (|T(u)|, members).
    """
    cap = params.k if cap is None else cap
    cache = ctr.memo("subtree")
    key = (u, cap)
    hit = cache.get(key)
    if hit is not None:
        return hit
    _require_assigned(g, src, params, u, ctr)
    seen = [u]
    stack = [u]
    result: Tuple[int, Optional[FrozenSet[int]]]
    while stack and len(seen) < cap:
        x = stack.pop()
        for child in bfs_children(g, src, params, x, ctr):
            seen.append(child)
            stack.append(child)
            if len(seen) >= cap:
                break
    if len(seen) >= cap:
        result = (cap, None)
    else:
        result = (len(seen), frozenset(seen))
    cache[key] = result
    return result


def cluster_of(g: Graph, src: RandomSource, params: Params, v: int, ctr: QueryCounter) -> Cluster:
    cache = ctr.memo("cluster")
    hit = cache.get(v)
    if hit is not None:
        return hit
    info = _require_assigned(g, src, params, v, ctr)
    center = info.center
    marked = is_marked(src, params, center)

    # A cell of at most k vertices is a single cluster.
    _, cell = subtree_probe(g, src, params, center, ctr, cap=params.k + 1)
    if cell is not None:
        cluster = Cluster(center=center, root=center, members=cell, marked=marked, kind="whole-cell")
    else:
        _, members = subtree_probe(g, src, params, v, ctr)
        if members is None:
            cluster = Cluster(center=center, root=v, members=frozenset([v]), marked=marked, kind="singleton")
        else:
            u = v
            for _ in range(info.dist + 1):
                parent = bfs_parent(g, src, params, u, ctr)
                if parent is None:
                    raise InvariantViolation(f"cell of {center} exceeds k but T({u}) < k at the root")
                _, above = subtree_probe(g, src, params, parent, ctr)
                if above is None:
                    break
                u, members = parent, above
            cluster = Cluster(center=center, root=u, members=members, marked=marked, kind="subtree")

    logger.debug("cluster of %d: %s rooted at %d (%d members)", v, cluster.kind, cluster.root, len(cluster.members))
    for member in cluster.members:
        cache[member] = cluster
    return cluster
