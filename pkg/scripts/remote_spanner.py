"""Exponential-shift spanner on the remote set, plus the remote/non-remote boundary rule.

Vertex v keeps the edge toward its shortest-path neighbor n_u(v) for every
source u whose shifted value m_u(v) = r_u - d_R(u, v) is within 1 of the
largest shifted value v sees (its own r_v included).
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Tuple

from scripts.errors import GraphInputError
from scripts.graph_access import Edge, Graph, QueryCounter, edge_key, neighbors
from scripts.partition import CenterInfo, find_center
from scripts.randomness import Params, RandomSource, exp_radius

logger = logging.getLogger(__name__)


class EnEntry(NamedTuple):
    u: int
    dist: int
    r_u: float
    m_u: float
    # Minimum-id neighbor of v on a shortest v -> u path inside R; None for u = v.
    via: Optional[int]


@dataclass(frozen=True)
class EnLocalView:
    v: int
    entries: Tuple[EnEntry, ...]

    def to_dict(self):
        return {
            "v": self.v,
            "entries": [
                {"u": e.u, "dist": e.dist, "r_u": e.r_u, "m_u": e.m_u, "via": e.via} for e in self.entries
            ],
        }


def _require_remote(g: Graph, src: RandomSource, params: Params, v: int, ctr: QueryCounter) -> None:
    if not find_center(g, src, params, v, ctr).remote:
        raise GraphInputError(f"vertex {v} is not remote")


def en_view(g: Graph, src: RandomSource, params: Params, v: int, ctr: QueryCounter) -> EnLocalView:
    cache = ctr.memo("en_view")
    hit = cache.get(v)
    if hit is not None:
        return hit
    _require_remote(g, src, params, v, ctr)

    # Layered BFS inside R that also carries, per vertex, the smallest first hop
    # among all shortest paths from v.
    dist: Dict[int, int] = {v: 0}
    via: Dict[int, Optional[int]] = {v: None}
    frontier = [v]
    depth = 0
    while frontier and depth < params.h:
        nxt: List[int] = []
        for x in frontier:
            for w in neighbors(g, x, ctr):
                if w in dist:
                    if dist[w] == depth + 1 and depth > 0 and via[x] < via[w]:
                        via[w] = via[x]
                    continue
                if not find_center(g, src, params, w, ctr).remote:
                    continue
                dist[w] = depth + 1
                via[w] = w if depth == 0 else via[x]
                nxt.append(w)
        depth += 1
        frontier = sorted(nxt)

    entries = []
    for u in sorted(dist, key=lambda x: (dist[x], x)):
        r_u = exp_radius(src, params, u)
        entries.append(EnEntry(u=u, dist=dist[u], r_u=r_u, m_u=r_u - dist[u], via=via[u]))
    view = EnLocalView(v=v, entries=tuple(entries))
    cache[v] = view
    return view


def en_edges(g: Graph, src: RandomSource, params: Params, v: int, ctr: QueryCounter) -> FrozenSet[Edge]:
    view = en_view(g, src, params, v, ctr)
    threshold = max(e.m_u for e in view.entries) - 1.0
    return frozenset(edge_key(v, e.via) for e in view.entries if e.u != v and e.m_u >= threshold)


def en_answer(g: Graph, src: RandomSource, params: Params, u: int, v: int, ctr: QueryCounter) -> bool:
    for x in (u, v):
        _require_remote(g, src, params, x, ctr)
    e = edge_key(u, v)
    return e in en_edges(g, src, params, u, ctr) or e in en_edges(g, src, params, v, ctr)


def boundary_answer(info_u: CenterInfo, info_v: CenterInfo) -> bool:
    return info_u.remote != info_v.remote
