"""Incidence-list query model with exact probe accounting.

Every algorithmic read of the graph goes through `neighbor`, which charges one
probe to the caller's QueryCounter. The Graph object keeps full sorted lists so
loading and validation are cheap; only the probes an algorithm performs count.
"""

import logging
import os
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Tuple

import networkx as nx

from scripts.errors import GraphInputError, GraphLoadError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
VertexFilter = Callable[[int], bool]


def edge_key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def edge_rank_less(e1: Edge, e2: Edge) -> bool:
    """Strict edge order: compare min endpoints, then max endpoints."""
    return edge_key(*e1) < edge_key(*e2)


@dataclass(frozen=True)
class Graph:
    n: int
    delta_max: int
    adjacency: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 0 or len(self.adjacency) != self.n:
            raise GraphInputError(f"adjacency has {len(self.adjacency)} lists for n={self.n}")
        if self.delta_max < 0:
            raise GraphInputError("delta_max must be nonnegative")
        for v, nbrs in enumerate(self.adjacency):
            if len(nbrs) > self.delta_max:
                raise GraphInputError(f"vertex {v} has degree {len(nbrs)} > {self.delta_max}")
            prev = -1
            for w in nbrs:
                if not 0 <= w < self.n:
                    raise GraphInputError(f"vertex {v} lists out-of-range neighbor {w}")
                if w == v:
                    raise GraphInputError(f"self-loop at vertex {v}")
                if w <= prev:
                    raise GraphInputError(f"neighbors of {v} are not strictly ascending")
                prev = w
        for v, nbrs in enumerate(self.adjacency):
            for w in nbrs:
                if not _contains(self.adjacency[w], v):
                    raise GraphInputError(f"asymmetric adjacency: {v} lists {w} but not vice versa")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge], delta_max: Optional[int] = None) -> "Graph":
        lists: List[List[int]] = [[] for _ in range(n)]
        seen = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphInputError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphInputError(f"self-loop at vertex {u}")
            key = edge_key(u, v)
            if key in seen:
                raise GraphInputError(f"parallel edge {key}")
            seen.add(key)
            lists[u].append(v)
            lists[v].append(u)
        observed = max((len(l) for l in lists), default=0)
        if delta_max is None:
            delta_max = observed
        return cls(n=n, delta_max=delta_max, adjacency=tuple(tuple(sorted(l)) for l in lists))

    @property
    def m(self) -> int:
        return sum(len(l) for l in self.adjacency) // 2

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < self.n and _contains(self.adjacency[u], v)

    def edges(self) -> Iterator[Edge]:
        """Edges in rank order."""
        for u, nbrs in enumerate(self.adjacency):
            for w in nbrs:
                if w > u:
                    yield (u, w)

    def to_networkx(self, edges: Optional[Iterable[Edge]] = None) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges() if edges is None else edges)
        return graph


def _contains(sorted_list: Tuple[int, ...], x: int) -> bool:
    i = bisect_left(sorted_list, x)
    return i < len(sorted_list) and sorted_list[i] == x


@dataclass
class QueryCounter:
    """Probe counter for one oracle call; `scratch` holds that call's memo tables."""

    count: int = 0
    scratch: Dict[str, Dict[Any, Any]] = field(default_factory=dict)

    def memo(self, name: str) -> Dict[Any, Any]:
        return self.scratch.setdefault(name, {})

    def reset(self) -> None:
        self.count = 0
        self.scratch.clear()


def neighbor(g: Graph, v: int, i: int, ctr: QueryCounter) -> Optional[int]:
    """The i-th neighbor of v (1-based, ascending id), or None if deg(v) < i."""
    if not 0 <= v < g.n:
        raise GraphInputError(f"vertex {v} out of range [0, {g.n})")
    if not 1 <= i <= g.delta_max:
        raise GraphInputError(f"neighbor index {i} out of range [1, {g.delta_max}]")
    ctr.count += 1
    nbrs = g.adjacency[v]
    return nbrs[i - 1] if i <= len(nbrs) else None


def neighbors(g: Graph, v: int, ctr: QueryCounter) -> Tuple[int, ...]:
    cache = ctr.memo("adjacency")
    hit = cache.get(v)
    if hit is not None:
        return hit
    found: List[int] = []
    for i in range(1, g.delta_max + 1):
        w = neighbor(g, v, i, ctr)
        if w is None:
            break
        found.append(w)
    result = tuple(found)
    cache[v] = result
    return result


def bfs_levels(
    g: Graph,
    v: int,
    radius: Optional[int],
    ctr: QueryCounter,
    keep: Optional[VertexFilter] = None,
) -> Iterator[Tuple[int, List[int]]]:
    """Yield (distance, ascending vertex list) level by level.

    Expansion is lazy: a consumer that stops after level d never pays for the
    probes of level d + 1.
    """
    if not 0 <= v < g.n:
        raise GraphInputError(f"vertex {v} out of range [0, {g.n})")
    if keep is not None and not keep(v):
        return
    seen = {v}
    frontier = [v]
    depth = 0
    yield 0, frontier
    while frontier and (radius is None or depth < radius):
        nxt: List[int] = []
        for x in frontier:
            for w in neighbors(g, x, ctr):
                if w in seen:
                    continue
                seen.add(w)
                if keep is not None and not keep(w):
                    continue
                nxt.append(w)
        depth += 1
        if not nxt:
            return
        nxt.sort()
        frontier = nxt
        yield depth, frontier


def ball(
    g: Graph,
    v: int,
    radius: int,
    cap: Optional[int],
    keep: Optional[VertexFilter],
    ctr: QueryCounter,
) -> List[Tuple[int, int]]:
    """Vertices within `radius` hops of v as (vertex, distance), sorted by (distance, id).

    `keep` restricts the search to a vertex subset (e.g. the remote set); the
    result is truncated to the first `cap` entries.
    """
    if radius < 0:
        raise GraphInputError(f"radius must be nonnegative, got {radius}")
    if cap is not None and cap < 1:
        raise GraphInputError(f"cap must be >= 1, got {cap}")
    out: List[Tuple[int, int]] = []
    for depth, level in bfs_levels(g, v, radius, ctr, keep):
        out.extend((x, depth) for x in level)
        if cap is not None and len(out) >= cap:
            break
    return out if cap is None else out[:cap]


def parse_graph(text: str) -> Graph:
    header: Optional[Tuple[int, int, int]] = None
    header_line = 0
    edges: List[Edge] = []
    prev: Optional[Edge] = None
    degrees: List[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise GraphLoadError(f"non-integer token in {line!r}", lineno)
        if header is None:
            if len(nums) != 3 or min(nums) < 0:
                raise GraphLoadError("header must be 'n m delta' with nonnegative integers", lineno)
            header = (nums[0], nums[1], nums[2])
            header_line = lineno
            degrees = [0] * header[0]
            continue
        n, _, delta_max = header
        if len(nums) != 2:
            raise GraphLoadError(f"edge line must have two vertices, got {line!r}", lineno)
        u, v = nums
        if u == v:
            raise GraphLoadError(f"self-loop at vertex {u}", lineno)
        if not (0 <= u < v < n):
            raise GraphLoadError(f"edge must satisfy 0 <= u < v < {n}, got {u} {v}", lineno)
        if prev is not None and (u, v) <= prev:
            kind = "duplicate edge" if (u, v) == prev else "edges not sorted by rank"
            raise GraphLoadError(f"{kind}: {u} {v}", lineno)
        degrees[u] += 1
        degrees[v] += 1
        for x in (u, v):
            if degrees[x] > delta_max:
                raise GraphLoadError(f"vertex {x} exceeds degree bound {delta_max}", lineno)
        edges.append((u, v))
        prev = (u, v)
    if header is None:
        raise GraphLoadError("missing header line", 1)
    n, m, delta_max = header
    if len(edges) != m:
        raise GraphLoadError(f"header declares {m} edges, found {len(edges)}", header_line)
    return Graph.from_edges(n, edges, delta_max)


def dumps_graph(g: Graph, edges: Optional[Iterable[Edge]] = None) -> str:
    chosen = sorted(edge_key(u, v) for u, v in (g.edges() if edges is None else edges))
    lines = [f"{g.n} {len(chosen)} {g.delta_max}"]
    lines.extend(f"{u} {v}" for u, v in chosen)
    return "\n".join(lines) + "\n"


def load_graph(path: str) -> Graph:
    try:
        with open(os.path.expanduser(path), "rb") as handle:
            data = handle.read()
    except OSError as e:
        raise GraphLoadError(f"cannot read {path}: {e}")
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise GraphLoadError(f"not valid UTF-8 (byte 0x{data[e.start]:02x})", line=data.count(b"\n", 0, e.start) + 1)
    g = parse_graph(text)
    logger.debug("loaded graph %s: n=%d m=%d delta=%d", path, g.n, g.m, g.delta_max)
    return g


def save_graph(g: Graph, path: str, edges: Optional[Iterable[Edge]] = None) -> None:
    with open(os.path.expanduser(path), "w", encoding="utf-8") as handle:
        handle.write(dumps_graph(g, edges))
