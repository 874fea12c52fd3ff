"""Deterministic test-corpus generators (one Graph per (kind, n, seed))."""

import hashlib
import logging
import math
import random
from typing import Callable, Dict, List, Optional, Set

from scripts.errors import GraphInputError
from scripts.graph_access import Edge, Graph, edge_key

logger = logging.getLogger(__name__)

MAX_REGULAR_ATTEMPTS = 1000


def _rng(kind: str, n: int, seed: int) -> random.Random:
    digest = hashlib.sha256(f"{kind}/{n}/{seed}".encode()).hexdigest()[:16]
    return random.Random(digest)


def path_graph(n: int, delta_max: int = 2, seed: int = 0) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], max(delta_max, 2))


def cycle_graph(n: int, delta_max: int = 2, seed: int = 0) -> Graph:
    if n < 3:
        raise GraphInputError("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], max(delta_max, 2))


def torus_graph(n: int, delta_max: int = 4, seed: int = 0) -> Graph:
    side = math.isqrt(n)
    if side * side != n or side < 3:
        raise GraphInputError(f"torus needs n = s*s with s >= 3, got {n}")
    edges: Set[Edge] = set()
    for r in range(side):
        for c in range(side):
            v = r * side + c
            edges.add(edge_key(v, r * side + (c + 1) % side))
            edges.add(edge_key(v, ((r + 1) % side) * side + c))
    return Graph.from_edges(n, sorted(edges), max(delta_max, 4))


def random_regular_graph(n: int, delta_max: int = 3, seed: int = 0) -> Graph:
    """Configuration model; pairings with loops or multi-edges are rejected and redrawn."""
    d = delta_max
    if (n * d) % 2 != 0 or not 0 <= d < n:
        raise GraphInputError(f"no {d}-regular graph on {n} vertices")
    rng = _rng("random-regular", n, seed)
    for attempt in range(MAX_REGULAR_ATTEMPTS):
        stubs = [v for v in range(n) for _ in range(d)]
        rng.shuffle(stubs)
        edges: Set[Edge] = set()
        ok = True
        it = iter(stubs)
        for s1, s2 in zip(it, it):
            e = edge_key(s1, s2)
            if s1 == s2 or e in edges:
                ok = False
                break
            edges.add(e)
        if ok:
            logger.debug("random %d-regular graph on %d vertices after %d attempts", d, n, attempt + 1)
            return Graph.from_edges(n, sorted(edges), d)
    raise GraphInputError(f"configuration model failed {MAX_REGULAR_ATTEMPTS} times for n={n}, d={d}")


def caterpillar_graph(n: int, delta_max: int = 4, seed: int = 0) -> Graph:
    """A spine path; every spine vertex carries up to delta_max - 2 random legs."""
    if delta_max < 3:
        raise GraphInputError("a caterpillar with legs needs delta_max >= 3")
    rng = _rng("caterpillar", n, seed)
    edges: List[Edge] = []
    spine: List[int] = [0]
    legs: Dict[int, int] = {0: 0}
    v = 1
    while v < n:
        owner = spine[-1]
        edges.append((owner, v))
        if legs[owner] < delta_max - 2 and rng.random() < 0.5:
            legs[owner] += 1
        else:
            spine.append(v)
            legs[v] = 0
        v += 1
    return Graph.from_edges(n, edges, delta_max)


def dumbbell_graph(n: int, delta_max: int = 4, seed: int = 0) -> Graph:
    """Two cliques of size <= delta_max joined by a long path."""
    s = min(delta_max, n // 3)
    if s < 2:
        raise GraphInputError(f"dumbbell needs n >= 6, got {n}")
    edges: List[Edge] = []
    left = list(range(s))
    right = list(range(n - s, n))
    for clique in (left, right):
        edges.extend((a, b) for i, a in enumerate(clique) for b in clique[i + 1 :])
    chain = [s - 1] + list(range(s, n - s)) + [n - s]
    edges.extend(zip(chain, chain[1:]))
    return Graph.from_edges(n, edges, max(delta_max, s))


GENERATORS: Dict[str, Callable[..., Graph]] = {
    "path": path_graph,
    "cycle": cycle_graph,
    "grid": torus_graph,
    "random-regular": random_regular_graph,
    "caterpillar": caterpillar_graph,
    "dumbbell": dumbbell_graph,
}


def generate(kind: str, n: int, delta_max: Optional[int] = None, seed: int = 0) -> Graph:
    try:
        fn = GENERATORS[kind]
    except KeyError:
        raise GraphInputError(f"unknown graph kind {kind!r}; choose from {sorted(GENERATORS)}")
    if delta_max is None:
        return fn(n, seed=seed)
    return fn(n, delta_max, seed)
