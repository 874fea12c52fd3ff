from scripts.config import Overrides
from scripts.graph_access import Graph
from scripts.randomness import Fixture, RandomSource, derive_params

TEST_SEED = "5eed" * 16


def path(n: int, delta_max: int = 2) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], delta_max)


def cycle(n: int, delta_max: int = 2) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], delta_max)


def make_source(seed: str = TEST_SEED, **fixture) -> RandomSource:
    for key in ("centers", "marks"):
        if fixture.get(key) is not None:
            fixture[key] = frozenset(fixture[key])
    return RandomSource.from_hex(seed, Fixture(**fixture) if fixture else None)


def make_params(g: Graph, src: RandomSource, eps: float = 1.0, **overrides):
    return derive_params(g.n, max(2, g.delta_max), eps, src=src, overrides=Overrides(**overrides))


