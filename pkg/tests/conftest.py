import pytest

from scripts.graph_access import Graph, QueryCounter
from tests.builders import cycle, make_params, make_source, path


@pytest.fixture
def ctr():
    return QueryCounter()


@pytest.fixture
def path3():
    return path(3)


@pytest.fixture
def cycle8():
    return cycle(8)


@pytest.fixture
def fixture_source():
    """Factory: fixture_source(centers=..., marks=..., ranks=..., radii=..., ell=...)."""
    return make_source


@pytest.fixture
def c8_two_cells(cycle8):
    """C_8 with centers {0, 4}, ell=2, k=8 and no marks: cells {0,1,2,6,7} and {3,4,5}."""
    src = make_source(centers={0, 4}, marks=set(), ell=2)
    return cycle8, src, make_params(cycle8, src, k=8)


@pytest.fixture
def indirect_scenario():
    """Every vertex a center, marks {2, 3}: edge (0, 1) is only kept by the indirect rule."""
    g = Graph.from_edges(4, [(0, 1), (0, 2), (1, 3)], 2)
    src = make_source(centers=set(range(4)), marks={2, 3}, ell=1)
    return g, src, make_params(g, src, k=4)


@pytest.fixture
def outranked_scenario():
    """A higher-ranked common neighbor cell blocks the indirect rule in both roles; (0, 1) is dropped."""
    g = Graph.from_edges(5, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 3), (2, 4)], 3)
    src = make_source(
        centers=set(range(5)),
        marks={2, 4},
        ranks={3: 0, 2: 1, 0: 2, 1: 3, 4: 4},
        ell=1,
    )
    return g, src, make_params(g, src, k=5)
