import json
import math

import pytest

from scripts.config import Constants, Overrides
from scripts.errors import FixtureError, GraphInputError
from scripts.randomness import (
    Fixture,
    RandomSource,
    cell_order_key,
    cell_rank,
    derive_params,
    ell_interval,
    exp_radius,
    fixture_from_dict,
    fresh_seed,
    is_center,
    is_marked,
    load_fixture,
    radius_from_uniform,
    seed_from_hex,
    uniform_unit,
)
from tests.builders import TEST_SEED, make_source


@pytest.fixture
def src():
    return RandomSource.from_hex(TEST_SEED)


def test_ell_interval_for_4096():
    assert ell_interval(4096, 4, 1.0) == (24, 28)


def test_derive_params_draws_ell_inside_interval(src):
    params = derive_params(4096, 4, 1.0, src=src)
    assert 24 <= params.ell <= 28
    assert params.h == params.ell


def test_derive_params_is_deterministic(src):
    assert derive_params(4096, 4, 1.0, src=src) == derive_params(4096, 4, 1.0, src=RandomSource.from_hex(TEST_SEED))


def test_ell_draws_cover_the_interval():
    seen = {derive_params(4096, 4, 1.0, src=fresh_seed(RandomSource.from_hex(TEST_SEED), "ell", i)).ell for i in range(200)}
    assert seen == {24, 25, 26, 27, 28}


def test_derive_params_formulas(src):
    n, delta, eps = 4096, 4, 1.0
    params = derive_params(n, delta, eps, src=src, overrides=Overrides(ell=24))
    assert params.k == math.ceil(1.0 * n ** (1.0 / 3.0) * math.log(n) * 24 * delta / eps - 1e-9)
    assert params.q == pytest.approx(min(1.0, eps * n ** (-1.0 / 3.0) / math.log(n)))
    assert params.p == pytest.approx(1.0 / 16.0)
    assert params.delta == pytest.approx(1.0 / n)
    assert params.beta == pytest.approx(math.log(n * n) / 24)
    assert params.promise_flag


def test_promise_flag_is_logged(src, caplog):
    with caplog.at_level("WARNING", logger="scripts.randomness"):
        derive_params(64, 3, 1.0, src=src)
    assert "exceeds n" in caplog.text


def test_constants_scale_k_and_q(src):
    base = derive_params(4096, 4, 1.0, src=src, overrides=Overrides(ell=24))
    scaled = derive_params(4096, 4, 1.0, Constants(c_k=0.5, c_s=2.0), src=src, overrides=Overrides(ell=24))
    assert scaled.k < base.k
    assert scaled.q == pytest.approx(min(1.0, 2.0 * base.q))


def test_fixture_ell_beats_override_and_draw():
    src = make_source(ell=2)
    assert derive_params(4096, 4, 1.0, src=src).ell == 2
    assert derive_params(4096, 4, 1.0, src=src, overrides=Overrides(ell=7)).ell == 2


def test_overrides_replace_formulas(src):
    params = derive_params(100, 3, 0.5, src=src, overrides=Overrides(ell=3, k=8, q=0.1, p=0.25))
    assert (params.ell, params.k, params.q, params.p) == (3, 8, 0.1, 0.25)
    assert not params.promise_flag


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n=1, delta_max=3, eps=1.0),
        dict(n=10, delta_max=1, eps=1.0),
        dict(n=10, delta_max=3, eps=0.0),
        dict(n=10, delta_max=3, eps=1.0, constants=Constants(c_delta=0.5)),
        dict(n=10, delta_max=3, eps=1.0, overrides=Overrides(q=1.5)),
        dict(n=10, delta_max=3, eps=1.0, overrides=Overrides(k=0)),
    ],
)
def test_derive_params_rejects_bad_input(src, kwargs):
    with pytest.raises(GraphInputError):
        derive_params(src=src, **kwargs)


def test_derive_params_needs_a_source():
    with pytest.raises(GraphInputError):
        derive_params(10, 3, 1.0)


def test_zero_horizon_gives_zero_radii(src):
    params = derive_params(10, 3, 1.0, src=src, overrides=Overrides(ell=0))
    assert math.isinf(params.beta)
    assert exp_radius(src, params, 3) == 0.0
    assert params.k == 1


def test_k_formula_never_drops_below_one(src):
    assert derive_params(4096, 4, 1.0, src=src, overrides=Overrides(ell=0)).k == 1
    assert derive_params(4096, 4, 1.0, src=src, overrides=Overrides(ell=0, k=7)).k == 7


def test_is_center_fixture(fixture_source):
    src = fixture_source(centers={0, 4})
    params = derive_params(8, 2, 1.0, src=src)
    assert is_center(src, params, 0)
    assert not is_center(src, params, 1)


def test_is_center_extremes(src):
    all_in = derive_params(50, 3, 1.0, src=src, overrides=Overrides(q=1.0))
    none_in = derive_params(50, 3, 1.0, src=src, overrides=Overrides(q=0.0))
    assert all(is_center(src, all_in, v) for v in range(50))
    assert not any(is_center(src, none_in, v) for v in range(50))


def test_is_center_rejects_out_of_range(src):
    params = derive_params(8, 2, 1.0, src=src)
    with pytest.raises(GraphInputError):
        is_center(src, params, 8)


def test_center_rate_concentrates(src):
    n, q = 20000, 0.3
    params = derive_params(n, 3, 1.0, src=src, overrides=Overrides(q=q))
    rate = sum(is_center(src, params, v) for v in range(n)) / n
    assert abs(rate - q) <= 5 * math.sqrt(q * (1 - q) / n)


def test_cell_rank_fixture_orders_cells():
    src = make_source(ranks={0: 2, 4: 1})
    assert cell_order_key(src, 4) < cell_order_key(src, 0)
    # Unlisted centers fall back to the hash.
    assert cell_rank(src, 5) == RandomSource.from_hex(TEST_SEED).prf("rank", 5, bits=128)


def test_cell_ranks_are_stable_and_collision_free(src):
    ranks = [cell_rank(src, c) for c in range(10000)]
    assert len(set(ranks)) == len(ranks)
    assert cell_rank(src, 17) == ranks[17]
    assert all(0 <= r < 1 << 128 for r in ranks[:50])


def test_is_marked_extremes_and_rate(src):
    none = derive_params(10000, 3, 1.0, src=src, overrides=Overrides(p=0.0))
    every = derive_params(10000, 3, 1.0, src=src, overrides=Overrides(p=1.0))
    assert not any(is_marked(src, none, c) for c in range(100))
    assert all(is_marked(src, every, c) for c in range(100))
    p = 0.2
    params = derive_params(10000, 3, 1.0, src=src, overrides=Overrides(p=p))
    rate = sum(is_marked(src, params, c) for c in range(10000)) / 10000
    assert abs(rate - p) <= 5 * math.sqrt(p * (1 - p) / 10000)


def test_marks_are_independent_of_centers(src):
    params = derive_params(1000, 3, 1.0, src=src, overrides=Overrides(q=0.5, p=0.5))
    centers = [is_center(src, params, v) for v in range(1000)]
    marks = [is_marked(src, params, v) for v in range(1000)]
    assert centers != marks


def test_radius_inverse_cdf_boundary():
    assert radius_from_uniform(1.0, 2.0) == 0.0
    assert radius_from_uniform(math.exp(-2.0), 2.0) == pytest.approx(1.0)
    with pytest.raises(GraphInputError):
        radius_from_uniform(0.0, 2.0)


def test_uniform_unit_range(src):
    values = [uniform_unit(src, "en", v) for v in range(1000)]
    assert all(0.0 < u <= 1.0 for u in values)


def test_radius_fixture_is_exact():
    src = make_source(radii={3: 0.75})
    params = derive_params(10, 3, 1.0, src=src)
    assert exp_radius(src, params, 3) == 0.75


def test_radius_mean_matches_rate(src):
    n = 20000
    params = derive_params(n, 3, 1.0, src=src, overrides=Overrides(ell=5))
    mean = sum(exp_radius(src, params, v) for v in range(n)) / n
    expected = 1.0 / params.beta
    assert abs(mean - expected) <= 5 * expected / math.sqrt(n)


def test_seed_parsing():
    assert seed_from_hex("0x01") == b"\x00" * 31 + b"\x01"
    assert seed_from_hex("FF") == seed_from_hex("ff")
    for bad in ["", "xyz", "1" * 65]:
        with pytest.raises(GraphInputError):
            seed_from_hex(bad)


def test_fresh_seeds_are_distinct_and_repeatable(src):
    seeds = [fresh_seed(src, "wrapper", i).hex for i in range(10)]
    assert len(set(seeds)) == 10
    assert fresh_seed(src, "wrapper", 3).hex == seeds[3]
    assert fresh_seed(src, "other", 3).hex != seeds[3]


def test_derive_keeps_fixture():
    src = make_source(centers={1})
    assert src.derive("x").fixture == src.fixture
    assert src.with_fixture(None).fixture is None


def test_fixture_from_dict():
    fixture = fixture_from_dict({"centers": [0, 4], "ranks": {"0": 2, "4": 1}, "radii": {"1": 0.5}, "ell": 2})
    assert fixture == Fixture(centers=frozenset({0, 4}), ranks={0: 2, 4: 1}, radii={1: 0.5}, ell=2)


@pytest.mark.parametrize("data", [[1, 2], {"centres": [1]}, {"ell": -1}, {"radii": {"0": -1.0}}, {"ranks": [1]}])
def test_fixture_from_dict_rejects(data):
    with pytest.raises(FixtureError):
        fixture_from_dict(data)


def test_load_fixture(tmp_path):
    target = tmp_path / "fx.json"
    target.write_text(json.dumps({"marks": [2, 3]}))
    assert load_fixture(str(target)).marks == frozenset({2, 3})
    target.write_text("{not json")
    with pytest.raises(FixtureError):
        load_fixture(str(target))
