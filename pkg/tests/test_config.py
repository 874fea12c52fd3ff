import pytest

from scripts.config import (
    DEFAULT_SEED_HEX,
    PROFILES,
    Constants,
    Overrides,
    ParamSpec,
    env_jobs,
    env_log_level,
    env_seed,
)
from scripts.randomness import RandomSource
from tests.builders import cycle


def test_profiles():
    assert PROFILES["asymptotic"].is_empty()
    assert PROFILES["tiny"] == Overrides(ell=2, k=4, q=0.25, p=0.3)
    assert not any(PROFILES[name].is_empty() for name in ("tiny", "desk", "sparse"))


def test_env_defaults(monkeypatch):
    for name in ("LSSG_SEED", "LSSG_JOBS", "LSSG_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    assert env_seed() == DEFAULT_SEED_HEX
    assert env_jobs() == 1
    assert env_log_level() == "WARNING"


def test_env_overrides(monkeypatch):
    monkeypatch.setenv("LSSG_SEED", "abc")
    monkeypatch.setenv("LSSG_JOBS", "4")
    monkeypatch.setenv("LSSG_LOG_LEVEL", "debug")
    assert env_seed() == "abc"
    assert env_jobs() == 4
    assert env_log_level() == "DEBUG"


@pytest.mark.parametrize("raw", ["zero", "0", "-3"])
def test_env_jobs_falls_back_to_one(monkeypatch, raw):
    monkeypatch.setenv("LSSG_JOBS", raw)
    assert env_jobs() == 1


def test_param_spec_derive():
    g = cycle(10)
    src = RandomSource.from_hex(DEFAULT_SEED_HEX)
    spec = ParamSpec(eps=0.5, overrides=PROFILES["desk"])
    params = spec.derive(g, src)
    assert (params.n, params.delta_max, params.eps) == (10, 2, 0.5)
    assert (params.ell, params.k, params.q, params.p) == (3, 8, 0.1, 0.25)
    assert ParamSpec(eps=0.5, delta_max=5, overrides=PROFILES["desk"]).derive(g, src).delta_max == 5


def test_param_spec_to_dict_is_plain():
    data = ParamSpec(constants=Constants(c_k=0.5)).to_dict()
    assert data["constants"]["c_k"] == 0.5
    assert data["overrides"] == {"ell": None, "k": None, "q": None, "p": None}


def test_derive_logs_through_the_mocked_logger(mocker):
    log = mocker.patch("scripts.randomness.logger")
    ParamSpec().derive(cycle(10), RandomSource.from_hex(DEFAULT_SEED_HEX))
    assert log.warning.called
