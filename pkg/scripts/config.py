import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

DEFAULT_SEED_HEX = "5eed" * 16
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Constants:
    # The constant c in k = c * n^(1/3) * ln n * ell * delta / eps
    c_k: float = 1.0
    # Scales the center rate q = c_S * eps * n^(-1/3) / ln n
    c_s: float = 1.0
    # delta = n^(-c_delta) for the exponential-shift part; must be >= 1
    c_delta: float = 1.0


@dataclass(frozen=True)
class Overrides:
    """Explicit desk-scale values; None means "use the asymptotic formula"."""

    ell: Optional[int] = None
    k: Optional[int] = None
    q: Optional[float] = None
    p: Optional[float] = None

    def is_empty(self) -> bool:
        return all(v is None for v in asdict(self).values())


@dataclass(frozen=True)
class ParamSpec:
    """Everything needed to derive Params once the graph size and seed are known."""

    eps: float = 1.0
    delta_max: Optional[int] = None
    constants: Constants = field(default_factory=Constants)
    overrides: Overrides = field(default_factory=Overrides)

    def derive(self, g, src):
        from scripts.randomness import derive_params

        delta = self.delta_max if self.delta_max is not None else max(2, g.delta_max)
        return derive_params(g.n, delta, self.eps, self.constants, src, self.overrides)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# Named override profiles. The asymptotic formulas put k above n for any
# graph that fits on a desk, so tests and experiments pick one of these.
PROFILES: Dict[str, Overrides] = {
    "asymptotic": Overrides(),
    "tiny": Overrides(ell=2, k=4, q=0.25, p=0.3),
    "desk": Overrides(ell=3, k=8, q=0.1, p=0.25),
    "sparse": Overrides(ell=4, k=16, q=0.05, p=0.2),
}


@dataclass(frozen=True)
class HarnessConfig:
    # Statistical slack for expectation bounds
    expectation_slack: float = 2.0
    en_size_slack: float = 1.5
    sparsity_eps_factor: float = 5.0
    sparsity_edge_fraction: float = 0.85

    # Stretch calibration; frozen after the first calibration run
    stretch_k: float = 4.0
    cell_stretch_k: float = 4.0

    # Seed-selection wrapper
    budget_factor: float = 2.0

    # Sweeps
    permutations: int = 3
    statistical_seeds: int = 20
    ell_draws: int = 50
    jobs: int = 1


def env_seed() -> str:
    return os.environ.get("LSSG_SEED", DEFAULT_SEED_HEX)


def env_jobs() -> int:
    raw = os.environ.get("LSSG_JOBS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def env_log_level() -> str:
    return os.environ.get("LSSG_LOG_LEVEL", "WARNING").upper()
