"""Shared randomness: every random object is a pure function of one master seed.

Independent oracle calls (in other threads or processes) agree because each
decision is recomputed from (seed, purpose tag, id) through a keyed blake2b
PRF. A Fixture replaces individual derivations with explicit values in tests.
"""

import hashlib
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, FrozenSet, Optional, Tuple

from scripts.config import Constants, Overrides
from scripts.errors import FixtureError, GraphInputError

logger = logging.getLogger(__name__)

SEED_BYTES = 32
TAG_ELL = "ell"
TAG_CENTER = "center"
TAG_RANK = "rank"
TAG_MARK = "mark"
TAG_RADIUS = "en"

_TWO_64 = 1 << 64
_TWO_53 = 1 << 53


@dataclass(frozen=True)
class Fixture:
    centers: Optional[FrozenSet[int]] = None
    marks: Optional[FrozenSet[int]] = None
    ranks: Optional[Dict[int, int]] = None
    radii: Optional[Dict[int, float]] = None
    ell: Optional[int] = None


def fixture_from_dict(data: Any) -> Fixture:
    if not isinstance(data, dict):
        raise FixtureError("fixture must be a JSON object")
    unknown = set(data) - {"centers", "marks", "ranks", "radii", "ell"}
    if unknown:
        raise FixtureError(f"unknown fixture keys: {sorted(unknown)}")
    try:
        centers = frozenset(int(v) for v in data["centers"]) if data.get("centers") is not None else None
        marks = frozenset(int(v) for v in data["marks"]) if data.get("marks") is not None else None
        ranks = {int(k): int(v) for k, v in data["ranks"].items()} if data.get("ranks") is not None else None
        radii = {int(k): float(v) for k, v in data["radii"].items()} if data.get("radii") is not None else None
        ell = int(data["ell"]) if data.get("ell") is not None else None
    except (TypeError, ValueError, AttributeError) as e:
        raise FixtureError(f"malformed fixture: {e}")
    if ell is not None and ell < 0:
        raise FixtureError("fixture ell must be nonnegative")
    if radii and any(r < 0 for r in radii.values()):
        raise FixtureError("fixture radii must be nonnegative")
    return Fixture(centers=centers, marks=marks, ranks=ranks, radii=radii, ell=ell)


def load_fixture(path: str) -> Fixture:
    try:
        with open(os.path.expanduser(path), "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as e:
        raise FixtureError(f"cannot read fixture {path}: {e}")
    except json.JSONDecodeError as e:
        raise FixtureError(f"fixture {path} is not valid JSON: {e}")
    return fixture_from_dict(data)


def seed_from_hex(text: str) -> bytes:
    raw = (text or "").strip().lower()
    if raw.startswith("0x"):
        raw = raw[2:]
    if not raw or len(raw) > 2 * SEED_BYTES:
        raise GraphInputError(f"seed must be 1..{2 * SEED_BYTES} hex digits")
    try:
        value = int(raw, 16)
    except ValueError:
        raise GraphInputError(f"seed {text!r} is not hexadecimal")
    return value.to_bytes(SEED_BYTES, "big")


@dataclass(frozen=True)
class RandomSource:
    master_seed: bytes
    fixture: Optional[Fixture] = None

    def __post_init__(self):
        if len(self.master_seed) != SEED_BYTES:
            raise GraphInputError(f"master seed must be {SEED_BYTES} bytes")

    @classmethod
    def from_hex(cls, text: str, fixture: Optional[Fixture] = None) -> "RandomSource":
        return cls(master_seed=seed_from_hex(text), fixture=fixture)

    def with_fixture(self, fixture: Optional[Fixture]) -> "RandomSource":
        return replace(self, fixture=fixture)

    @property
    def hex(self) -> str:
        return self.master_seed.hex()

    def derive(self, label: str) -> "RandomSource":
        """A fresh, independent seed keyed by `label`; the fixture carries over."""
        child = hashlib.blake2b(label.encode("utf-8"), key=self.master_seed, digest_size=SEED_BYTES).digest()
        return RandomSource(master_seed=child, fixture=self.fixture)

    def prf(self, tag: str, ident: int, bits: int = 64) -> int:
        h = hashlib.blake2b(f"{tag}:{ident}".encode("utf-8"), key=self.master_seed, digest_size=bits // 8)
        return int.from_bytes(h.digest(), "big", signed=False)


def fresh_seed(base: RandomSource, label: str, attempt: int) -> RandomSource:
    return base.derive(f"{label}:{attempt}")


@dataclass(frozen=True)
class Params:
    n: int
    delta_max: int
    eps: float
    c_k: float
    c_s: float
    c_delta: float
    ell: int
    k: int
    q: float
    p: float
    delta: float
    h: int
    beta: float
    promise_flag: bool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _ceil(x: float) -> int:
    # Guards against 24.000000000000004-style rounding in log ratios.
    return math.ceil(x - 1e-9)


def ell_interval(n: int, delta_max: int, eps: float) -> Tuple[int, int]:
    low = _ceil(2.0 * math.log(n) / math.log1p(eps))
    return low, low + _ceil(delta_max / eps)


def derive_params(
    n: int,
    delta_max: int,
    eps: float,
    constants: Optional[Constants] = None,
    src: Optional[RandomSource] = None,
    overrides: Optional[Overrides] = None,
) -> Params:
    if n < 2:
        raise GraphInputError(f"n must be >= 2, got {n}")
    if delta_max < 2:
        raise GraphInputError(f"delta_max must be >= 2, got {delta_max}")
    if not eps > 0:
        raise GraphInputError(f"eps must be positive, got {eps}")
    constants = constants or Constants()
    overrides = overrides or Overrides()
    if constants.c_delta < 1:
        raise GraphInputError("c_delta must be >= 1")
    if src is None:
        raise GraphInputError("a RandomSource is required to draw ell")

    ln_n = math.log(n)
    low, high = ell_interval(n, delta_max, eps)
    if src.fixture is not None and src.fixture.ell is not None:
        ell = src.fixture.ell
    elif overrides.ell is not None:
        ell = overrides.ell
    else:
        ell = low + src.prf(TAG_ELL, 0) % (high - low + 1)
    if ell < 0:
        raise GraphInputError(f"ell must be nonnegative, got {ell}")

    if overrides.k is not None:
        k = overrides.k
    else:
        # ell = 0 makes the formula vanish; a cluster still holds its own vertex
        k = max(1, _ceil(constants.c_k * n ** (1.0 / 3.0) * ln_n * ell * delta_max / eps))
    if k < 1:
        raise GraphInputError(f"k must be >= 1, got {k}")
    q = overrides.q if overrides.q is not None else min(1.0, constants.c_s * eps * n ** (-1.0 / 3.0) / ln_n)
    p = overrides.p if overrides.p is not None else n ** (-1.0 / 3.0)
    for name, value in (("q", q), ("p", p)):
        if not 0.0 <= value <= 1.0:
            raise GraphInputError(f"{name} must lie in [0, 1], got {value}")

    h = ell
    delta = n ** (-constants.c_delta)
    # beta = ln(n / delta) / h; h = 0 makes every radius 0
    beta = math.log(n / delta) / h if h > 0 else math.inf
    promise_flag = k > n
    if promise_flag:
        logger.warning("k=%d exceeds n=%d: the promise cannot hold, most vertices will be remote", k, n)
    return Params(
        n=n,
        delta_max=delta_max,
        eps=eps,
        c_k=constants.c_k,
        c_s=constants.c_s,
        c_delta=constants.c_delta,
        ell=ell,
        k=k,
        q=q,
        p=p,
        delta=delta,
        h=h,
        beta=beta,
        promise_flag=promise_flag,
    )


def _bernoulli(src: RandomSource, tag: str, ident: int, prob: float) -> bool:
    if prob >= 1.0:
        return True
    if prob <= 0.0:
        return False
    return src.prf(tag, ident) < int(prob * _TWO_64)


def is_center(src: RandomSource, params: Params, v: int) -> bool:
    if not 0 <= v < params.n:
        raise GraphInputError(f"vertex {v} out of range [0, {params.n})")
    if src.fixture is not None and src.fixture.centers is not None:
        return v in src.fixture.centers
    return _bernoulli(src, TAG_CENTER, v, params.q)


def cell_rank(src: RandomSource, center_id: int) -> int:
    if src.fixture is not None and src.fixture.ranks is not None and center_id in src.fixture.ranks:
        return src.fixture.ranks[center_id]
    return src.prf(TAG_RANK, center_id, bits=128)


def cell_order_key(src: RandomSource, center_id: int) -> Tuple[int, int]:
    """Total order on cells: (random rank, center id)."""
    return cell_rank(src, center_id), center_id


def is_marked(src: RandomSource, params: Params, center_id: int) -> bool:
    if src.fixture is not None and src.fixture.marks is not None:
        return center_id in src.fixture.marks
    return _bernoulli(src, TAG_MARK, center_id, params.p)


def uniform_unit(src: RandomSource, tag: str, ident: int) -> float:
    """PRF-uniform value in (0, 1]."""
    return ((src.prf(tag, ident) >> 11) + 1) / _TWO_53


def radius_from_uniform(u: float, beta: float) -> float:
    # Inverse CDF of Exp(beta); u = 1 gives exactly 0.
    if not 0.0 < u <= 1.0:
        raise GraphInputError(f"uniform value must lie in (0, 1], got {u}")
    if math.isinf(beta):
        return 0.0
    return math.log(1.0 / u) / beta


def exp_radius(src: RandomSource, params: Params, v: int) -> float:
    if not 0 <= v < params.n:
        raise GraphInputError(f"vertex {v} out of range [0, {params.n})")
    if src.fixture is not None and src.fixture.radii is not None and v in src.fixture.radii:
        return src.fixture.radii[v]
    return radius_from_uniform(uniform_unit(src, TAG_RADIUS, v), params.beta)
