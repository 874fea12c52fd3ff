"""Global verification of the oracle: sweeps, connectivity, stretch, lemma checks.

Everything here may look at the whole graph. The oracle itself never does; the
harness compares what the oracle answers edge by edge against the global
reference construction and measures the resulting subgraph.
"""

import csv
import json
import logging
import math
import os
import random
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from scripts.config import SCHEMA_VERSION, HarnessConfig, ParamSpec
from scripts.errors import GraphInputError, WrapperExhausted
from scripts.graph_access import Edge, Graph, QueryCounter, edge_key
from scripts.oracle import OracleDecision, lssg_answer
from scripts.randomness import Params, RandomSource, fresh_seed
from scripts.reference import ReferencePartition, ReferenceResult, build_partition, reference_spanner

logger = logging.getLogger(__name__)

GraphFactory = Callable[[int, int], Graph]


class DisjointSet:
    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [1] * size
        self.components = size

    def find_root(self, node: int) -> int:
        root = node
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[node] != root:
            self.parent[node], node = root, self.parent[node]
        return root

    def merge(self, a: int, b: int) -> bool:
        ra, rb = self.find_root(a), self.find_root(b)
        if ra == rb:
            return False
        if self.rank[rb] > self.rank[ra]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.rank[ra] += self.rank[rb]
        self.components -= 1
        return True


@dataclass
class QueryStats:
    calls: int = 0
    min: int = 0
    median: float = 0.0
    p95: float = 0.0
    max: int = 0
    mean: float = 0.0
    total: int = 0

    @classmethod
    def from_counts(cls, counts: Sequence[int]) -> "QueryStats":
        if not counts:
            return cls()
        arr = np.asarray(counts, dtype=np.int64)
        return cls(
            calls=int(arr.size),
            min=int(arr.min()),
            median=float(np.median(arr)),
            p95=float(np.percentile(arr, 95)),
            max=int(arr.max()),
            mean=float(arr.mean()),
            total=int(arr.sum()),
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class SweepResult:
    edges: FrozenSet[Edge]
    decisions: Dict[Edge, OracleDecision]
    stats: QueryStats

    @property
    def branch_counts(self) -> Dict[str, int]:
        return dict(Counter(d.branch for d in self.decisions.values() if d.answer))

    def query_counts(self) -> List[int]:
        return [d.queries_used for d in self.decisions.values()]


def sweep(
    g: Graph,
    src: RandomSource,
    params: Params,
    parallelism: int = 1,
    order_seed: Optional[int] = None,
) -> SweepResult:
    """Ask the oracle about every edge; each call gets its own QueryCounter."""
    order = list(g.edges())
    if order_seed is not None:
        random.Random(order_seed).shuffle(order)

    def ask(e: Edge) -> OracleDecision:
        return lssg_answer(g, src, params, e[0], e[1], QueryCounter())

    if parallelism > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            decisions = list(pool.map(ask, order))
    else:
        decisions = [ask(e) for e in order]

    by_edge = {d.edge: d for d in decisions}
    kept = frozenset(e for e, d in by_edge.items() if d.answer)
    stats = QueryStats.from_counts([d.queries_used for d in decisions])
    logger.info("sweep: %d/%d edges kept, median %.1f probes per call", len(kept), g.m, stats.median)
    return SweepResult(edges=kept, decisions=by_edge, stats=stats)


def check_connectivity(g: Graph, h: Iterable[Edge]) -> bool:
    """True iff H has exactly the components of G (H is assumed to be a subgraph)."""
    full = DisjointSet(g.n)
    for u, w in g.edges():
        full.merge(u, w)
    sub = DisjointSet(g.n)
    for u, w in h:
        sub.merge(u, w)
    return full.components == sub.components


@dataclass
class StretchDistribution:
    values: List[int] = field(default_factory=list)
    unreachable: int = 0

    @property
    def max(self) -> float:
        if self.unreachable:
            return math.inf
        return max(self.values, default=0)

    @property
    def p95(self) -> float:
        if not self.values:
            return 0.0
        return float(np.percentile(np.asarray(self.values), 95))

    @property
    def histogram(self) -> Dict[int, int]:
        return dict(sorted(Counter(self.values).items()))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rejected": len(self.values) + self.unreachable,
            "max": None if math.isinf(self.max) else self.max,
            "p95": self.p95,
            "unreachable": self.unreachable,
            "histogram": {str(k): v for k, v in self.histogram.items()},
        }


def measure_stretch(g: Graph, h: Iterable[Edge], candidates: Optional[Iterable[Edge]] = None) -> StretchDistribution:
    """Hop distance in H between the endpoints of every edge of G that H dropped."""
    kept = {edge_key(*e) for e in h}
    hg = g.to_networkx(kept)
    pool = g.edges() if candidates is None else (edge_key(*e) for e in candidates)
    dist = StretchDistribution()
    for u, w in pool:
        if (u, w) in kept:
            continue
        try:
            dist.values.append(nx.shortest_path_length(hg, u, w))
        except nx.NetworkXNoPath:
            dist.unreachable += 1
    return dist


def _cell_label(part: ReferencePartition, v: int) -> int:
    # Remote vertices are cells of their own; their ids never collide with a center id.
    return part.center_of.get(v, v)


def check_cell_stretch(
    g: Graph,
    src: RandomSource,
    params: Params,
    h: Iterable[Edge],
    partition: Optional[ReferencePartition] = None,
) -> float:
    """Max distance in the contracted H over all edges of the contracted G (0 without inter-cell edges)."""
    part = partition or build_partition(g, src, params)

    def contract(edges: Iterable[Edge]) -> Set[Edge]:
        out = set()
        for u, w in edges:
            a, b = _cell_label(part, u), _cell_label(part, w)
            if a != b:
                out.add(edge_key(a, b))
        return out

    g_vor = contract(g.edges())
    h_vor = contract(h)
    hv = nx.Graph()
    hv.add_edges_from(h_vor)
    worst = 0.0
    for a, b in g_vor:
        if (a, b) in h_vor:
            worst = max(worst, 1)
            continue
        try:
            worst = max(worst, nx.shortest_path_length(hv, a, b))
        except (nx.NetworkXNoPath, nx.NodeNotFound):
            return math.inf
    return worst


def find_bridges(g: Graph) -> Set[Edge]:
    return {edge_key(u, w) for u, w in nx.bridges(g.to_networkx())}


def cluster_count_bound(g: Graph, params: Params, centers: int) -> float:
    return centers + g.n * params.ell * (params.delta_max + 1) / params.k


def stretch_bound(params: Params, config: HarnessConfig) -> float:
    log_n = math.log2(params.n)
    return config.stretch_k * log_n * (params.delta_max + log_n) / params.eps


def cell_stretch_bound(params: Params, config: HarnessConfig) -> float:
    return config.cell_stretch_k * math.log2(params.n)


@dataclass
class SpannerReport:
    seed: str
    params: Dict[str, Any]
    n: int
    m: int
    edges: int
    edges_per_n: float
    connected: bool
    clusters: int
    centers: int
    remote: int
    boundary_edges: int
    stretch: StretchDistribution
    stretch_by_class: Dict[str, StretchDistribution]
    cell_stretch: float
    en_radius_violation: bool
    branch_counts: Dict[str, int]
    clusters_by_kind: Dict[str, int]
    query_stats: Optional[QueryStats] = None
    en_size_ratio: Optional[float] = None
    oracle_matches_reference: Optional[bool] = None
    config: Dict[str, Any] = field(default_factory=dict)
    lemma_checks: Dict[str, bool] = field(default_factory=dict)
    statistics: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.lemma_checks.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "seed": self.seed,
            "params": self.params,
            "config": self.config,
            "n": self.n,
            "m": self.m,
            "edges": self.edges,
            "edges_per_n": self.edges_per_n,
            "connected": self.connected,
            "clusters": self.clusters,
            "centers": self.centers,
            "remote": self.remote,
            "boundary_edges": self.boundary_edges,
            "stretch": self.stretch.to_dict(),
            "stretch_by_class": {k: v.to_dict() for k, v in self.stretch_by_class.items()},
            "cell_stretch": None if math.isinf(self.cell_stretch) else self.cell_stretch,
            "en_radius_violation": self.en_radius_violation,
            "branch_counts": self.branch_counts,
            "clusters_by_kind": self.clusters_by_kind,
            "query_stats": self.query_stats.to_dict() if self.query_stats else None,
            "en_size_ratio": self.en_size_ratio,
            "oracle_matches_reference": self.oracle_matches_reference,
            "lemma_checks": self.lemma_checks,
            "statistics": self.statistics,
            "passed": self.passed,
        }


def build_report(
    g: Graph,
    src: RandomSource,
    params: Params,
    config: Optional[HarnessConfig] = None,
    reference: Optional[ReferenceResult] = None,
    swept: Optional[SweepResult] = None,
    echo: Optional[Dict[str, Any]] = None,
) -> SpannerReport:
    config = config or HarnessConfig()
    ref = reference or reference_spanner(g, src, params)
    part = ref.partition
    h = ref.edges

    by_class: Dict[str, List[Edge]] = {"cells": [], "remote": []}
    for u, w in g.edges():
        if u in part.remote and w in part.remote:
            by_class["remote"].append((u, w))
        elif u not in part.remote and w not in part.remote:
            by_class["cells"].append((u, w))

    report = SpannerReport(
        seed=src.hex,
        params=params.to_dict(),
        n=g.n,
        m=g.m,
        edges=len(h),
        edges_per_n=len(h) / g.n if g.n else 0.0,
        connected=check_connectivity(g, h),
        clusters=len(part.clusters),
        centers=len(part.centers),
        remote=len(part.remote),
        boundary_edges=ref.boundary_edges,
        stretch=measure_stretch(g, h),
        stretch_by_class={name: measure_stretch(g, h, edges) for name, edges in by_class.items()},
        cell_stretch=check_cell_stretch(g, src, params, h, part),
        en_radius_violation=ref.en_radius_violation,
        branch_counts=dict(ref.counts),
        clusters_by_kind=dict(Counter(part.cluster_kind.values())),
        config=dict(echo or {}),
    )
    if params.q == 0 and len(part.remote) == g.n:
        report.en_size_ratio = report.edges_per_n
    if swept is not None:
        report.query_stats = swept.stats
        report.oracle_matches_reference = swept.edges == h
    report.lemma_checks = check_lemmas(g, src, params, report, config, reference=ref)
    return report


def check_lemmas(
    g: Graph,
    src: RandomSource,
    params: Params,
    report: SpannerReport,
    config: Optional[HarnessConfig] = None,
    reference: Optional[ReferenceResult] = None,
    spec: Optional[ParamSpec] = None,
) -> Dict[str, bool]:
    """Per-seed deterministic checks; cross-seed statistical checks too when `spec` is given."""
    config = config or HarnessConfig()
    ref = reference or reference_spanner(g, src, params)
    h = ref.edges
    checks: Dict[str, bool] = {
        "cluster_count_bound": report.clusters <= cluster_count_bound(g, params, report.centers),
        "subgraph": all(g.has_edge(u, w) for u, w in h) and len(h) <= g.m,
        # A radius violation voids the connectivity guarantee for that seed; it is reported instead.
        "connected": report.connected or report.en_radius_violation,
        "stretch_finite": report.en_radius_violation or report.stretch.unreachable == 0,
        "stretch_bound": report.en_radius_violation or report.stretch.max <= stretch_bound(params, config),
        "cell_stretch_bound": report.en_radius_violation or report.cell_stretch <= cell_stretch_bound(params, config),
        "bridges_kept": report.en_radius_violation or find_bridges(g) <= h,
        "bfs_edges_kept": ref.partition.bfs_edges() <= h,
    }
    if report.oracle_matches_reference is not None:
        checks["oracle_matches_reference"] = report.oracle_matches_reference
    if report.en_radius_violation:
        logger.warning("seed %s: some exponential radius reached h; connectivity not asserted", src.hex[:12])

    if spec is not None:
        boundary = boundary_expectation(g, spec, src, config.ell_draws, config)
        sparsity = sparsity_check(g, spec, src, config.statistical_seeds, config)
        en_size = en_size_check(g, spec, src, config.statistical_seeds, config)
        for check in (boundary, sparsity, en_size):
            checks[check.name] = check.passed
            report.statistics[check.name] = check.to_dict()
    failed = sorted(name for name, ok in checks.items() if not ok)
    if failed:
        logger.warning("failed checks for seed %s: %s", src.hex[:12], ", ".join(failed))
    return checks


@dataclass
class ExpectationCheck:
    name: str
    samples: List[float]
    bound: float
    passed: bool
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def mean(self) -> float:
        return float(np.mean(self.samples)) if self.samples else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "mean": self.mean,
            "bound": self.bound,
            "samples": len(self.samples),
            "passed": self.passed,
            **self.extra,
        }


def _draws(g: Graph, spec: ParamSpec, base: RandomSource, label: str, count: int):
    for i in range(count):
        src = fresh_seed(base, label, i)
        yield src, spec.derive(g, src)


def boundary_expectation(
    g: Graph,
    spec: ParamSpec,
    base: RandomSource,
    draws: int = 50,
    config: Optional[HarnessConfig] = None,
) -> ExpectationCheck:
    """Mean |E(R, not R)| over independent seeds (each drawing its own ell) against slack * eps * n."""
    config = config or HarnessConfig()
    samples: List[float] = []
    for src, params in _draws(g, spec, base, "boundary", draws):
        remote = build_partition(g, src, params).remote
        samples.append(float(sum(1 for u, w in g.edges() if (u in remote) != (w in remote))))
    bound = config.expectation_slack * spec.eps * g.n
    check = ExpectationCheck(name="boundary_expectation", samples=samples, bound=bound, passed=False)
    check.passed = check.mean <= bound
    return check


def en_size_check(
    g: Graph,
    spec: ParamSpec,
    base: RandomSource,
    seeds: int = 20,
    config: Optional[HarnessConfig] = None,
) -> ExpectationCheck:
    """With no centers every vertex is remote; mean |E'|/n against slack * (n/delta)^(1/h)."""
    config = config or HarnessConfig()
    en_only = replace(spec, overrides=replace(spec.overrides, q=0.0))
    samples: List[float] = []
    violations = 0
    bound = math.inf
    for src, params in _draws(g, en_only, base, "en-only", seeds):
        ref = reference_spanner(g, src, params)
        violations += ref.en_radius_violation
        samples.append(len(ref.edges) / g.n)
        if params.h > 0:
            bound = config.en_size_slack * (params.n / params.delta) ** (1.0 / params.h)
    check = ExpectationCheck(
        name="en_size", samples=samples, bound=bound, passed=False, extra={"radius_violations": violations}
    )
    check.passed = check.mean <= bound
    return check


def sparsity_check(
    g: Graph,
    spec: ParamSpec,
    base: RandomSource,
    seeds: int = 20,
    config: Optional[HarnessConfig] = None,
) -> ExpectationCheck:
    """Mean |E'|/n <= 1 + factor * eps, and every single run keeps under a fraction of m."""
    config = config or HarnessConfig()
    samples: List[float] = []
    worst = 0
    for src, params in _draws(g, spec, base, "sparsity", seeds):
        size = len(reference_spanner(g, src, params).edges)
        worst = max(worst, size)
        samples.append(size / g.n)
    bound = 1.0 + config.sparsity_eps_factor * spec.eps
    check = ExpectationCheck(
        name="sparsity",
        samples=samples,
        bound=bound,
        passed=False,
        extra={"max_edges": worst, "edge_cap": config.sparsity_edge_fraction * g.m},
    )
    check.passed = check.mean <= bound and worst < config.sparsity_edge_fraction * g.m
    return check


def consistency_check(
    g: Graph,
    src: RandomSource,
    params: Params,
    trials: int = 3,
    parallelism: int = 4,
) -> bool:
    """Permuted, parallel and repeated sweeps must all produce the same positive set."""
    baseline = sweep(g, src, params).edges
    for t in range(trials):
        if sweep(g, src, params, order_seed=t).edges != baseline:
            logger.warning("permutation %d changed the positive set", t)
            return False
    if sweep(g, src, params, parallelism=parallelism).edges != baseline:
        logger.warning("parallel sweep changed the positive set")
        return False

    # One counter reused across interleaved and repeated calls.
    ctr = QueryCounter()
    order = list(g.edges())
    for e, other in zip(order, order[::-1]):
        first = lssg_answer(g, src, params, e[0], e[1], ctr).answer
        lssg_answer(g, src, params, other[1], other[0], ctr)
        again = lssg_answer(g, src, params, e[1], e[0], ctr).answer
        if first != again or first != (e in baseline):
            logger.warning("repeated query on %s disagreed", e)
            return False
    return True


def default_max_attempts(n: int) -> int:
    return max(1, math.ceil(4 * math.log2(max(n, 2))))


def wrapper_select_seed(
    g: Graph,
    spec: ParamSpec,
    base: RandomSource,
    budget_factor: float = 2.0,
    max_attempts: Optional[int] = None,
    config: Optional[HarnessConfig] = None,
) -> Tuple[RandomSource, SpannerReport]:
    """Try fresh seeds until the global edge count fits budget_factor * (1 + eps) * n."""
    attempts = max_attempts if max_attempts is not None else default_max_attempts(g.n)
    if attempts < 1:
        raise GraphInputError("max_attempts must be >= 1")
    budget = budget_factor * (1.0 + spec.eps) * g.n
    best: Optional[Tuple[int, str]] = None
    for attempt in range(attempts):
        src = fresh_seed(base, "wrapper", attempt)
        params = spec.derive(g, src)
        ref = reference_spanner(g, src, params)
        size = len(ref.edges)
        if best is None or size < best[0]:
            best = (size, src.hex)
        if size <= budget:
            logger.info("wrapper accepted seed %s after %d attempt(s): %d edges", src.hex[:12], attempt + 1, size)
            report = build_report(g, src, params, config, reference=ref)
            report.statistics["wrapper"] = {"attempts": attempt + 1, "budget": budget}
            return src, report
        logger.warning("wrapper attempt %d: %d edges exceed budget %.1f", attempt + 1, size, budget)
    raise WrapperExhausted(attempts, best[1] if best else None, best[0] if best else None, budget)


@dataclass
class ScalingPoint:
    n: int
    seed: int
    calls: int
    median: float
    max: int


@dataclass
class ScalingReport:
    points: List[ScalingPoint]
    slope: float

    def to_dict(self) -> Dict[str, Any]:
        return {"schema_version": SCHEMA_VERSION, "slope": self.slope, "points": [asdict(p) for p in self.points]}


def scaling_report(
    generator: GraphFactory,
    sizes: Sequence[int],
    seeds: Sequence[int],
    spec: ParamSpec,
    base: RandomSource,
    sample: Optional[int] = None,
) -> ScalingReport:
    """Fit log(median probes per call) against log n over the given sizes."""
    if len(set(sizes)) < 2:
        raise GraphInputError("scaling needs at least two distinct sizes")
    points: List[ScalingPoint] = []
    medians: Dict[int, List[int]] = {}
    for n in sizes:
        counts: List[int] = []
        for seed in seeds:
            g = generator(n, seed)
            src = fresh_seed(base, f"bench:{n}", seed)
            params = spec.derive(g, src)
            edges = list(g.edges())
            if sample is not None and sample < len(edges):
                edges = random.Random(seed).sample(edges, sample)
            run = [lssg_answer(g, src, params, u, w, QueryCounter()).queries_used for u, w in edges]
            stats = QueryStats.from_counts(run)
            points.append(ScalingPoint(n=n, seed=seed, calls=stats.calls, median=stats.median, max=stats.max))
            counts.extend(run)
            logger.info("bench n=%d seed=%d: median %.1f probes", n, seed, stats.median)
        medians[n] = counts
    xs = np.log([float(n) for n in medians])
    ys = np.log([max(float(np.median(c)), 1.0) for c in medians.values()])
    slope = float(np.polyfit(xs, ys, 1)[0])
    return ScalingReport(points=points, slope=slope)


def write_report_json(report: SpannerReport, path: str) -> None:
    with open(os.path.expanduser(path), "w", encoding="utf-8") as handle:
        json.dump(report.to_dict(), handle, indent=2, sort_keys=True)


def write_stretch_csv(dist: StretchDistribution, path: str) -> None:
    with open(os.path.expanduser(path), "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["stretch", "count"])
        for value, count in dist.histogram.items():
            writer.writerow([value, count])
        if dist.unreachable:
            writer.writerow(["unreachable", dist.unreachable])


def write_scaling_csv(report: ScalingReport, path: str) -> None:
    with open(os.path.expanduser(path), "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["n", "seed", "calls", "median", "max"])
        for p in report.points:
            writer.writerow([p.n, p.seed, p.calls, p.median, p.max])
