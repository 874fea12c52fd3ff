import sys
import os
import argparse
import json
import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, List, Optional

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table
from rich import box

# Ensure we can import from the parent directory (scripts package)
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import scripts.generators as generators
import scripts.harness as harness
from scripts.config import PROFILES, SCHEMA_VERSION, Constants, HarnessConfig, Overrides, ParamSpec, env_jobs, env_log_level, env_seed
from scripts.errors import GraphInputError, WrapperExhausted
from scripts.graph_access import Graph, dumps_graph, load_graph, save_graph
from scripts.oracle import explain, lssg_answer
from scripts.randomness import RandomSource, load_fixture
from scripts.reference import build_partition

console = Console()
err_console = Console(stderr=True)

logger = logging.getLogger("scripts.lssg")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


@dataclass
class RunConfig:
    """Every flag that influences a result; echoed verbatim into reports."""

    command: str
    graph: Optional[str] = None
    gen: Optional[str] = None
    n: Optional[int] = None
    gen_seed: int = 0
    seed: str = ""
    eps: float = 1.0
    delta_max: Optional[int] = None
    profile: str = "asymptotic"
    constants: Constants = field(default_factory=Constants)
    overrides: Overrides = field(default_factory=Overrides)
    jobs: int = 1
    out: Optional[str] = None
    fixture: Optional[str] = None
    format: str = "json"

    def param_spec(self) -> ParamSpec:
        return ParamSpec(eps=self.eps, delta_max=self.delta_max, constants=self.constants, overrides=self.overrides)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _setup_logging(level: str) -> None:
    logging.basicConfig(
        level=level.upper(),
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


def _add_source_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", help="Graph file (header 'n m delta', then one 'u v' edge per line)")
    p.add_argument("--gen", choices=sorted(generators.GENERATORS), help="Generate the graph instead of loading it")
    p.add_argument("--n", type=int, help="Vertex count for --gen")
    p.add_argument("--gen-seed", type=int, default=0, help="Generator seed for --gen")
    p.add_argument("--delta-max", type=int, default=None, help="Degree bound (default: the graph's)")


def _add_param_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", default=None, help="Hex master seed (default: $LSSG_SEED)")
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--profile", choices=sorted(PROFILES), default="asymptotic", help="Named override profile")
    p.add_argument("--ell", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--c-k", type=float, default=None)
    p.add_argument("--c-s", type=float, default=None)
    p.add_argument("--c-delta", type=float, default=None)
    p.add_argument("--fixture", default=None, help="JSON fixture pinning centers/marks/ranks/radii/ell")
    p.add_argument("--jobs", type=int, default=None, help="Sweep parallelism (default: $LSSG_JOBS or 1)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lssg", description="Local sparse spanning graph oracle")
    parser.add_argument("--log-level", default=None, help="Logging level (default: $LSSG_LOG_LEVEL or WARNING)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Gen
    gen_parser = subparsers.add_parser("gen", help="Write a generated graph file")
    gen_parser.add_argument("--kind", choices=sorted(generators.GENERATORS), required=True)
    gen_parser.add_argument("--n", type=int, required=True)
    gen_parser.add_argument("--delta-max", type=int, default=None)
    gen_parser.add_argument("--gen-seed", type=int, default=0)
    gen_parser.add_argument("--out", help="Output path (default: stdout)")

    # Answer
    answer_parser = subparsers.add_parser("answer", help="Decide a single edge")
    _add_source_args(answer_parser)
    _add_param_args(answer_parser)
    answer_parser.add_argument("--u", type=int, required=True)
    answer_parser.add_argument("--v", type=int, required=True)
    answer_parser.add_argument("--explain", action="store_true", help="Render the decision trace")
    answer_parser.add_argument("--format", choices=["json", "rich"], default="json")

    # Sweep
    sweep_parser = subparsers.add_parser("sweep", help="Ask the oracle about every edge")
    _add_source_args(sweep_parser)
    _add_param_args(sweep_parser)
    sweep_parser.add_argument("--out", help="Write the kept edges as a graph file")
    sweep_parser.add_argument("--order-seed", type=int, default=None, help="Shuffle the query order")

    # Verify
    verify_parser = subparsers.add_parser("verify", help="Check the spanner against the reference and the lemmas")
    _add_source_args(verify_parser)
    _add_param_args(verify_parser)
    verify_parser.add_argument("--out", help="Write the report JSON here as well")
    verify_parser.add_argument("--stretch-csv", help="Write the stretch histogram CSV")
    verify_parser.add_argument("--statistical", action="store_true", help="Add the cross-seed expectation checks")
    verify_parser.add_argument("--consistency", action="store_true", help="Add permuted/parallel/repeated sweeps")
    verify_parser.add_argument("--wrapper", action="store_true", help="Select the seed with the restart wrapper")
    verify_parser.add_argument("--budget-factor", type=float, default=HarnessConfig.budget_factor)
    verify_parser.add_argument("--max-attempts", type=int, default=None)
    verify_parser.add_argument("--format", choices=["json", "rich"], default="json")

    # Bench
    bench_parser = subparsers.add_parser("bench", help="Fit the probe-count growth over graph sizes")
    bench_parser.add_argument("--kind", choices=sorted(generators.GENERATORS), default="random-regular")
    bench_parser.add_argument("--sizes", type=int, nargs="+", required=True)
    bench_parser.add_argument("--seeds", type=int, default=3, help="Graphs per size")
    bench_parser.add_argument("--sample", type=int, default=None, help="Edges queried per graph (default: all)")
    bench_parser.add_argument("--delta-max", type=int, default=None)
    _add_param_args(bench_parser)
    bench_parser.add_argument("--out", help="Write the raw points as CSV")

    # Stats
    stats_parser = subparsers.add_parser("stats", help="Show derived parameters and partition statistics")
    _add_source_args(stats_parser)
    _add_param_args(stats_parser)
    stats_parser.add_argument("--format", choices=["json", "rich"], default="rich")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    constants = Constants()
    overrides = PROFILES[getattr(args, "profile", "asymptotic") or "asymptotic"]
    if hasattr(args, "eps"):
        for name, flag in (("c_k", args.c_k), ("c_s", args.c_s), ("c_delta", args.c_delta)):
            if flag is not None:
                constants = replace(constants, **{name: flag})
        for name in ("ell", "k", "q", "p"):
            value = getattr(args, name)
            if value is not None:
                overrides = replace(overrides, **{name: value})
    jobs = getattr(args, "jobs", None)
    return RunConfig(
        command=args.command,
        graph=getattr(args, "graph", None),
        gen=getattr(args, "gen", None) or getattr(args, "kind", None),
        n=getattr(args, "n", None),
        gen_seed=getattr(args, "gen_seed", 0),
        seed=getattr(args, "seed", None) or env_seed(),
        eps=getattr(args, "eps", 1.0),
        delta_max=getattr(args, "delta_max", None),
        profile=getattr(args, "profile", "asymptotic") or "asymptotic",
        constants=constants,
        overrides=overrides,
        jobs=jobs if jobs is not None else env_jobs(),
        out=getattr(args, "out", None),
        fixture=getattr(args, "fixture", None),
        format=getattr(args, "format", "json"),
    )


def _load_source_graph(cfg: RunConfig) -> Graph:
    if cfg.graph and cfg.gen:
        raise GraphInputError("use either --graph or --gen, not both")
    if cfg.graph:
        return load_graph(cfg.graph)
    if cfg.gen:
        if cfg.n is None:
            raise GraphInputError("--gen needs --n")
        return generators.generate(cfg.gen, cfg.n, cfg.delta_max, cfg.gen_seed)
    raise GraphInputError("one of --graph or --gen is required")


def _random_source(cfg: RunConfig) -> RandomSource:
    fixture = load_fixture(cfg.fixture) if cfg.fixture else None
    return RandomSource.from_hex(cfg.seed, fixture)


def _emit_json(data: Any, out: Optional[str] = None) -> None:
    text = json.dumps(data, indent=2, sort_keys=True)
    print(text)
    if out:
        with open(os.path.expanduser(out), "w", encoding="utf-8") as handle:
            handle.write(text + "\n")


def cmd_gen(args: argparse.Namespace) -> int:
    g = generators.generate(args.kind, args.n, args.delta_max, args.gen_seed)
    if args.out:
        save_graph(g, args.out)
        err_console.print(f"[green]✔ Wrote {args.kind} graph (n={g.n}, m={g.m}) to {args.out}[/green]")
    else:
        sys.stdout.write(dumps_graph(g))
    return EXIT_OK


def cmd_answer(args: argparse.Namespace, cfg: RunConfig) -> int:
    g = _load_source_graph(cfg)
    src = _random_source(cfg)
    params = cfg.param_spec().derive(g, src)
    if args.explain and cfg.format == "rich":
        sys.stdout.write(explain(g, src, params, args.u, args.v))
        return EXIT_OK
    decision = lssg_answer(g, src, params, args.u, args.v)
    data = decision.to_dict()
    if not args.explain:
        data.pop("trace")
    if cfg.format == "rich":
        color = "green" if decision.answer else "red"
        console.print(f"{decision.edge}: [{color}]{decision.answer}[/{color}] via {decision.branch} ({decision.queries_used} probes)")
    else:
        _emit_json(data)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, cfg: RunConfig) -> int:
    g = _load_source_graph(cfg)
    src = _random_source(cfg)
    params = cfg.param_spec().derive(g, src)
    result = harness.sweep(g, src, params, parallelism=cfg.jobs, order_seed=args.order_seed)
    if cfg.out:
        save_graph(g, cfg.out, result.edges)
    _emit_json(
        {
            "schema_version": SCHEMA_VERSION,
            "seed": src.hex,
            "config": cfg.to_dict(),
            "params": params.to_dict(),
            "edges": len(result.edges),
            "m": g.m,
            "branch_counts": result.branch_counts,
            "query_stats": result.stats.to_dict(),
        }
    )
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, cfg: RunConfig) -> int:
    g = _load_source_graph(cfg)
    base = _random_source(cfg)
    spec = cfg.param_spec()
    config = HarnessConfig(budget_factor=args.budget_factor, jobs=cfg.jobs)
    if args.wrapper:
        src, _ = harness.wrapper_select_seed(g, spec, base, args.budget_factor, args.max_attempts, config)
    else:
        src = base
    params = spec.derive(g, src)
    logger.info("verifying n=%d m=%d with seed %s", g.n, g.m, src.hex[:12])
    swept = harness.sweep(g, src, params, parallelism=config.jobs)
    report = harness.build_report(g, src, params, config, swept=swept, echo=cfg.to_dict())
    if args.statistical:
        report.lemma_checks = harness.check_lemmas(g, src, params, report, config, spec=spec)
    if args.consistency:
        report.lemma_checks["consistency"] = harness.consistency_check(
            g, src, params, config.permutations, max(2, config.jobs)
        )
    if args.stretch_csv:
        harness.write_stretch_csv(report.stretch, args.stretch_csv)

    if cfg.format == "rich":
        table = Table(title=f"Verification (seed {src.hex[:12]}…)", box=box.ROUNDED)
        table.add_column("Check", style="cyan")
        table.add_column("Result")
        for name, ok in sorted(report.lemma_checks.items()):
            table.add_row(name, "[green]pass[/green]" if ok else "[red]FAIL[/red]")
        console.print(table)
        console.print(f"|E'| = {report.edges} of m = {report.m} ({report.edges_per_n:.3f} per vertex)")
        if cfg.out:
            harness.write_report_json(report, cfg.out)
    else:
        _emit_json(report.to_dict(), cfg.out)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_bench(args: argparse.Namespace, cfg: RunConfig) -> int:
    kind = args.kind

    def factory(n: int, seed: int) -> Graph:
        return generators.generate(kind, n, args.delta_max, seed)

    result = harness.scaling_report(
        factory, args.sizes, list(range(args.seeds)), cfg.param_spec(), _random_source(cfg), args.sample
    )
    if args.out:
        harness.write_scaling_csv(result, args.out)
    data = result.to_dict()
    data["config"] = cfg.to_dict()
    _emit_json(data)
    return EXIT_OK


def cmd_stats(args: argparse.Namespace, cfg: RunConfig) -> int:
    g = _load_source_graph(cfg)
    src = _random_source(cfg)
    params = cfg.param_spec().derive(g, src)
    part = build_partition(g, src, params)
    kinds: Dict[str, int] = {}
    for kind in part.cluster_kind.values():
        kinds[kind] = kinds.get(kind, 0) + 1
    data = {
        "schema_version": SCHEMA_VERSION,
        "seed": src.hex,
        "params": params.to_dict(),
        "n": g.n,
        "m": g.m,
        "centers": len(part.centers),
        "marked_cells": len(part.marked_cells),
        "remote": len(part.remote),
        "clusters": len(part.clusters),
        "clusters_by_kind": kinds,
        "cluster_count_bound": harness.cluster_count_bound(g, params, len(part.centers)),
    }
    if cfg.format == "json":
        _emit_json(data)
        return EXIT_OK

    table = Table(title="Parameters", box=box.ROUNDED)
    table.add_column("Name", style="cyan")
    table.add_column("Value", justify="right")
    for name, value in params.to_dict().items():
        table.add_row(name, f"{value:.6g}" if isinstance(value, float) else str(value))
    console.print(table)
    part_table = Table(title="Partition", box=box.ROUNDED)
    part_table.add_column("Statistic", style="cyan")
    part_table.add_column("Value", justify="right")
    for name in ("n", "m", "centers", "marked_cells", "remote", "clusters"):
        part_table.add_row(name, str(data[name]))
    for kind, count in sorted(kinds.items()):
        part_table.add_row(f"  {kind}", str(count))
    console.print(part_table)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.log_level or env_log_level())

    try:
        if args.command == "gen":
            return cmd_gen(args)
        cfg = _run_config(args)
        if args.command == "answer":
            return cmd_answer(args, cfg)
        elif args.command == "sweep":
            return cmd_sweep(args, cfg)
        elif args.command == "verify":
            return cmd_verify(args, cfg)
        elif args.command == "bench":
            return cmd_bench(args, cfg)
        elif args.command == "stats":
            return cmd_stats(args, cfg)
    except GraphInputError as e:
        err_console.print(f"[red]Error:[/red] {e}")
        return EXIT_USAGE
    except WrapperExhausted as e:
        err_console.print(f"[red]Wrapper failed:[/red] {e}")
        return EXIT_FAILED
    parser.print_help()
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
