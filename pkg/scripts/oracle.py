"""Per-edge spanner oracle.

`lssg_answer` is a pure function of (graph, seed, edge): it keeps no state
between calls, so any query order, repetition, or parallel schedule yields
the same global subgraph.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional

from rich.console import Console
from rich.table import Table
from rich.tree import Tree
from rich import box

from scripts.config import SCHEMA_VERSION
from scripts.connectors import (
    adjacency_view,
    rule_indirect,
    rule_marked,
    rule_no_marked_neighbor,
)
from scripts.errors import GraphInputError
from scripts.graph_access import Edge, Graph, QueryCounter, edge_key, neighbors
from scripts.partition import bfs_parent, cluster_of, find_center
from scripts.randomness import Params, RandomSource, cell_order_key
from scripts.remote_spanner import boundary_answer, en_edges, en_view

logger = logging.getLogger(__name__)

Branch = Literal["en", "boundary", "bfs-tree", "rule-a", "rule-b", "rule-c", "none"]


@dataclass
class OracleDecision:
    edge: Edge
    answer: bool
    branch: Branch
    queries_used: int
    trace: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "edge": list(self.edge),
            "answer": self.answer,
            "branch": self.branch,
            "queries_used": self.queries_used,
            "trace": self.trace,
        }


def lssg_answer(
    g: Graph,
    src: RandomSource,
    params: Params,
    u: int,
    v: int,
    ctr: Optional[QueryCounter] = None,
) -> OracleDecision:
    ctr = ctr if ctr is not None else QueryCounter()
    # Scratch from an earlier call must never leak into this one.
    ctr.scratch.clear()
    start = ctr.count

    for x in (u, v):
        if not 0 <= x < g.n:
            raise GraphInputError(f"vertex {x} out of range [0, {g.n})")
    if v not in neighbors(g, u, ctr):
        raise GraphInputError(f"({u}, {v}) is not an edge of the graph")
    e = edge_key(u, v)

    info_u = find_center(g, src, params, u, ctr)
    info_v = find_center(g, src, params, v, ctr)
    trace: Dict[str, Any] = {"endpoints": [info_u.to_dict(), info_v.to_dict()]}

    if info_u.remote and info_v.remote:
        c_u = en_edges(g, src, params, u, ctr)
        c_v = en_edges(g, src, params, v, ctr)
        answer = e in c_u or e in c_v
        trace["en"] = {
            "h": params.h,
            "kept_by": [x for x, chosen in ((u, c_u), (v, c_v)) if e in chosen],
            "views": [en_view(g, src, params, x, ctr).to_dict() for x in (u, v)],
        }
        return _decide(e, answer, "en" if answer else "none", ctr, start, trace)

    if boundary_answer(info_u, info_v):
        return _decide(e, True, "boundary", ctr, start, trace)

    if info_u.center == info_v.center:
        p_u = bfs_parent(g, src, params, u, ctr)
        p_v = bfs_parent(g, src, params, v, ctr)
        trace["bfs"] = {"parent": {str(u): p_u, str(v): p_v}}
        answer = p_u == v or p_v == u
        return _decide(e, answer, "bfs-tree" if answer else "none", ctr, start, trace)

    q = cluster_of(g, src, params, u, ctr)
    w = cluster_of(g, src, params, v, ctr)
    view_q = adjacency_view(g, src, params, q, ctr)
    view_w = adjacency_view(g, src, params, w, ctr)
    trace["clusters"] = [q.to_dict(), w.to_dict()]
    trace["cell_ranks"] = {str(c): str(cell_order_key(src, c)[0]) for c in (q.center, w.center)}
    rules: List[Dict[str, Any]] = []
    trace["rules"] = rules
    roles = ((q, w, view_q, view_w), (w, q, view_w, view_q))

    for a, b, _, view_b in roles:
        holds = rule_marked(a, b, e, view_b)
        rules.append({"rule": "a", "A": a.root, "B": b.root, "holds": holds, "min_edge": view_b.min_edge_into(a.members)})
        if holds:
            return _decide(e, True, "rule-a", ctr, start, trace)
    for a, b, view_a, _ in roles:
        holds = rule_no_marked_neighbor(a, b, e, view_a)
        rules.append(
            {
                "rule": "b",
                "A": a.root,
                "B": b.root,
                "holds": holds,
                "marked_adjacent_cells": sorted(view_a.marked_adjacent_cells),
                "min_edge": view_a.min_edge_into_cell(b.center),
            }
        )
        if holds:
            return _decide(e, True, "rule-b", ctr, start, trace)
    for a, b, _, _ in roles:
        details: List[Dict[str, Any]] = []
        holds = rule_indirect(g, src, params, a, b, e, ctr, trace=details)
        rules.append({"rule": "c", "A": a.root, "B": b.root, "holds": holds, "details": details})
        if holds:
            return _decide(e, True, "rule-c", ctr, start, trace)
    return _decide(e, False, "none", ctr, start, trace)


def _decide(e: Edge, answer: bool, branch: Branch, ctr: QueryCounter, start: int, trace: Dict[str, Any]) -> OracleDecision:
    used = ctr.count - start
    logger.debug("edge %s -> %s via %s (%d probes)", e, answer, branch, used)
    return OracleDecision(edge=e, answer=answer, branch=branch, queries_used=used, trace=trace)


def render_decision(decision: OracleDecision) -> Tree:
    color = "green" if decision.answer else "red"
    root = Tree(
        f"[bold]{decision.edge}[/bold] -> [{color}]{decision.answer}[/{color}] "
        f"via [cyan]{decision.branch}[/cyan] ({decision.queries_used} probes)"
    )
    ends = root.add("[bold]endpoints[/bold]")
    for info in decision.trace.get("endpoints", []):
        if info["status"] == "remote":
            ends.add(f"{info['vertex']}: [yellow]remote[/yellow]")
        else:
            ends.add(f"{info['vertex']}: center {info['center']} at distance {info['dist']}")

    if "en" in decision.trace:
        en = decision.trace["en"]
        node = root.add(f"[bold]exponential shifts[/bold] (h={en['h']}, kept by {en['kept_by'] or 'nobody'})")
        for view in en["views"]:
            table = Table(title=f"view of {view['v']}", box=box.SIMPLE)
            for col in ("u", "dist", "r_u", "m_u", "via"):
                table.add_column(col)
            for entry in view["entries"]:
                table.add_row(
                    str(entry["u"]), str(entry["dist"]), f"{entry['r_u']:.4f}", f"{entry['m_u']:.4f}", str(entry["via"])
                )
            node.add(table)
    if "bfs" in decision.trace:
        root.add(f"[bold]BFS parents[/bold]: {decision.trace['bfs']['parent']}")
    for cluster in decision.trace.get("clusters", []):
        root.add(
            f"cluster root {cluster['root']} ({cluster['kind']}, center {cluster['center']}, "
            f"{'marked' if cluster['marked'] else 'unmarked'}): {cluster['members']}"
        )
    if "cell_ranks" in decision.trace:
        root.add(f"cell ranks: {decision.trace['cell_ranks']}")
    for rule in decision.trace.get("rules", []):
        mark = "[green]holds[/green]" if rule["holds"] else "[dim]fails[/dim]"
        node = root.add(f"rule ({rule['rule']}) A={rule['A']} B={rule['B']}: {mark}")
        for key, value in rule.items():
            if key in {"rule", "A", "B", "holds", "details"}:
                continue
            node.add(f"{key}: {value}")
        for detail in rule.get("details", []):
            node.add(str(detail))
    return root


def explain(g: Graph, src: RandomSource, params: Params, u: int, v: int) -> str:
    decision = lssg_answer(g, src, params, u, v)
    console = Console(width=120, no_color=True, highlight=False)
    with console.capture() as capture:
        console.print(render_decision(decision))
    return capture.get()
