"""Bounded reachability graphs, the zero-check verification and DOT export."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .compiler import Backend, gadget_zero_check
from .errors import StepnetError
from .net import Marking, NetStructure, Step, apply_step
from .semantics import NetClass, SemanticsMode, Strength, ordered_steps


@dataclass
class ReachGraph:
    net: NetStructure
    mode: SemanticsMode
    initial: Marking
    nodes: list[Marking]  # discovery order, initial first
    edges: list[tuple[Marking, Step, Marking]]
    dead: set[Marking]
    frontier: set[Marking]  # nodes whose successors were not all explored
    truncated: bool
    bound: int
    _out: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for src, step, dst in self.edges:
            self._out.setdefault(src, []).append((step, dst))

    def successors(self, marking: Marking) -> list[tuple[Step, Marking]]:
        return list(self._out.get(marking, ()))

    def out_degree(self, marking: Marking) -> int:
        return len(self._out.get(marking, ()))

    def terminal_markings(self) -> list[Marking]:
        return sorted(self.dead)

    def paths_to_dead(self, limit: int = 1000) -> list[list[Step]]:
        """Step sequences from the initial marking to each dead marking.

        Raises if the graph has a cycle on the way, since then the set of
        paths is infinite.
        """
        paths = []

        def walk(m, acc, on_path):
            if len(paths) > limit:
                raise StepnetError(f"more than {limit} paths")
            if m in self.dead:
                paths.append(list(acc))
                return
            for step, nxt in self._out.get(m, ()):
                if nxt in on_path:
                    raise StepnetError(f"cycle through {nxt}")
                on_path.add(nxt)
                acc.append(step)
                walk(nxt, acc, on_path)
                acc.pop()
                on_path.discard(nxt)

        walk(self.initial, [], {self.initial})
        return paths


def build_rg(net: NetStructure, initial: Marking, mode: SemanticsMode,
             node_budget: int = 10_000) -> ReachGraph:
    """Breadth-first closure of ``initial`` under the steps ``mode`` permits.

    At most ``node_budget`` markings are kept. Once the budget is full, edges
    leading to new markings are dropped, the source stays in ``frontier`` and
    the graph is flagged ``truncated``.
    """
    if node_budget < 1:
        raise ValueError("node_budget must be at least 1")
    mode.check_net(net)
    seen = {initial}
    nodes = [initial]
    edges = []
    dead = set()
    frontier = set()
    queue = deque([initial])
    truncated = False
    while queue:
        m = queue.popleft()
        steps = ordered_steps(m, net, mode)
        if not steps:
            dead.add(m)
            continue
        for step in steps:
            nxt = apply_step(m, step, net)
            if nxt not in seen:
                if len(nodes) >= node_budget:
                    truncated = True
                    frontier.add(m)
                    continue
                seen.add(nxt)
                nodes.append(nxt)
                queue.append(nxt)
            edges.append((m, step, nxt))
    return ReachGraph(net, mode, initial, nodes, edges, dead, frontier, truncated, node_budget)


def _label(items) -> str:
    return ", ".join(t if c == 1 else f"{c}·{t}" for t, c in items)


def export_dot(graph: ReachGraph) -> str:
    """DOT digraph with multiset labels, nodes and edges in canonical marking order."""
    net = graph.net
    order = sorted(graph.nodes)
    ids = {m: f"m{i}" for i, m in enumerate(order)}
    lines = ["digraph rg {", '  node [shape=box, fontname="Helvetica"];']
    for m in order:
        attrs = [f'label="{m}"']
        if m == graph.initial:
            attrs.append("style=bold")
        if m in graph.dead:
            attrs.append("peripheries=2")
        lines.append(f"  {ids[m]} [{', '.join(attrs)}];")
    edges = sorted(graph.edges, key=lambda e: (e[0], e[1].sort_key(net), e[2]))
    for src, step, dst in edges:
        label = _label(sorted(step.items(), key=lambda tc: net.transition_index[tc[0]]))
        lines.append(f'  {ids[src]} -> {ids[dst]} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def rg_to_dict(graph: ReachGraph) -> dict:
    net = graph.net
    order = sorted(graph.nodes)
    ids = {m: i for i, m in enumerate(order)}
    edges = sorted(graph.edges, key=lambda e: (e[0], e[1].sort_key(net), e[2]))
    return {
        "mode": str(graph.mode),
        "places": list(net.places),
        "bound": graph.bound,
        "truncated": graph.truncated,
        "nodes": [
            {"id": ids[m], "marking": m.as_dict(), "initial": m == graph.initial,
             "dead": m in graph.dead, "frontier": m in graph.frontier}
            for m in order
        ],
        "edges": [
            {"source": ids[s], "target": ids[d],
             "step": dict(sorted(step.items(), key=lambda tc: net.transition_index[tc[0]]))}
            for s, step, d in edges
        ],
    }


# -- zero-check verification -------------------------------------------------

STRONG_SLEPTSOV = SemanticsMode(NetClass.SLEPTSOV, Strength.STRONG)


@dataclass
class ZeroCheckCase:
    x: int
    nodes: int
    edges: int
    terminals: list[Marking]
    paths: list[list[str]]
    problems: list[str]

    @property
    def passed(self) -> bool:
        return not self.problems


@dataclass
class VerificationReport:
    cases: list[ZeroCheckCase]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def failures(self) -> list[ZeroCheckCase]:
        return [c for c in self.cases if not c.passed]

    def summary(self) -> str:
        lines = []
        for c in self.cases:
            verdict = "ok  " if c.passed else "FAIL"
            terms = " ".join(str(m) for m in c.terminals) or "-"
            paths = " | ".join(" ; ".join(p) for p in c.paths) or "-"
            lines.append(f"{verdict} x={c.x:<3} nodes={c.nodes} edges={c.edges} "
                         f"terminal={terms} paths={paths}")
            lines += [f"     {p}" for p in c.problems]
        return "\n".join(lines)


def check_zero_case(x: int, node_budget: int = 64) -> ZeroCheckCase:
    """Explore the strong Sleptsov zero-check gadget from {p1, x·p4, p8} and compare with the expected behaviour."""
    gadget = gadget_zero_check(Backend.STRONG_SLEPTSOV)
    net = gadget.net
    start = gadget.marking(start=1, register=x)
    graph = build_rg(net, start, STRONG_SLEPTSOV, node_budget)
    problems = []
    if graph.truncated:
        problems.append(f"graph exceeded {node_budget} nodes")
    try:
        paths = [[str(s) for s in p] for p in graph.paths_to_dead()]
    except StepnetError as exc:
        paths = []
        problems.append(str(exc))
    terminals = graph.terminal_markings()

    def expect(what, got, want):
        if got != want:
            problems.append(f"{what}: expected {want}, got {got}")

    if x == 0:
        expect("nodes", len(graph.nodes), 1)
        expect("edges", len(graph.edges), 0)
        expect("terminals", terminals, [start])
    elif x == 1:
        expect("nodes", len(graph.nodes), 5)
        expect("terminals", terminals, [gadget.marking(jump=1, register=1)])
        expect("paths", sorted(paths), [["t1", "t2", "t5"], ["t1", "t3", "t6"]])
    else:
        expect("nodes", len(graph.nodes), 4)
        expect("edges", len(graph.edges), 3)
        expect("terminals", terminals, [gadget.marking(finish=1, register=x)])
        expect("paths", paths, [["t1", "2·t2", "t4"]])
    if x >= 1:
        for m in terminals:
            if m["p4"] != x or m["p8"] != 1:
                problems.append(f"terminal {m} does not preserve x·p4 and p8")
    return ZeroCheckCase(x, len(graph.nodes), len(graph.edges), terminals, paths, problems)


def verify_zero_check(x_max: int) -> VerificationReport:
    """Check the strong Sleptsov zero-check gadget for every register marking 0..x_max."""
    if x_max < 1:
        raise ValueError("x_max must be at least 1")
    return VerificationReport([check_zero_case(x) for x in range(x_max + 1)])
