"""Conditional preference networks.

A net is a directed acyclic graph over preference variables.  Every node
carries a conditional preference table (cpt): for each complete assignment
of its parents, a total order over the node's own domain, most preferred
value first.  Node importance falls out of graph position alone: leaves
count 1, every internal node counts one more than its deepest child.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .errors import CapacityError, ValidationError

OUTCOME_CAP = 1_000_000


@dataclass(frozen=True)
class PreferenceVariable:
    name: str
    domain: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        if not self.domain:
            raise ValueError(f"variable {self.name!r} has an empty domain")
        if len(set(self.domain)) != len(self.domain):
            raise ValueError(f"variable {self.name!r} repeats a domain value")


@dataclass(frozen=True)
class Violation:
    """One broken invariant, identified by the node or edge it concerns."""

    kind: str
    subject: str
    message: str

    def __str__(self):
        return f"{self.kind} at {self.subject}: {self.message}"


@dataclass
class CPNet:
    """Preference graph plus conditional preference tables.

    ``nodes`` keeps declaration order, which breaks every tie in this
    package (topological sorts, outcome enumeration, serialization).
    ``cpt`` maps node name -> parent-value tuple -> preference order
    (best first).  Parent values inside a key follow the order the
    parents were declared in ``edges``.
    """

    nodes: tuple[PreferenceVariable, ...]
    edges: tuple[tuple[str, str], ...]
    cpt: dict[str, dict[tuple[str, ...], tuple[str, ...]]]
    _by_name: dict[str, PreferenceVariable] = field(init=False, repr=False)

    def __post_init__(self):
        self.nodes = tuple(self.nodes)
        self.edges = tuple((p, c) for p, c in self.edges)
        self.cpt = {
            node: {tuple(k): tuple(v) for k, v in rows.items()}
            for node, rows in self.cpt.items()
        }
        self._by_name = {v.name: v for v in self.nodes}

    def variable(self, name: str) -> PreferenceVariable:
        return self._by_name[name]

    def parent_names(self, name: str) -> tuple[str, ...]:
        seen = []
        for parent, child in self.edges:
            if child == name and parent not in seen:
                seen.append(parent)
        return tuple(seen)

    def child_names(self, name: str) -> tuple[str, ...]:
        seen = []
        for parent, child in self.edges:
            if parent == name and child not in seen:
                seen.append(child)
        return tuple(seen)

    def outcome_count(self) -> int:
        return math.prod(len(v.domain) for v in self.nodes)


def validate_cpnet(net: CPNet) -> list[Violation]:
    """Check every structural invariant; an empty list means a valid net.

    Violations are returned, never raised: the report is data.
    """
    report: list[Violation] = []
    names = [v.name for v in net.nodes]
    known = set(names)
    for name in sorted({n for n in names if names.count(n) > 1}):
        report.append(Violation("node", name, "declared more than once"))

    seen_edges = set()
    for parent, child in net.edges:
        for end in (parent, child):
            if end not in known:
                report.append(Violation("edge", f"{parent}->{child}", f"unknown node {end!r}"))
        if (parent, child) in seen_edges:
            report.append(Violation("edge", f"{parent}->{child}", "duplicate edge"))
        seen_edges.add((parent, child))

    cycle = _find_cycle(known, net.edges)
    if cycle:
        report.append(
            Violation("cycle", " -> ".join(cycle), "dependencies form a cycle")
        )

    for node in net.nodes:
        rows = net.cpt.get(node.name)
        if rows is None:
            report.append(Violation("cpt", node.name, "no preference table"))
            continue
        parents = [p for p in net.parent_names(node.name) if p in known]
        expected = set(
            itertools.product(*(net.variable(p).domain for p in parents))
        )
        for key in sorted(set(rows) - expected):
            report.append(
                Violation("cpt", node.name, f"row for impossible parent context {key!r}")
            )
        for key in sorted(expected - set(rows)):
            report.append(
                Violation("cpt", node.name, f"missing row for parent context {key!r}")
            )
        for key, order in sorted(rows.items()):
            if sorted(order) != sorted(node.domain):
                report.append(
                    Violation(
                        "cpt",
                        node.name,
                        f"row {key!r} is not a total order over the domain: {order!r}",
                    )
                )
    return report


def _find_cycle(names, edges) -> list[str] | None:
    """Return one cycle as a node path, or None. Iterative DFS, three colors."""
    adjacency: dict[str, list[str]] = {n: [] for n in names}
    for parent, child in edges:
        if parent in adjacency and child in adjacency:
            adjacency[parent].append(child)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {n: WHITE for n in names}
    for root in names:
        if color[root] != WHITE:
            continue
        stack = [(root, iter(adjacency[root]))]
        path = [root]
        color[root] = GRAY
        while stack:
            node, children = stack[-1]
            advanced = False
            for nxt in children:
                if color[nxt] == GRAY:
                    start = path.index(nxt)
                    return path[start:] + [nxt]
                if color[nxt] == WHITE:
                    color[nxt] = GRAY
                    stack.append((nxt, iter(adjacency[nxt])))
                    path.append(nxt)
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
                path.pop()
    return None


def require_valid(net: CPNet) -> None:
    report = validate_cpnet(net)
    if report:
        raise ValidationError(report)


def topological_order(net: CPNet) -> tuple[str, ...]:
    """Parents before children; ties resolved by declaration order."""
    names = [v.name for v in net.nodes]
    indegree = {n: 0 for n in names}
    for parent, child in set(net.edges):
        indegree[child] += 1
    order = []
    remaining = list(names)
    while remaining:
        ready = next((n for n in remaining if indegree[n] == 0), None)
        if ready is None:
            raise ValidationError(
                [Violation("cycle", ",".join(remaining), "dependencies form a cycle")]
            )
        remaining.remove(ready)
        order.append(ready)
        for parent, child in set(net.edges):
            if parent == ready:
                indegree[child] -= 1
    return tuple(order)


def node_importance(net: CPNet) -> dict[str, int]:
    """Positional importance of every node.

    Leaves score 1; an internal node scores one more than the maximum over
    its direct children, i.e. 1 + the longest downward path to a leaf.
    """
    require_valid(net)
    importance: dict[str, int] = {}
    for name in reversed(topological_order(net)):
        children = net.child_names(name)
        if children:
            importance[name] = 1 + max(importance[c] for c in children)
        else:
            importance[name] = 1
    return importance


def enumerate_outcomes(net: CPNet, cap: int = OUTCOME_CAP):
    """Yield every complete assignment exactly once.

    Order is lexicographic over (topologically sorted node, domain index),
    so the first outcome assigns every node its first domain value.
    """
    require_valid(net)
    count = net.outcome_count()
    if count > cap:
        raise CapacityError(f"outcome space {count} exceeds cap {cap}")
    order = topological_order(net)
    domains = [net.variable(n).domain for n in order]

    def generate():
        for combo in itertools.product(*domains):
            yield dict(zip(order, combo))

    return generate()
