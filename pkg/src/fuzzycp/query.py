"""Compile parsed preference queries into weighted disjunctive form.

A compiled query is a disjunction of conjunctive terms.  Each term is one
complete outcome of the preference net (every variable paired with a value
and a traceability weight), and terms are the top-T outcomes by additive
utility, most important first.  A term's importance is its normalized
utility, so the best outcome always opens the list with importance 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .cpnet import (
    CPNet,
    PreferenceVariable,
    enumerate_outcomes,
    node_importance,
    require_valid,
)
from .dsl import QuerySpec, format_query, parse_query
from .errors import BindingError, CapacityError, ConfigError
from .kb import KnowledgeBase
from .ucp import UCPNet, UtilityRows, assign_utilities, outcome_utility, term_importance


def build_cpnet(spec: QuerySpec) -> CPNet:
    """Transcribe a QuerySpec into a validated CPNet.

    Raises ValidationError when the dependencies cycle or the preference
    rows do not cover every parent context.
    """
    nodes = tuple(
        PreferenceVariable(name=v.name, domain=v.domain) for v in spec.variables
    )
    edges = tuple(
        (parent, v.name) for v in spec.variables for parent in v.parents
    )
    cpt = {
        v.name: {
            tuple(value for _parent, value in row.context): row.order
            for row in v.preferences
        }
        for v in spec.variables
    }
    net = CPNet(nodes=nodes, edges=edges, cpt=cpt)
    require_valid(net)
    return net


@dataclass(frozen=True)
class Term:
    """One conjunctive disjunct: a complete assignment with weights."""

    assignment: dict[str, str]
    weights: dict[str, float]
    importance: float


@dataclass
class WeightedQuery:
    """Disjunction of weighted terms plus everything needed to score records."""

    spec: QuerySpec
    net: CPNet
    ucp: UCPNet
    bindings: dict[str, str]  # variable -> dataset attribute
    terms: tuple[Term, ...]

    def __post_init__(self):
        self.terms = tuple(self.terms)
        names = {v.name for v in self.net.nodes}
        for term in self.terms:
            if set(term.assignment) != names:
                raise ValueError("term does not assign every query variable")
        importances = [t.importance for t in self.terms]
        if any(b > a for a, b in zip(importances, importances[1:])):
            raise ValueError("terms must be ordered by non-increasing importance")


def rewrite_query(
    net: CPNet,
    ucp: UCPNet,
    kb: KnowledgeBase,
    bindings: dict[str, str],
    term_count: int | None = None,
    spec: QuerySpec | None = None,
) -> WeightedQuery:
    """Expand the net into its top-T outcomes, weighted and sorted.

    Every variable must be bound to a knowledge-base attribute whose labels
    include the variable's whole domain.  Ties in utility break
    lexicographically (topological node order, then domain position), which
    is exactly the enumeration order.
    """
    _check_bindings(net, kb, bindings)
    outcomes = list(enumerate_outcomes(net))
    if term_count is None:
        term_count = min(5, len(outcomes))
    if term_count < 1:
        raise ValueError("term count must be at least 1")
    if term_count > len(outcomes):
        raise CapacityError(
            f"asked for {term_count} terms but the net has only "
            f"{len(outcomes)} outcomes"
        )

    scored = [(outcome_utility(ucp, o), o) for o in outcomes]
    scored.sort(key=lambda pair: -pair[0])

    declaration_order = [v.name for v in net.nodes]
    terms = []
    for utility, outcome in scored[:term_count]:
        assignment = {name: outcome[name] for name in declaration_order}
        weights = {}
        for name in declaration_order:
            model = kb.model(bindings[name])
            idx = model.label_index(assignment[name])
            # Self-membership of the label's own centroid: 1.0 by the
            # zero-distance rule, recomputed rather than assumed.
            weights[name] = float(
                kb.membership_of(bindings[name], model.centroids[idx])[idx]
            )
        terms.append(
            Term(
                assignment=assignment,
                weights=weights,
                importance=term_importance(ucp, outcome),
            )
        )
    return WeightedQuery(
        spec=spec if spec is not None else _spec_from_net(net, bindings, term_count),
        net=net,
        ucp=ucp,
        bindings=dict(bindings),
        terms=tuple(terms),
    )


def _check_bindings(net: CPNet, kb: KnowledgeBase, bindings: dict[str, str]) -> None:
    for variable in net.nodes:
        attribute = bindings.get(variable.name)
        if attribute is None:
            raise BindingError(f"variable {variable.name!r} is not bound to an attribute")
        if attribute not in kb.entries:
            raise BindingError(
                f"variable {variable.name!r} is bound to {attribute!r}, "
                "which the knowledge base does not cover"
            )
        labels = set(kb.model(attribute).labels)
        missing = [v for v in variable.domain if v not in labels]
        if missing:
            raise BindingError(
                f"attribute {attribute!r} has no clusters labeled {missing} "
                f"(variable {variable.name!r})"
            )


def _spec_from_net(net, bindings, term_count) -> QuerySpec:
    """Fallback spec for nets assembled without the DSL (tests, library use)."""
    from .dsl import PrefRow, VariableSpec

    variables = []
    for node in net.nodes:
        parents = net.parent_names(node.name)
        rows = tuple(
            PrefRow(context=tuple(zip(parents, key)), order=order)
            for key, order in net.cpt[node.name].items()
        )
        variables.append(
            VariableSpec(
                name=node.name,
                attribute=bindings[node.name],
                parents=parents,
                domain=node.domain,
                preferences=rows,
            )
        )
    return QuerySpec(variables=tuple(variables), term_count=term_count)


def compile_query(
    text: str,
    kb: KnowledgeBase,
    term_count: int | None = None,
    utilities: str = "steps",
) -> WeightedQuery:
    """Parse, build, weight, and rewrite a query in one step."""
    spec = parse_query(text)
    net = build_cpnet(spec)
    bindings = {v.name: v.attribute for v in spec.variables}
    ucp = assign_utilities(net, mode=utilities, kb=kb, bindings=bindings)
    requested = term_count if term_count is not None else spec.term_count
    return rewrite_query(net, ucp, kb, bindings, requested, spec=spec)


# --- compiled-query document ------------------------------------------------


def query_to_document(query: WeightedQuery) -> dict:
    net, ucp = query.net, query.ucp
    nodes = []
    for v in net.nodes:
        nodes.append(
            {
                "name": v.name,
                "attribute": query.bindings[v.name],
                "domain": list(v.domain),
                "parents": list(net.parent_names(v.name)),
            }
        )
    cpt = {
        v.name: [
            {
                "when": dict(zip(net.parent_names(v.name), key)),
                "order": list(order),
            }
            for key, order in net.cpt[v.name].items()
        ]
        for v in net.nodes
    }
    utilities = {
        v.name: {
            "step": ucp.steps[v.name],
            "minspan": ucp.spans[v.name][0],
            "maxspan": ucp.spans[v.name][1],
            "rows": [
                {
                    "when": dict(zip(net.parent_names(v.name), key)),
                    "values": dict(row),
                }
                for key, row in ucp.tables[v.name].items()
            ],
        }
        for v in net.nodes
    }
    return {
        "format_version": 1,
        "query": format_query(query.spec),
        "bindings": dict(query.bindings),
        "cpnet": {
            "nodes": nodes,
            "edges": [list(e) for e in net.edges],
            "cpt": cpt,
        },
        "utilities": utilities,
        "max_total_utility": ucp.max_total_utility,
        "importance": node_importance(net),
        "terms": [
            {
                "assignment": dict(t.assignment),
                "weights": dict(t.weights),
                "importance": t.importance,
            }
            for t in query.terms
        ],
    }


def query_from_document(doc: dict) -> WeightedQuery:
    if doc.get("format_version") != 1:
        raise ConfigError("unsupported compiled-query document version")
    spec = parse_query(doc["query"])
    net_doc = doc["cpnet"]
    nodes = tuple(
        PreferenceVariable(n["name"], tuple(n["domain"])) for n in net_doc["nodes"]
    )
    edges = tuple((p, c) for p, c in net_doc["edges"])
    parents = {n["name"]: tuple(n["parents"]) for n in net_doc["nodes"]}
    cpt = {
        name: {
            tuple(row["when"][p] for p in parents[name]): tuple(row["order"])
            for row in rows
        }
        for name, rows in net_doc["cpt"].items()
    }
    net = CPNet(nodes=nodes, edges=edges, cpt=cpt)
    require_valid(net)

    tables: dict[str, UtilityRows] = {}
    steps: dict[str, int | None] = {}
    spans: dict[str, tuple[float, float]] = {}
    for name, block in doc["utilities"].items():
        tables[name] = {
            tuple(row["when"][p] for p in parents[name]): {
                value: float(u) for value, u in row["values"].items()
            }
            for row in block["rows"]
        }
        steps[name] = block["step"]
        spans[name] = (block["minspan"], block["maxspan"])
    ucp = UCPNet(
        net=net,
        tables=tables,
        steps=steps,
        spans=spans,
        max_total_utility=doc["max_total_utility"],
    )
    terms = tuple(
        Term(
            assignment=dict(t["assignment"]),
            weights={k: float(w) for k, w in t["weights"].items()},
            importance=float(t["importance"]),
        )
        for t in doc["terms"]
    )
    return WeightedQuery(
        spec=spec,
        net=net,
        ucp=ucp,
        bindings=dict(doc["bindings"]),
        terms=terms,
    )


def dump_query(query: WeightedQuery) -> str:
    return json.dumps(query_to_document(query), ensure_ascii=False, indent=2) + "\n"


def save_query(query: WeightedQuery, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dump_query(query))


def load_query(path) -> WeightedQuery:
    with open(path, encoding="utf-8") as f:
        return query_from_document(json.load(f))
