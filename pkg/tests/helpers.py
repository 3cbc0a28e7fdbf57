"""Shared test utilities: independent oracles and random-structure generators.

Oracles here deliberately avoid the library's own code paths: the fuzzy
clustering reference is textbook loops, the importance oracle is a plain
recursive longest-path search, and the net validator re-derives acyclicity
and row counting from scratch.
"""

import itertools
import math
import random

import numpy as np

from fuzzycp import CPNet, ClusterModel, KnowledgeBase, PreferenceVariable
from fuzzycp.kb import AttributeEntry, MembershipMatrix


def reference_fcm(values, c, m, tol=1e-9, max_iter=500, init=None):
    """Plain-loop fuzzy c-means; returns (sorted centroids, memberships, trace)."""
    x = [float(v) for v in values]
    n = len(x)
    if init is None:
        ordered = sorted(x)
        cents = [ordered[min(n - 1, int((j + 0.5) / c * n))] for j in range(c)]
    else:
        cents = [float(v) for v in init]
    trace = []
    u = [[0.0] * c for _ in range(n)]
    for _ in range(max_iter):
        for i in range(n):
            d = [abs(x[i] - cj) for cj in cents]
            if min(d) == 0.0:
                hits = [1.0 if dj == 0.0 else 0.0 for dj in d]
                total = sum(hits)
                u[i] = [h / total for h in hits]
            else:
                u[i] = [
                    1.0 / sum((d[j] / d[k]) ** (2.0 / (m - 1.0)) for k in range(c))
                    for j in range(c)
                ]
        new = []
        for j in range(c):
            num = sum((u[i][j] ** m) * x[i] for i in range(n))
            den = sum(u[i][j] ** m for i in range(n))
            new.append(num / den if den > 0 else cents[j])
        trace.append(
            sum((u[i][j] ** m) * (x[i] - new[j]) ** 2 for i in range(n) for j in range(c))
        )
        movement = max(abs(a - b) for a, b in zip(new, cents))
        cents = new
        if movement < tol:
            break
    order = sorted(range(c), key=lambda j: cents[j])
    cents = [cents[j] for j in order]
    u = [[row[j] for j in order] for row in u]
    return cents, u, trace


def longest_path_importance(nodes, edges):
    """1 + longest downward path to a leaf, by naive recursion."""
    children = {n: [] for n in nodes}
    for parent, child in edges:
        children[parent].append(child)

    def depth(n):
        if not children[n]:
            return 1
        return 1 + max(depth(c) for c in children[n])

    return {n: depth(n) for n in nodes}


def brute_force_valid(net: CPNet) -> bool:
    """Re-derive the net invariants without the library's validator."""
    names = [v.name for v in net.nodes]
    if len(set(names)) != len(names):
        return False
    known = set(names)
    if any(p not in known or c not in known for p, c in net.edges):
        return False
    children = {n: set() for n in names}
    for p, c in net.edges:
        children[p].add(c)

    # cycle search from every node
    for start in names:
        frontier, seen = list(children[start]), set()
        while frontier:
            node = frontier.pop()
            if node == start:
                return False
            if node in seen:
                continue
            seen.add(node)
            frontier.extend(children[node])

    for v in net.nodes:
        parents = net.parent_names(v.name)
        rows = net.cpt.get(v.name)
        if rows is None:
            return False
        expected = list(itertools.product(*(net.variable(p).domain for p in parents)))
        if sorted(rows) != sorted(expected):
            return False
        if any(sorted(order) != sorted(v.domain) for order in rows.values()):
            return False
    return True


def random_cpnet(rng: random.Random, max_nodes=8, max_domain=4, edge_prob=0.3,
                 max_parents=3) -> CPNet:
    """Random acyclic net with complete cpts; domains of size 2..max_domain."""
    n = rng.randint(1, max_nodes)
    nodes = []
    for i in range(n):
        size = rng.randint(2, max_domain)
        nodes.append(PreferenceVariable(f"v{i}", tuple(f"v{i}_{j}" for j in range(size))))
    edges = []
    parent_count = {v.name: 0 for v in nodes}
    for j in range(n):
        for i in range(j):
            if parent_count[nodes[j].name] >= max_parents:
                break
            if rng.random() < edge_prob:
                edges.append((nodes[i].name, nodes[j].name))
                parent_count[nodes[j].name] += 1
    net_parents = {v.name: [p for p, c in edges if c == v.name] for v in nodes}
    cpt = {}
    for v in nodes:
        domains = [next(x.domain for x in nodes if x.name == p) for p in net_parents[v.name]]
        rows = {}
        for key in itertools.product(*domains):
            order = list(v.domain)
            rng.shuffle(order)
            rows[key] = tuple(order)
        cpt[v.name] = rows
    return CPNet(nodes=tuple(nodes), edges=tuple(edges), cpt=cpt)


def random_dag(rng: random.Random, max_nodes=8, edge_prob=0.35):
    """Random DAG as (node names, edges); no cpts attached."""
    n = rng.randint(1, max_nodes)
    names = [f"n{i}" for i in range(n)]
    edges = [
        (names[i], names[j])
        for j in range(n)
        for i in range(j)
        if rng.random() < edge_prob
    ]
    return names, edges


def dag_as_net(names, edges) -> CPNet:
    """Wrap a bare DAG in a minimal valid net (binary domains everywhere)."""
    nodes = tuple(PreferenceVariable(n, (f"{n}_a", f"{n}_b")) for n in names)
    parents = {n: [p for p, c in edges if c == n] for n in names}
    cpt = {
        n: {
            key: (f"{n}_a", f"{n}_b")
            for key in itertools.product(
                *((f"{p}_a", f"{p}_b") for p in parents[n])
            )
        }
        for n in names
    }
    return CPNet(nodes=nodes, edges=tuple(edges), cpt=cpt)


def kb_for_net(net: CPNet, rng: random.Random | None = None):
    """Synthetic knowledge base whose labels cover every variable's domain.

    Each variable gets its own attribute named ``attr_<var>`` with one
    cluster per domain value; centroids are ascending and, when an rng is
    given, randomly spaced.  Returns (kb, bindings).
    """
    entries = {}
    bindings = {}
    for v in net.nodes:
        attribute = f"attr_{v.name}"
        k = len(v.domain)
        if rng is None:
            centroids = tuple(float(i) for i in range(k))
        else:
            start = rng.uniform(-5.0, 5.0)
            gaps = [rng.uniform(0.5, 3.0) for _ in range(k)]
            acc, centroids = start, []
            for g in gaps:
                acc += g
                centroids.append(acc)
            centroids = tuple(centroids)
        model = ClusterModel(
            attribute=attribute, centroids=centroids, labels=v.domain, fuzzifier=2.0
        )
        memberships = MembershipMatrix(attribute, np.full((1, k), 1.0 / k))
        entries[attribute] = AttributeEntry(model, memberships)
        bindings[v.name] = attribute
    return KnowledgeBase(entries=entries, provenance={}), bindings


def random_weighted_query(rng: random.Random, allow_missing=False):
    """Random compiled query plus a record generator for it.

    Returns (kb, query, draw_record) where draw_record() yields attribute
    -> value maps roughly spanning the centroid range; when
    ``allow_missing`` is set some attributes are occasionally dropped.
    """
    from fuzzycp import assign_utilities, rewrite_query

    net = random_cpnet(rng, max_nodes=4, max_domain=3, edge_prob=0.4)
    kb, bindings = kb_for_net(net, rng)
    ucp = assign_utilities(net)
    term_count = rng.randint(1, min(6, net.outcome_count()))
    query = rewrite_query(net, ucp, kb, bindings, term_count)

    def draw_record():
        record = {}
        for attribute, entry in kb.entries.items():
            if allow_missing and rng.random() < 0.15:
                continue
            lo = entry.model.centroids[0] - 2.0
            hi = entry.model.centroids[-1] + 2.0
            record[attribute] = rng.uniform(lo, hi)
        return record

    return kb, query, draw_record


def brute_force_top_terms(ucp, term_count):
    """Independent top-T outcome selection: full enumeration, stable sort."""
    from fuzzycp import enumerate_outcomes, outcome_utility

    outcomes = list(enumerate_outcomes(ucp.net))
    scored = sorted(
        enumerate(outcomes), key=lambda pair: (-outcome_utility(ucp, pair[1]), pair[0])
    )
    return [o for _, o in scored[:term_count]]


def is_finite(x):
    return isinstance(x, (int, float)) and math.isfinite(x)
