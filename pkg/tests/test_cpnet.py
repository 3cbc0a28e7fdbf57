import random

import pytest

from fuzzycp import (
    CapacityError,
    CPNet,
    PreferenceVariable,
    ValidationError,
    enumerate_outcomes,
    node_importance,
    topological_order,
    validate_cpnet,
)
from helpers import brute_force_valid, dag_as_net, longest_path_importance, random_cpnet, random_dag


def single_node(name="x", domain=("a", "b")):
    return CPNet(
        nodes=(PreferenceVariable(name, domain),),
        edges=(),
        cpt={name: {(): domain}},
    )


def chain_abc():
    nodes = (
        PreferenceVariable("A", ("a1", "a2")),
        PreferenceVariable("B", ("b1", "b2")),
        PreferenceVariable("C", ("c1", "c2")),
    )
    cpt = {
        "A": {(): ("a1", "a2")},
        "B": {("a1",): ("b1", "b2"), ("a2",): ("b2", "b1")},
        "C": {("b1",): ("c1", "c2"), ("b2",): ("c2", "c1")},
    }
    return CPNet(nodes=nodes, edges=(("A", "B"), ("B", "C")), cpt=cpt)


# --- validation --------------------------------------------------------------


def test_minimal_net_is_valid():
    assert validate_cpnet(single_node()) == []


def test_self_edge_is_a_cycle():
    net = CPNet(
        nodes=(PreferenceVariable("X", ("a", "b")),),
        edges=(("X", "X"),),
        cpt={"X": {("a",): ("a", "b"), ("b",): ("a", "b")}},
    )
    report = validate_cpnet(net)
    assert any(v.kind == "cycle" and "X" in v.subject for v in report)


def test_missing_cpt_row_is_reported():
    net = CPNet(
        nodes=(
            PreferenceVariable("P", ("p1", "p2")),
            PreferenceVariable("Q", ("q1", "q2")),
        ),
        edges=(("P", "Q"),),
        cpt={"P": {(): ("p1", "p2")}, "Q": {("p1",): ("q1", "q2")}},
    )
    report = validate_cpnet(net)
    assert any(v.kind == "cpt" and "missing row" in v.message for v in report)


def test_non_permutation_row_is_reported():
    net = single_node()
    net.cpt["x"][()] = ("a", "a")
    report = validate_cpnet(net)
    assert any("total order" in v.message for v in report)


def test_unknown_edge_endpoint_is_reported():
    net = CPNet(
        nodes=(PreferenceVariable("X", ("a",)),),
        edges=(("X", "ghost"),),
        cpt={"X": {(): ("a",)}},
    )
    assert any(v.kind == "edge" for v in validate_cpnet(net))


def test_validator_matches_brute_force_on_random_nets():
    rng = random.Random(100)
    for _ in range(150):
        net = random_cpnet(rng)
        assert (validate_cpnet(net) == []) == brute_force_valid(net)


def test_validator_matches_brute_force_on_broken_nets():
    rng = random.Random(101)
    for _ in range(150):
        net = random_cpnet(rng, max_nodes=5)
        mutation = rng.choice(["drop_row", "dup_value", "reverse_edge", "ghost_edge"])
        if mutation == "drop_row":
            victim = rng.choice(list(net.cpt))
            rows = dict(net.cpt[victim])
            rows.pop(rng.choice(list(rows)))
            net.cpt[victim] = rows
        elif mutation == "dup_value":
            victim = rng.choice(list(net.cpt))
            rows = dict(net.cpt[victim])
            key = rng.choice(list(rows))
            first = rows[key][0]
            rows[key] = tuple(first for _ in rows[key])
            net.cpt[victim] = rows
        elif mutation == "reverse_edge":
            if not net.edges:
                continue
            parent, child = rng.choice(net.edges)
            net.edges = net.edges + ((child, parent),)
        else:
            net.edges = net.edges + ((net.nodes[0].name, "ghost"),)
        assert (validate_cpnet(net) == []) == brute_force_valid(net)


# --- importance --------------------------------------------------------------


def test_isolated_node_importance():
    assert node_importance(single_node()) == {"x": 1}


def test_chain_importance():
    assert node_importance(chain_abc()) == {"A": 3, "B": 2, "C": 1}


def test_diamond_importance():
    # A -> B, A -> C, B -> D, C -> D: depths D=1, B=C=2, A=3
    names = ["A", "B", "C", "D"]
    edges = [("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")]
    net = dag_as_net(names, edges)
    importance = node_importance(net)
    assert importance == {"A": 3, "B": 2, "C": 2, "D": 1}
    assert importance == longest_path_importance(names, edges)


def test_importance_on_random_dags_matches_oracle():
    rng = random.Random(7)
    for _ in range(200):
        names, edges = random_dag(rng)
        net = dag_as_net(names, edges)
        assert node_importance(net) == longest_path_importance(names, edges)


def test_importance_invariant_under_relabeling():
    rng = random.Random(13)
    for _ in range(50):
        names, edges = random_dag(rng, max_nodes=6)
        mapping = {n: f"renamed_{n}" for n in names}
        base = node_importance(dag_as_net(names, edges))
        relabeled = node_importance(
            dag_as_net(
                [mapping[n] for n in names],
                [(mapping[p], mapping[c]) for p, c in edges],
            )
        )
        assert relabeled == {mapping[n]: g for n, g in base.items()}


def test_importance_rejects_invalid_net():
    net = single_node()
    net.cpt["x"][()] = ("a", "a")
    with pytest.raises(ValidationError):
        node_importance(net)


# --- enumeration -------------------------------------------------------------


def test_enumerate_single_binary_variable():
    outcomes = list(enumerate_outcomes(single_node()))
    assert outcomes == [{"x": "a"}, {"x": "b"}]


def test_enumerate_two_binary_variables_lexicographic():
    nodes = (
        PreferenceVariable("X", ("x1", "x2")),
        PreferenceVariable("Y", ("y1", "y2")),
    )
    net = CPNet(
        nodes=nodes,
        edges=(),
        cpt={"X": {(): ("x1", "x2")}, "Y": {(): ("y1", "y2")}},
    )
    outcomes = [(o["X"], o["Y"]) for o in enumerate_outcomes(net)]
    assert outcomes == [("x1", "y1"), ("x1", "y2"), ("x2", "y1"), ("x2", "y2")]


def test_enumerate_counts_products():
    nodes = (
        PreferenceVariable("X", ("a", "b")),
        PreferenceVariable("Y", ("c", "d", "e")),
        PreferenceVariable("Z", ("f", "g")),
    )
    net = CPNet(
        nodes=nodes,
        edges=(),
        cpt={"X": {(): ("a", "b")}, "Y": {(): ("c", "d", "e")}, "Z": {(): ("f", "g")}},
    )
    outcomes = list(enumerate_outcomes(net))
    assert len(outcomes) == 12
    assert len({tuple(sorted(o.items())) for o in outcomes}) == 12


def test_enumerate_respects_cap():
    net = chain_abc()
    with pytest.raises(CapacityError):
        enumerate_outcomes(net, cap=7)


def test_topological_order_is_stable():
    net = chain_abc()
    assert topological_order(net) == ("A", "B", "C")
