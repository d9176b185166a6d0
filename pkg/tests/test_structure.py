import json

import pytest
from hypothesis import given

from drn.model import SymbolicState
from drn.structure import (
    InteractionGraph,
    SignedEdge,
    difference_graph,
    global_interaction_graph,
    interaction_graph_over,
    local_interaction_graph,
)

from netgen import networks, networks_with_box
from oracles import box_sign_edges, box_states


def _triples(g):
    return {(e.src, e.dst, e.sign) for e in g.edges}


def test_toy_graphs(toy):
    assert _triples(local_interaction_graph(toy, (1, 1, 0))) == {(0, 0, 1), (0, 1, 1), (1, 2, 1), (2, 2, -1)}
    m = SymbolicState(((1, 2), (1, 1), (0, 1)))
    assert _triples(interaction_graph_over(toy, m)) == {(0, 0, 1), (2, 2, -1)}


def test_thcell_input_self_loops(thcell):
    g = global_interaction_graph(thcell)
    for i in range(3):
        assert SignedEdge(i, i, 1) in g.edges
        assert SignedEdge(i, i, -1) not in g.edges
    assert SignedEdge(0, 3, 1) in g.edges
    assert SignedEdge(16, 13, -1) in g.edges


@given(networks_with_box())
def test_restricted_graph_matches_brute_force(case):
    net, box = case
    expected = box_sign_edges(net.evaluate, box)
    assert _triples(interaction_graph_over(net, box)) == expected
    assert _triples(difference_graph(net, box)) == expected


@given(networks_with_box())
def test_unrestricted_graph_is_union_of_local_graphs(case):
    net, box = case
    union = InteractionGraph(frozenset(range(net.n)))
    for x in box_states(box):
        union = union | local_interaction_graph(net, x)
    assert interaction_graph_over(net, box, restricted=False) == union
    assert interaction_graph_over(net, box_states(box)) == union
    assert interaction_graph_over(net, box).is_subgraph_of(union)


@given(networks())
def test_global_graph_is_union_over_state_space(net):
    assert _triples(global_interaction_graph(net)) == box_sign_edges(net.evaluate, net.state_space)


def test_exports_are_sorted_and_typed(toy):
    g = global_interaction_graph(toy)
    doc = json.loads(g.to_json(toy.names))
    assert doc["vertices"] == ["x1", "x2", "x3"]
    assert doc["edges"][-1] == {"src": "x3", "dst": "x3", "sign": "-"}
    dot = g.to_dot(toy.names)
    assert dot.startswith("digraph G {")
    assert "x3 -> x3 [arrowhead=tee];" in dot
    assert "x1 -> x2;" in dot
    assert g.to_dot(toy.names) == dot


def test_edges_outside_vertex_set_rejected():
    with pytest.raises(ValueError):
        InteractionGraph(frozenset({0}), frozenset({SignedEdge(0, 1, 1)}))
