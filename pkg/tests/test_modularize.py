import numpy as np
import pytest

from drn.dynamics import Attractor, attractors, build_stg, project_dynamics
from drn.errors import NotAComponentUnion, NotSymbolicSteadyState
from drn.model import SymbolicState
from drn.modularize import (
    analyze,
    build_module,
    compose_attractors,
    decompose,
    product_stg,
    theta_components,
    theta_graph,
)
from drn.symbolic import derive_steady_state, frozen_core

from netgen import random_network, random_start_box
from oracles import attractor_sets, box_states, stg_edges

TOY_M = SymbolicState(((1, 2), (1, 1), (0, 1)))


def test_toy_theta_graph_and_modules(toy):
    tg = theta_graph(toy, TOY_M)
    assert {(e.src, e.dst, e.sign) for e in tg.graph.edges} == {(0, 0, 1), (2, 2, -1)}
    assert theta_components(tg) == [frozenset({0}), frozenset({2})]
    z1, z2 = decompose(toy, TOY_M)
    assert [z1.evaluate((z,)) for z in (1, 2)] == [(1,), (2,)]
    assert [z2.evaluate((z,)) for z in (0, 1)] == [(1,), (0,)]
    assert attractors(z1.stg()) == [Attractor(((1,),)), Attractor(((2,),))]
    assert attractors(z2.stg()) == [Attractor(((0,), (1,)))]
    assert product_stg(toy, TOY_M, [z1, z2]) == build_stg(toy, TOY_M)
    assert analyze(toy, TOY_M).composed == attractors(build_stg(toy))


def test_module_domain_keeps_original_levels(toy):
    z1 = decompose(toy, TOY_M)[0]
    assert z1.state_space == SymbolicState(((1, 2),))
    assert z1.embed((2,)) == SymbolicState(((2, 2), (1, 1), (0, 1)))
    with pytest.raises(ValueError):
        z1.evaluate((0,))


def test_non_steady_box_is_rejected(toy):
    with pytest.raises(NotSymbolicSteadyState):
        theta_graph(toy, toy.state_space)


def test_module_vertices_must_be_component_unions(toy):
    with pytest.raises(NotAComponentUnion):
        build_module(toy, TOY_M, {1})
    both = build_module(toy, TOY_M, {0, 2})
    assert both.size == 4
    assert product_stg(toy, TOY_M, [both]) == build_stg(toy, TOY_M)


def _symbolic_cases(seed, count, max_states=2**10):
    rng = np.random.default_rng(seed)
    found = 0
    while found < count:
        net = random_network(rng, max_states=max_states)
        box, _ = derive_steady_state(net, frozen_core(net, random_start_box(rng, net)))
        if box.is_regular:
            continue
        found += 1
        yield net, box


def test_module_functions_commute_with_projection():
    for net, box in _symbolic_cases(1, 60):
        for module in decompose(net, box):
            for x in box_states(box):
                assert module.evaluate(module.project(x)) == module.project(net.evaluate(x))


def test_module_graph_is_theta_graph_on_its_vertices():
    for net, box in _symbolic_cases(2, 60):
        theta = theta_graph(net, box).graph
        for module in decompose(net, box):
            inside = {e for e in theta.edges if e.src in module.vertices}
            assert module.interaction_graph().edges == inside


def test_product_graph_and_composition_match_brute_force():
    for net, box in _symbolic_cases(3, 80):
        modules = decompose(net, box)
        product = product_stg(net, box, modules)
        assert product == build_stg(net, box)
        assert product.edge_set() == stg_edges(net, box)
        composed = analyze(net, box).composed
        assert {frozenset(a.states) for a in composed} == attractor_sets(net, box)


def test_projection_onto_a_module():
    for net, box in _symbolic_cases(4, 60):
        restricted = build_stg(net, box)
        modules = decompose(net, box)
        for module in modules:
            projected = project_dynamics(restricted, module.vertices)
            own = module.stg()
            moves = lambda g: {(a, b) for a, b in g.edge_set() if a != b}
            assert moves(projected) == moves(own)
            if len(modules) == 1:
                assert projected.edge_set() == own.edge_set()


def test_compose_rejects_partial_partitions(toy):
    z1, _ = decompose(toy, TOY_M)
    with pytest.raises(NotAComponentUnion):
        compose_attractors(TOY_M, [(z1, attractors(z1.stg()))])


def test_module_cap_defers_attractors(toy):
    result = analyze(toy, TOY_M, module_cap=1)
    assert result.deferred and result.module_attractors is None
    assert len(result.modules) == 2
