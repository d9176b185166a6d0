import numpy as np
import pytest
from hypothesis import given, strategies as st

from drn.errors import ConvergenceError, NotAFrozenCore
from drn.model import SymbolicState
from drn.symbolic import (
    FrozenCore,
    derive_steady_state,
    extended_forward_orbit,
    frozen_core,
    symbolic_image,
)

from netgen import networks, networks_with_box, random_network, random_start_box
from oracles import async_successors, attractor_sets, box_states, image_bounds, reachable


def _box(bounds):
    return SymbolicState(tuple(bounds))


@given(networks_with_box())
def test_image_matches_brute_force(case):
    net, box = case
    assert symbolic_image(net, box) == _box(image_bounds(net, box))


@given(networks(), st.data())
def test_singleton_image_is_the_image(net, data):
    x = tuple(data.draw(st.integers(0, p)) for p in net.max_levels)
    assert symbolic_image(net, SymbolicState.from_state(x)) == SymbolicState.from_state(net.evaluate(x))


@given(networks_with_box(), st.data())
def test_image_is_inclusion_monotone(case, data):
    net, box = case
    sub = []
    for iv in box:
        lo = data.draw(st.integers(iv.lo, iv.hi))
        sub.append((lo, data.draw(st.integers(lo, iv.hi))))
    sub = SymbolicState(tuple(sub))
    assert symbolic_image(net, sub).issubset(symbolic_image(net, box))


def _naive_orbit(net, box):
    current = box
    while True:
        grown = current.hull(_box(image_bounds(net, current)))
        if grown == current:
            return current
        current = grown


@given(networks_with_box())
def test_orbit_matches_naive_hull_iteration_and_covers_reachable_states(case):
    net, box = case
    trace = extended_forward_orbit(net, box)
    assert trace.converged and trace.states[0] == box
    assert trace.final == _naive_orbit(net, box)
    assert all(y in trace.final for y in reachable(net, box_states(box)))


@given(networks_with_box())
def test_frozen_core_matches_naive_orbit(case):
    net, box = case
    orbit = _naive_orbit(net, box)
    expected = {i for i, iv in enumerate(box) if iv.is_regular and orbit[i] == iv}
    assert frozen_core(net, box).indices == expected


def _check_derived(net, start):
    box, trace = derive_steady_state(net, frozen_core(net, start))
    assert trace.converged
    assert symbolic_image(net, box) == box
    for earlier, later in zip(trace.states, trace.states[1:]):
        assert later.issubset(earlier)
    # trap set: no asynchronous step leaves the box
    for x in box_states(box):
        assert all(y in box for y in async_successors(net, x))
    # every attractor reachable from the start box lies inside the result
    seen = reachable(net, box_states(start))
    for att in attractor_sets(net):
        if att & seen:
            assert all(x in box for x in att)
    return box


@given(networks_with_box(max_states=2**8))
def test_derived_steady_state_is_a_trap_holding_reachable_attractors(case):
    _check_derived(*case)


def test_derived_steady_states_on_many_random_networks():
    rng = np.random.default_rng(11)
    symbolic = 0
    for _ in range(150):
        net = random_network(rng, max_states=2**9)
        box = _check_derived(net, random_start_box(rng, net))
        symbolic += not box.is_regular
    assert symbolic > 20


def test_toy_trace(toy):
    # x2 follows x1 >= 1, so pinning x2 = 1 only survives once x1 > 0
    assert frozen_core(toy, SymbolicState(((0, 2), (1, 1), (0, 1)))).indices == frozenset()
    start = SymbolicState(((1, 2), (1, 1), (0, 1)))
    core = frozen_core(toy, start)
    assert core.indices == {1}
    box, trace = derive_steady_state(toy, core)
    assert [s.format() for s in trace.states] == ["([1,2],1,[0,1])"]
    assert box.symbolic_components == (0, 2)
    box, trace = derive_steady_state(toy, frozen_core(toy, SymbolicState(((0, 2), (0, 1), (0, 1)))))
    assert box == SymbolicState(((1, 2), (1, 1), (0, 1)))


@pytest.mark.parametrize(
    "level, expected",
    [
        (0, ["(0,[0,1],[0,1])", "(0,0,[0,1])"]),
        (1, ["(1,[0,1],[0,1])", "(1,1,[0,1])", "(1,1,1)"]),
    ],
)
def test_input3_traces(input3, level, expected):
    start = SymbolicState.fixing(input3.max_levels, {0: level})
    box, trace = derive_steady_state(input3, frozen_core(input3, start))
    assert [s.format() for s in trace.states] == expected
    assert box.format() == expected[-1]


def test_wrong_core_is_rejected(toy):
    start = SymbolicState(((0, 0), (1, 1), (0, 1)))
    with pytest.raises(NotAFrozenCore):
        derive_steady_state(toy, FrozenCore(frozenset({0, 1}), start))


def test_convergence_error_is_an_invariant_violation():
    from drn.errors import InvariantViolation

    assert issubclass(ConvergenceError, InvariantViolation)
