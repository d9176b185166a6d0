import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from drn.errors import EnumerationCapExceeded, RangeViolation
from drn.expr import Const, Ref
from drn.model import Interval, Network, SymbolicState, box_members, evaluate, support

from netgen import networks, random_table_network


def test_evaluate_matches_truth_tables():
    rng = np.random.default_rng(7)
    for _ in range(40):
        net, tables = random_table_network(rng, max_states=2**8)
        for x in itertools.product(*(range(p + 1) for p in net.max_levels)):
            expected = tuple(tables[i][1][tuple(x[c] for c in tables[i][0])] for i in range(net.n))
            assert evaluate(net, x) == expected


@given(networks())
def test_vectorised_image_agrees_with_scalar(net):
    states = net.state_space.members_array(None)
    image = net.image_array(states)
    for row, out in zip(states[:200], image[:200]):
        assert net.evaluate(tuple(row)) == tuple(int(v) for v in out)


def test_range_violation_reports_component():
    net = Network(("a", "b"), (1, 2), (Ref(1), Const(0)))
    with pytest.raises(RangeViolation) as info:
        net.evaluate((0, 2))
    assert info.value.component == 0
    assert net.evaluate((0, 1)) == (1, 0)


def test_support_is_syntactic(input3, thcell):
    assert support(input3, 2) == {1, 2}
    assert support(input3, 0) == {0}
    assert support(thcell, thcell.index("Tbet")) == {11, 15, 16}


def test_index_accepts_names_and_one_based_positions(thcell):
    assert thcell.index("IFNbR") == 3
    assert thcell.index("4") == 3
    assert thcell.index(17) == 16
    with pytest.raises(KeyError):
        thcell.index("nope")


def test_box_members_lexicographic():
    box = SymbolicState(((0, 1), (1, 2), (0, 0)))
    assert list(box_members(box)) == [(0, 1, 0), (0, 2, 0), (1, 1, 0), (1, 2, 0)]
    assert box.cardinality == 4


def test_cap_is_enforced_before_enumeration():
    box = SymbolicState.full((2,) * 20)
    with pytest.raises(EnumerationCapExceeded):
        box.members_array(1000)
    with pytest.raises(EnumerationCapExceeded):
        list(box_members(box, 1000))


@given(st.lists(st.integers(0, 2), min_size=1, max_size=5), st.data())
def test_encode_decode_roundtrip_and_order(levels, data):
    box = SymbolicState.full(levels)
    states = box.members_array(None)
    codes = box.encode(states)
    assert np.array_equal(codes, np.arange(box.cardinality))
    code = data.draw(st.integers(0, box.cardinality - 1))
    assert box.code_of(box.state_of(code)) == code


def test_symbolic_state_basics():
    m = SymbolicState(((1, 2), (1, 1), (0, 1)))
    assert m.format() == "([1,2],1,[0,1])"
    assert m.symbolic_components == (0, 2)
    assert m.regular_components == (1,)
    assert (2, 1, 0) in m and (0, 1, 0) not in m
    assert SymbolicState.from_state((2, 1, 1)) <= m
    assert m.project([2, 0]) == SymbolicState(((0, 1), (1, 2)))
    assert Interval(0, 2).hull(Interval(3, 3)) == Interval(0, 3)
    with pytest.raises(ValueError):
        SymbolicState(((2, 1),))


def test_thcell_state_space(thcell):
    assert thcell.max_levels == (1, 1, 1, 1, 2, 1, 2, 1, 1, 1, 1, 2, 1, 1, 1, 2, 1)
    assert thcell.state_space.cardinality == 663552
