"""Random networks for property tests.

Networks mix Boolean and ternary components and stay within a state-space
budget (default 2**12 states).  Rules are drawn from three families: random
truth tables written as case lists, random guarded expressions, and
identity rules (input vertices).
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from hypothesis import strategies as st

from drn.expr import Active, And, Case, Cmp, Const, Indicator, Not, Or, Ref
from drn.model import Network, SymbolicState

OPS = ("=", "!=", "<", "<=", ">", ">=")


def _random_cond(rng, levels, support, depth=0):
    roll = rng.random()
    if depth >= 2 or roll < 0.45:
        c = int(rng.choice(support))
        if levels[c] == 1 and rng.random() < 0.3:
            return Active(c)
        return Cmp(c, str(rng.choice(OPS)), int(rng.integers(0, levels[c] + 1)))
    if roll < 0.6:
        return Not(_random_cond(rng, levels, support, depth + 1))
    cls = And if roll < 0.8 else Or
    return cls(_random_cond(rng, levels, support, depth + 1), _random_cond(rng, levels, support, depth + 1))


def _random_value(rng, levels, target, support):
    roll = rng.random()
    refs = [c for c in support if levels[c] <= levels[target]]
    if roll < 0.2 and refs:
        return Ref(int(rng.choice(refs)))
    if roll < 0.35 and support:
        return Indicator(_random_cond(rng, levels, support))
    return Const(int(rng.integers(0, levels[target] + 1)))


def _table_rule(rng, levels, target, support, tables=None):
    grid = list(itertools.product(*(range(levels[c] + 1) for c in support)))
    values = rng.integers(0, levels[target] + 1, size=len(grid))
    if tables is not None:
        tables[target] = (tuple(support), {row: int(v) for row, v in zip(grid, values)})
    default = int(np.bincount(values).argmax())
    branches = []
    for row, value in zip(grid, values):
        if value == default:
            continue
        guard = None
        for c, level in zip(support, row):
            atom = Cmp(c, "=", level)
            guard = atom if guard is None else And(guard, atom)
        branches.append((guard, Const(int(value))))
    if not branches:
        return Const(default)
    return Case(tuple(branches), Const(default))


def random_levels(rng, max_states=2**12, n_range=(2, 7)):
    while True:
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        levels = [int(rng.choice([1, 1, 2])) for _ in range(n)]
        if math.prod(p + 1 for p in levels) <= max_states:
            return levels


def random_network(rng, max_states=2**12, n_range=(2, 7), input_prob=0.0, min_inputs=0) -> Network:
    levels = random_levels(rng, max_states, n_range)
    n = len(levels)
    inputs = {i for i in range(n) if rng.random() < input_prob}
    while len(inputs) < min(min_inputs, n):
        inputs.add(int(rng.integers(0, n)))
    rules = []
    for i in range(n):
        if i in inputs:
            rules.append(Ref(i))
            continue
        k = int(rng.integers(0, min(3, n) + 1))
        support = sorted(int(c) for c in rng.choice(n, size=k, replace=False)) if k else []
        if not support:
            rules.append(Const(int(rng.integers(0, levels[i] + 1))))
        elif rng.random() < 0.5:
            rules.append(_table_rule(rng, levels, i, support))
        else:
            branches = tuple(
                (_random_cond(rng, levels, support), _random_value(rng, levels, i, support))
                for _ in range(int(rng.integers(1, 4)))
            )
            rules.append(Case(branches, _random_value(rng, levels, i, support)))
    names = tuple(f"v{i + 1}" for i in range(n))
    return Network(names, tuple(levels), tuple(rules), "random")


def random_table_network(rng, max_states=2**12):
    """A network of truth-table rules plus the tables themselves."""
    levels = random_levels(rng, max_states)
    n = len(levels)
    tables = {}
    rules = []
    for i in range(n):
        k = int(rng.integers(1, min(3, n) + 1))
        support = sorted(int(c) for c in rng.choice(n, size=k, replace=False))
        rules.append(_table_rule(rng, levels, i, support, tables))
    names = tuple(f"v{i + 1}" for i in range(n))
    return Network(names, tuple(levels), tuple(rules), "tables"), tables


def random_start_box(rng, net: Network) -> SymbolicState:
    """Fix a random subset of components to random levels."""
    fix = {i: int(rng.integers(0, p + 1)) for i, p in enumerate(net.max_levels) if rng.random() < 0.4}
    return SymbolicState.fixing(net.max_levels, fix)


@st.composite
def networks(draw, max_states=2**10, input_prob=0.0, min_inputs=0):
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_network(np.random.default_rng(seed), max_states, input_prob=input_prob, min_inputs=min_inputs)


@st.composite
def networks_with_box(draw, max_states=2**10):
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = np.random.default_rng(seed)
    net = random_network(rng, max_states)
    return net, random_start_box(rng, net)
