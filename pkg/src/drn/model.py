"""Networks, regular states and boxes of states.

A regular state is a plain tuple of ints. A box (an element of the interval
lattice over the state space) is a :class:`SymbolicState`; a box whose
intervals are all singletons stands for the regular state it contains.

Component positions are 0-based throughout the Python API. Reports, the CLI
and model files use names or 1-based indices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from drn.errors import EnumerationCapExceeded, RangeViolation
from drn.expr import VALUE_NODES, Value

DEFAULT_CAP = 2**24

State = tuple[int, ...]


class Interval(NamedTuple):
    lo: int
    hi: int

    @property
    def is_regular(self) -> bool:
        return self.lo == self.hi

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    def __contains__(self, level) -> bool:
        return self.lo <= level <= self.hi

    def issubset(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def format(self) -> str:
        return str(self.lo) if self.is_regular else f"[{self.lo},{self.hi}]"


def check_cap(size: int, cap: int | None) -> None:
    if cap is not None and size > cap:
        raise EnumerationCapExceeded(size, cap)


@dataclass(frozen=True)
class SymbolicState:
    """A box of states: one discrete interval per component."""

    intervals: tuple[Interval, ...]

    def __post_init__(self):
        ivs = tuple(Interval(int(lo), int(hi)) for lo, hi in self.intervals)
        for iv in ivs:
            if iv.lo < 0 or iv.lo > iv.hi:
                raise ValueError(f"invalid interval {tuple(iv)}")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def full(cls, max_levels: Sequence[int]) -> "SymbolicState":
        return cls(tuple(Interval(0, p) for p in max_levels))

    @classmethod
    def from_state(cls, x: Sequence[int]) -> "SymbolicState":
        return cls(tuple(Interval(v, v) for v in x))

    @classmethod
    def fixing(cls, max_levels: Sequence[int], assignment: dict[int, int]) -> "SymbolicState":
        """Fix the given components to single levels, leaving the rest at full range."""
        ivs = []
        for i, p in enumerate(max_levels):
            if i in assignment:
                v = assignment[i]
                if not 0 <= v <= p:
                    raise ValueError(f"level {v} outside range 0..{p} of component {i}")
                ivs.append(Interval(v, v))
            else:
                ivs.append(Interval(0, p))
        return cls(tuple(ivs))

    def __len__(self) -> int:
        return len(self.intervals)

    def __getitem__(self, i: int) -> Interval:
        return self.intervals[i]

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    @property
    def lo(self) -> State:
        return tuple(iv.lo for iv in self.intervals)

    @property
    def hi(self) -> State:
        return tuple(iv.hi for iv in self.intervals)

    @property
    def cardinality(self) -> int:
        return math.prod(iv.size for iv in self.intervals)

    @property
    def symbolic_components(self) -> tuple[int, ...]:
        """Positions whose interval holds more than one level."""
        return tuple(i for i, iv in enumerate(self.intervals) if not iv.is_regular)

    @property
    def regular_components(self) -> tuple[int, ...]:
        return tuple(i for i, iv in enumerate(self.intervals) if iv.is_regular)

    @property
    def is_regular(self) -> bool:
        return all(iv.is_regular for iv in self.intervals)

    def as_state(self) -> State:
        if not self.is_regular:
            raise ValueError("box is not a regular state")
        return self.lo

    def __contains__(self, x) -> bool:
        return len(x) == len(self.intervals) and all(v in iv for v, iv in zip(x, self.intervals))

    def issubset(self, other: "SymbolicState") -> bool:
        return len(self) == len(other) and all(a.issubset(b) for a, b in zip(self, other))

    def __le__(self, other: "SymbolicState") -> bool:
        return self.issubset(other)

    def hull(self, other: "SymbolicState") -> "SymbolicState":
        return SymbolicState(tuple(a.hull(b) for a, b in zip(self, other)))

    def project(self, indices: Sequence[int]) -> "SymbolicState":
        return SymbolicState(tuple(self.intervals[i] for i in indices))

    def within(self, max_levels: Sequence[int]) -> bool:
        return len(self) == len(max_levels) and all(iv.hi <= p for iv, p in zip(self, max_levels))

    def format(self) -> str:
        """Tuple notation, e.g. ``(1,0,[0,2])``."""
        return "(" + ",".join(iv.format() for iv in self.intervals) + ")"

    def __str__(self) -> str:
        return self.format()

    # mixed-radix encoding: the first component is the most significant digit,
    # so code order equals lexicographic state order
    @cached_property
    def strides(self) -> np.ndarray:
        sizes = [iv.size for iv in self.intervals]
        strides = np.ones(len(sizes), dtype=np.int64)
        for k in range(len(sizes) - 2, -1, -1):
            strides[k] = strides[k + 1] * sizes[k + 1]
        return strides

    def encode(self, states) -> np.ndarray:
        states = np.asarray(states, dtype=np.int64)
        return (states - np.asarray(self.lo, dtype=np.int64)) @ self.strides

    def decode(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        sizes = np.array([iv.size for iv in self.intervals], dtype=np.int64)
        return (codes[..., None] // self.strides) % sizes + np.asarray(self.lo, dtype=np.int64)

    def code_of(self, x: Sequence[int]) -> int:
        return int(sum((v - iv.lo) * int(s) for v, iv, s in zip(x, self.intervals, self.strides)))

    def state_of(self, code: int) -> State:
        return tuple(int(v) for v in self.decode(np.int64(code)))

    def members(self, cap: int | None = DEFAULT_CAP) -> Iterator[State]:
        return box_members(self, cap)

    def members_array(self, cap: int | None = DEFAULT_CAP) -> np.ndarray:
        """All member states as an ``(N, n)`` array in lexicographic order."""
        check_cap(self.cardinality, cap)
        return self.decode(np.arange(self.cardinality, dtype=np.int64))


def box_members(box: SymbolicState, cap: int | None = DEFAULT_CAP) -> Iterator[State]:
    """Lazily enumerate the states of ``box`` in lexicographic order.

    Pass ``cap=None`` to lift the size limit.
    """
    check_cap(box.cardinality, cap)
    return itertools.product(*(range(iv.lo, iv.hi + 1) for iv in box.intervals))


@dataclass(frozen=True)
class Network:
    """A discrete network: component names, maximal levels and one rule each.

    Immutable; derived data is cached lazily.
    """

    names: tuple[str, ...]
    max_levels: tuple[int, ...]
    rules: tuple[Value, ...]
    name: str = "network"

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "max_levels", tuple(int(p) for p in self.max_levels))
        object.__setattr__(self, "rules", tuple(self.rules))
        n = len(self.names)
        if n < 1:
            raise ValueError("a network needs at least one component")
        if len(self.max_levels) != n or len(self.rules) != n:
            raise ValueError("names, max_levels and rules must have equal length")
        if len(set(self.names)) != n or not all(self.names):
            raise ValueError("component names must be non-empty and unique")
        for i, p in enumerate(self.max_levels):
            if p < 1:
                raise ValueError(f"component {self.names[i]} has maximal level {p} < 1")
        for i, rule in enumerate(self.rules):
            if not isinstance(rule, VALUE_NODES):
                raise TypeError(f"rule of {self.names[i]} is not a value expression")
            bad = [r for r in rule.refs() if not 0 <= r < n]
            if bad:
                raise ValueError(f"rule of {self.names[i]} references unknown component {bad[0]}")

    @property
    def n(self) -> int:
        return len(self.names)

    @cached_property
    def _positions(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def index(self, key: str | int) -> int:
        """Resolve a name or a 1-based index (as int or digit string) to a position."""
        if isinstance(key, str) and key in self._positions:
            return self._positions[key]
        if isinstance(key, str) and key.isdigit():
            key = int(key)
        if isinstance(key, int) and 1 <= key <= self.n:
            return key - 1
        raise KeyError(f"unknown component {key!r}")

    @cached_property
    def state_space(self) -> SymbolicState:
        return SymbolicState.full(self.max_levels)

    @cached_property
    def supports(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(sorted(rule.refs())) for rule in self.rules)

    def image_component(self, i: int, cols) -> np.ndarray:
        """Vectorised ``f_i`` over a batch given as per-component columns."""
        values = np.asarray(self.rules[i].value_array(cols), dtype=np.int64)
        if values.size:
            lo, hi = values.min(), values.max()
            if lo < 0 or hi > self.max_levels[i]:
                bad = int(lo) if lo < 0 else int(hi)
                raise RangeViolation(i, bad, self.names[i])
        return values

    def image_array(self, states: np.ndarray) -> np.ndarray:
        """``f`` applied row-wise to an ``(N, n)`` array of states."""
        states = np.asarray(states, dtype=np.int64)
        cols = [states[:, k] for k in range(self.n)]
        out = np.empty_like(states)
        for i in range(self.n):
            out[:, i] = np.broadcast_to(self.image_component(i, cols), (states.shape[0],))
        return out

    def evaluate(self, x: Sequence[int]) -> State:
        return evaluate(self, x)


def evaluate(net: Network, x: Sequence[int]) -> State:
    """``f(x)`` for a single regular state."""
    x = tuple(int(v) for v in x)
    if x not in net.state_space:
        raise ValueError(f"state {x} is outside the state space")
    out = []
    for i, rule in enumerate(net.rules):
        v = rule.value_at(x)
        if not 0 <= v <= net.max_levels[i]:
            raise RangeViolation(i, v, net.names[i])
        out.append(int(v))
    return tuple(out)


def support(net: Network, i: int) -> frozenset[int]:
    """Components referenced syntactically by the rule of component ``i``."""
    return frozenset(net.supports[i])


def states_array(states: Iterable[Sequence[int]], n: int) -> np.ndarray:
    arr = np.array(list(states), dtype=np.int64)
    return arr.reshape(-1, n)
