"""Rule expression trees.

Two kinds of node exist. Value nodes (``Const``, ``Ref``, ``Case``,
``Indicator``) produce an activity level; condition nodes (``Cmp``,
``Active``, ``Not``, ``And``, ``Or``) produce a truth value.  Component
references are 0-based positions into the owning network.

Every node evaluates either on a single state (a tuple of ints) or on a
batch of states given as one numpy column per component.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

CMP_OPS = {
    "=": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}


@dataclass(frozen=True)
class Const:
    value: int

    def refs(self) -> frozenset[int]:
        return frozenset()

    def value_at(self, x: Sequence[int]) -> int:
        return self.value

    def value_array(self, cols):
        return self.value


@dataclass(frozen=True)
class Ref:
    comp: int

    def refs(self) -> frozenset[int]:
        return frozenset((self.comp,))

    def value_at(self, x: Sequence[int]) -> int:
        return x[self.comp]

    def value_array(self, cols):
        return cols[self.comp]


@dataclass(frozen=True)
class Cmp:
    comp: int
    op: str
    value: int

    def __post_init__(self):
        if self.op not in CMP_OPS:
            raise ValueError(f"unknown comparison {self.op!r}")

    def refs(self) -> frozenset[int]:
        return frozenset((self.comp,))

    def holds_at(self, x: Sequence[int]) -> bool:
        return CMP_OPS[self.op](x[self.comp], self.value)

    def holds_array(self, cols):
        return CMP_OPS[self.op](cols[self.comp], self.value)


@dataclass(frozen=True)
class Active:
    """A bare component name used as a condition: true iff its level is non-zero."""

    comp: int

    def refs(self) -> frozenset[int]:
        return frozenset((self.comp,))

    def holds_at(self, x: Sequence[int]) -> bool:
        return x[self.comp] != 0

    def holds_array(self, cols):
        return cols[self.comp] != 0


@dataclass(frozen=True)
class Not:
    arg: "Cond"

    def refs(self) -> frozenset[int]:
        return self.arg.refs()

    def holds_at(self, x: Sequence[int]) -> bool:
        return not self.arg.holds_at(x)

    def holds_array(self, cols):
        return np.logical_not(self.arg.holds_array(cols))


@dataclass(frozen=True)
class And:
    left: "Cond"
    right: "Cond"

    def refs(self) -> frozenset[int]:
        return self.left.refs() | self.right.refs()

    def holds_at(self, x: Sequence[int]) -> bool:
        return self.left.holds_at(x) and self.right.holds_at(x)

    def holds_array(self, cols):
        return np.logical_and(self.left.holds_array(cols), self.right.holds_array(cols))


@dataclass(frozen=True)
class Or:
    left: "Cond"
    right: "Cond"

    def refs(self) -> frozenset[int]:
        return self.left.refs() | self.right.refs()

    def holds_at(self, x: Sequence[int]) -> bool:
        return self.left.holds_at(x) or self.right.holds_at(x)

    def holds_array(self, cols):
        return np.logical_or(self.left.holds_array(cols), self.right.holds_array(cols))


@dataclass(frozen=True)
class Indicator:
    """A condition used where a level is expected: 1 if it holds, else 0."""

    cond: "Cond"

    def refs(self) -> frozenset[int]:
        return self.cond.refs()

    def value_at(self, x: Sequence[int]) -> int:
        return 1 if self.cond.holds_at(x) else 0

    def value_array(self, cols):
        return np.where(self.cond.holds_array(cols), 1, 0)


@dataclass(frozen=True)
class Case:
    """Guarded alternatives; the first guard that holds wins."""

    branches: tuple[tuple["Cond", "Value"], ...]
    default: "Value"

    def refs(self) -> frozenset[int]:
        out = self.default.refs()
        for guard, value in self.branches:
            out = out | guard.refs() | value.refs()
        return out

    def value_at(self, x: Sequence[int]) -> int:
        for guard, value in self.branches:
            if guard.holds_at(x):
                return value.value_at(x)
        return self.default.value_at(x)

    def value_array(self, cols):
        conds = [guard.holds_array(cols) for guard, _ in self.branches]
        values = [value.value_array(cols) for _, value in self.branches]
        return np.select(conds, values, default=self.default.value_array(cols))


Value = Union[Const, Ref, Case, Indicator]
Cond = Union[Cmp, Active, Not, And, Or]

VALUE_NODES = (Const, Ref, Case, Indicator)
COND_NODES = (Cmp, Active, Not, And, Or)


def value_constants(expr: Value):
    """Yield every constant that can be returned directly as a level."""
    if isinstance(expr, Const):
        yield expr.value
    elif isinstance(expr, Case):
        for _, value in expr.branches:
            yield from value_constants(value)
        yield from value_constants(expr.default)
