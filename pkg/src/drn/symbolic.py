"""Interval images of boxes, extended forward orbits, frozen cores and
derived (symbolic) steady states."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from drn.errors import ConvergenceError, NotAFrozenCore
from drn.model import DEFAULT_CAP, Interval, Network, SymbolicState, check_cap


def image_interval(net: Network, box: SymbolicState, i: int, cap: int | None = DEFAULT_CAP) -> Interval:
    """``[min f_i, max f_i]`` over the box.

    Only the coordinates in the support of ``f_i`` are enumerated; ``f_i``
    does not depend on the others.
    """
    sup = net.supports[i]
    sizes = [box[k].size for k in sup]
    check_cap(int(np.prod(sizes)) if sizes else 1, cap)
    if sup:
        axes = [np.arange(box[k].lo, box[k].hi + 1, dtype=np.int64) for k in sup]
        mesh = np.meshgrid(*axes, indexing="ij")
        cols = {k: m.ravel() for k, m in zip(sup, mesh)}
    else:
        cols = {}
    values = net.image_component(i, cols)
    return Interval(int(values.min()), int(values.max()))


def symbolic_image(net: Network, box: SymbolicState, cap: int | None = DEFAULT_CAP) -> SymbolicState:
    """Componentwise range of ``f`` over the box; equals ``{f(x)}`` for a single state."""
    if not box.within(net.max_levels):
        raise ValueError(f"box {box} is outside the state space")
    return SymbolicState(tuple(image_interval(net, box, i, cap) for i in range(net.n)))


def is_fixed_box(net: Network, box: SymbolicState, cap: int | None = DEFAULT_CAP) -> bool:
    return symbolic_image(net, box, cap) == box


@dataclass
class IterationTrace:
    """The boxes visited by an iteration, first to last."""

    states: list[SymbolicState] = field(default_factory=list)
    converged: bool = False

    @property
    def steps(self) -> int:
        return len(self.states) - 1

    @property
    def final(self) -> SymbolicState:
        return self.states[-1]

    def format(self) -> str:
        return "\n".join(s.format() for s in self.states)


def _step_bound(net: Network) -> int:
    return 2 * sum(net.max_levels) + 2


def extended_forward_orbit(net: Network, box: SymbolicState, cap: int | None = DEFAULT_CAP) -> IterationTrace:
    """Grow the box by the hull with its image until nothing changes.

    The limit contains every state reachable from the box.
    """
    trace = IterationTrace([box])
    current = box
    for _ in range(_step_bound(net)):
        grown = current.hull(symbolic_image(net, current, cap))
        if grown == current:
            trace.converged = True
            return trace
        trace.states.append(grown)
        current = grown
    raise ConvergenceError(f"extended forward orbit of {box} did not converge")


@dataclass(frozen=True)
class FrozenCore:
    indices: frozenset[int]
    state: SymbolicState


def frozen_core(net: Network, box: SymbolicState, cap: int | None = DEFAULT_CAP) -> FrozenCore:
    """Components of ``box`` that are regular and stay so in its extended orbit."""
    orbit = extended_forward_orbit(net, box, cap).final
    frozen = frozenset(i for i in box.regular_components if orbit[i] == box[i])
    return FrozenCore(frozen, box)


def derive_steady_state(
    net: Network, core: FrozenCore, cap: int | None = DEFAULT_CAP
) -> tuple[SymbolicState, IterationTrace]:
    """Iterate the interval image from the extended orbit of ``core.state``.

    Returns the limit (a regular or symbolic steady state) and the trace
    ``M^0, M^1, ..., M^k`` with ``F(M^k) = M^k``.
    """
    actual = frozen_core(net, core.state, cap)
    if actual.indices != frozenset(core.indices):
        raise NotAFrozenCore(
            f"frozen components of {core.state} are {sorted(actual.indices)}, not {sorted(core.indices)}"
        )
    start = extended_forward_orbit(net, core.state, cap).final
    trace = IterationTrace([start])
    current = start
    for _ in range(_step_bound(net)):
        image = symbolic_image(net, current, cap)
        if image == current:
            trace.converged = True
            return current, trace
        if not image.issubset(current):
            raise ConvergenceError(f"iteration is not decreasing at {current} -> {image}")
        trace.states.append(image)
        current = image
    raise ConvergenceError(f"iteration from {start} did not converge")
