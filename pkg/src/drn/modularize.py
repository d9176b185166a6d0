"""Decomposition of a network at a symbolic steady state.

Given a box ``M`` with ``F(M) = M``, the components that are not regular in
``M`` split into weakly connected groups of the interaction graph of ``f``
restricted to ``M``.  Each group yields an autonomous network module whose
state transition graph can be analysed on its own; the product of the module
graphs is exactly the transition graph of ``f`` induced on ``M``, and
attractors compose accordingly.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from drn.dynamics import Attractor, TransitionGraph, attractors, build_stg
from drn.errors import InvariantViolation, NotAComponentUnion, NotSymbolicSteadyState
from drn.model import DEFAULT_CAP, Network, State, SymbolicState, check_cap
from drn.structure import InteractionGraph, difference_graph, interaction_graph_over
from drn.symbolic import symbolic_image


@dataclass(frozen=True)
class ThetaGraph:
    graph: InteractionGraph
    source_box: SymbolicState


def _require_steady(net: Network, box: SymbolicState, cap: int | None) -> None:
    if symbolic_image(net, box, cap) != box:
        raise NotSymbolicSteadyState(f"{box} is not a fixed point of the interval image")


def theta_graph(net: Network, box: SymbolicState, cap: int | None = DEFAULT_CAP) -> ThetaGraph:
    """Interaction graph of ``f`` restricted to ``box``, cut down to its symbolic components."""
    _require_steady(net, box, cap)
    symbolic = frozenset(box.symbolic_components)
    restricted = interaction_graph_over(net, box, restricted=True, cap=cap)
    edges = {e for e in restricted.edges if e.src in symbolic and e.dst in symbolic}
    return ThetaGraph(InteractionGraph(symbolic, frozenset(edges)), box)


def theta_components(tg: ThetaGraph) -> list[frozenset[int]]:
    """Weakly connected components, ordered by smallest vertex."""
    adjacent: dict[int, set[int]] = {v: set() for v in tg.graph.vertices}
    for e in tg.graph.edges:
        adjacent[e.src].add(e.dst)
        adjacent[e.dst].add(e.src)
    seen: set[int] = set()
    out = []
    for v in sorted(adjacent):
        if v in seen:
            continue
        comp, todo = set(), [v]
        while todo:
            u = todo.pop()
            if u in comp:
                continue
            comp.add(u)
            todo.extend(adjacent[u] - comp)
        seen |= comp
        out.append(frozenset(comp))
    return out


class NetworkModule:
    """The function induced on a union of theta components.

    Components outside ``vertices`` are pinned to their intervals in the
    steady state; the module lives on the box of the original levels of its
    vertices (e.g. ``[1,2]``), not on a re-zeroed range.
    """

    def __init__(self, parent: Network, steady_state: SymbolicState, vertices: Iterable[int], cap: int | None = DEFAULT_CAP):
        self.parent = parent
        self.steady_state = steady_state
        self.vertices = tuple(sorted(set(vertices)))
        self.state_space = steady_state.project(self.vertices)
        self.names = tuple(parent.names[v] for v in self.vertices)
        self._table = self._tabulate(cap)

    def __repr__(self) -> str:
        return f"NetworkModule({', '.join(self.names)}; domain={self.state_space})"

    @property
    def index_map(self) -> dict[int, int]:
        """Module position -> component position in the parent network."""
        return dict(enumerate(self.vertices))

    @property
    def size(self) -> int:
        return self.state_space.cardinality

    def _tabulate(self, cap: int | None) -> np.ndarray:
        net, box = self.parent, self.steady_state
        domain = self.state_space.members_array(cap)
        n_dom = domain.shape[0]
        pos = {v: k for k, v in enumerate(self.vertices)}
        table = np.empty((n_dom, len(self.vertices)), dtype=np.int64)
        for k, i in enumerate(self.vertices):
            sup = net.supports[i]
            outer = [c for c in sup if c not in pos]
            axes = [np.arange(box[c].lo, box[c].hi + 1, dtype=np.int64) for c in outer]
            n_outer = int(np.prod([a.size for a in axes])) if axes else 1
            check_cap(n_dom * n_outer, cap)
            cols = {}
            for c in sup:
                if c in pos:
                    cols[c] = np.repeat(domain[:, pos[c]], n_outer)
            if axes:
                mesh = np.meshgrid(*axes, indexing="ij")
                for c, m in zip(outer, mesh):
                    cols[c] = np.tile(m.ravel(), n_dom)
            values = np.broadcast_to(net.image_component(i, cols), (n_dom * n_outer,)).reshape(n_dom, n_outer)
            lo, hi = values.min(axis=1), values.max(axis=1)
            if (lo != hi).any():
                raise InvariantViolation(f"module image of {net.names[i]} is not regular")
            if (lo < box[i].lo).any() or (lo > box[i].hi).any():
                raise InvariantViolation(f"module image of {net.names[i]} leaves the module domain")
            table[:, k] = lo
        return table

    def image_array(self, states: np.ndarray) -> np.ndarray:
        states = np.asarray(states, dtype=np.int64).reshape(-1, len(self.vertices))
        return self._table[self.state_space.encode(states)]

    def evaluate(self, z: Sequence[int]) -> State:
        z = tuple(int(v) for v in z)
        if z not in self.state_space:
            raise ValueError(f"{z} is outside the module domain {self.state_space}")
        return tuple(int(v) for v in self._table[self.state_space.code_of(z)])

    def project(self, x: Sequence[int]) -> State:
        return tuple(int(x[v]) for v in self.vertices)

    def embed(self, z: Sequence[int]) -> SymbolicState:
        """The box of parent states whose projection is ``z``."""
        ivs = list(self.steady_state.intervals)
        for v, level in zip(self.vertices, z):
            ivs[v] = (level, level)
        return SymbolicState(tuple(ivs))

    def interaction_graph(self, cap: int | None = DEFAULT_CAP) -> InteractionGraph:
        """Interaction graph of the module with vertices renamed to parent positions."""
        return difference_graph(self, cap=cap).renamed(self.vertices)

    def stg(self, cap: int | None = DEFAULT_CAP) -> TransitionGraph:
        return build_stg(self, cap=cap)


def build_module(net: Network, box: SymbolicState, vertices: Iterable[int], cap: int | None = DEFAULT_CAP) -> NetworkModule:
    """Module for a union of theta components of the steady state ``box``."""
    vertices = frozenset(vertices)
    comps = theta_components(theta_graph(net, box, cap))
    if not vertices or any(c & vertices and not c <= vertices for c in comps) or not vertices <= frozenset().union(*comps):
        raise NotAComponentUnion(f"{sorted(vertices)} is not a union of components {[sorted(c) for c in comps]}")
    return NetworkModule(net, box, vertices, cap)


def decompose(net: Network, box: SymbolicState, cap: int | None = DEFAULT_CAP) -> list[NetworkModule]:
    """One module per theta component of ``box``."""
    return [NetworkModule(net, box, comp, cap) for comp in theta_components(theta_graph(net, box, cap))]


def _check_partition(box: SymbolicState, modules: Sequence[NetworkModule]) -> None:
    covered: list[int] = [v for m in modules for v in m.vertices]
    if len(covered) != len(set(covered)) or set(covered) != set(box.symbolic_components):
        raise NotAComponentUnion("module vertex sets must partition the symbolic components")
    for m in modules:
        if m.steady_state != box:
            raise ValueError("module was built for a different steady state")


def product_stg(net: Network, box: SymbolicState, modules: Sequence[NetworkModule], cap: int | None = DEFAULT_CAP) -> TransitionGraph:
    """Compose module transition graphs into a graph on the states of ``box``.

    ``x`` has a self-loop iff every module is at a fixed point in ``x``; a move
    of one module from ``x`` gives an edge that leaves all other coordinates
    unchanged.
    """
    _check_partition(box, modules)
    check_cap(box.cardinality, cap)
    n = len(box)
    strides = box.strides
    lo = np.asarray(box.lo, dtype=np.int64)
    members = box.members_array(None)
    codes = np.arange(box.cardinality, dtype=np.int64)
    all_fixed = np.ones(box.cardinality, dtype=bool)
    srcs, dsts = [], []
    for module in modules:
        zs = list(module.vertices)
        rest = [c for c in range(n) if c not in module.vertices]
        g = module.stg(cap)
        loops = g.src[g.src == g.dst]
        all_fixed &= np.isin(module.state_space.encode(members[:, zs]), loops)
        moves = g.src != g.dst
        u = module.state_space.decode(g.src[moves])
        v = module.state_space.decode(g.dst[moves])
        zpart = (u - lo[zs]) @ strides[zs]
        delta = (v - u) @ strides[zs]
        rest_codes = (box.project(rest).members_array(None) - lo[rest]) @ strides[rest] if rest else np.zeros(1, dtype=np.int64)
        src = (zpart[:, None] + rest_codes[None, :]).ravel()
        srcs.append(src)
        dsts.append(src + np.repeat(delta, rest_codes.size))
    srcs.append(codes[all_fixed])
    dsts.append(codes[all_fixed])
    return TransitionGraph(box, codes, np.concatenate(srcs), np.concatenate(dsts), net.names)


def compose_attractors(
    box: SymbolicState, module_attractors: Sequence[tuple[NetworkModule, Sequence[Attractor]]]
) -> list[Attractor]:
    """Every combination of one attractor per module, embedded into ``box``.

    Regular components take their level in ``box``.
    """
    _check_partition(box, [m for m, _ in module_attractors])
    base = list(box.lo)
    out = []
    for choice in itertools.product(*(atts for _, atts in module_attractors)):
        states = []
        for parts in itertools.product(*(a.states for a in choice)):
            x = base[:]
            for (module, _), z in zip(module_attractors, parts):
                for v, level in zip(module.vertices, z):
                    x[v] = level
            states.append(tuple(x))
        out.append(Attractor(tuple(states)))
    out.sort(key=lambda a: a.states[0])
    return out


@dataclass
class ModularAnalysis:
    """Everything derived from one steady state: modules, their attractors, and the composition."""

    steady_state: SymbolicState
    modules: list[NetworkModule] = field(default_factory=list)
    module_attractors: list[list[Attractor]] | None = None
    composed: list[Attractor] | None = None

    @property
    def deferred(self) -> bool:
        return self.composed is None

    def report(self, net: Network) -> dict:
        box = self.steady_state
        doc = {
            "symbolic_state": [[iv.lo, iv.hi] for iv in box],
            "frozen": {net.names[i]: box[i].lo for i in box.regular_components},
            "modules": [],
            "composed_attractors": None if self.composed is None else [a.as_dict() for a in self.composed],
        }
        for k, module in enumerate(self.modules):
            atts = None if self.module_attractors is None else [a.as_dict() for a in self.module_attractors[k]]
            doc["modules"].append(
                {
                    "vertices": list(module.names),
                    "domain": [[iv.lo, iv.hi] for iv in module.state_space],
                    "attractors": atts,
                }
            )
        return doc

    def to_json(self, net: Network) -> str:
        return json.dumps(self.report(net))


def analyze(
    net: Network, box: SymbolicState, cap: int | None = DEFAULT_CAP, module_cap: int | None = DEFAULT_CAP
) -> ModularAnalysis:
    """Decompose at ``box`` and, unless a module exceeds ``module_cap`` states, compose attractors."""
    modules = decompose(net, box, cap)
    result = ModularAnalysis(box, modules)
    if module_cap is not None and any(m.size > module_cap for m in modules):
        return result
    result.module_attractors = [attractors(m.stg(cap)) for m in modules]
    result.composed = compose_attractors(box, list(zip(modules, result.module_attractors)))
    return result
