"""Signed interaction graphs derived from a network's rules.

An edge ``(i, j, sign)`` says that moving component ``i`` one level up
changes ``f_j`` in direction ``sign`` (+1 or -1) at some state.  Between two
vertices there can be at most two parallel edges, of opposite sign.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from drn.model import DEFAULT_CAP, Network, SymbolicState, check_cap


class SignedEdge(NamedTuple):
    src: int
    dst: int
    sign: int  # +1 or -1

    @property
    def symbol(self) -> str:
        return "+" if self.sign > 0 else "-"


@dataclass(frozen=True)
class InteractionGraph:
    vertices: frozenset[int]
    edges: frozenset[SignedEdge] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "edges", frozenset(SignedEdge(*e) for e in self.edges))
        for e in self.edges:
            if e.src not in self.vertices or e.dst not in self.vertices:
                raise ValueError(f"edge {e} has an endpoint outside the vertex set")
            if e.sign not in (1, -1):
                raise ValueError(f"edge {e} has an invalid sign")

    def __or__(self, other: "InteractionGraph") -> "InteractionGraph":
        return InteractionGraph(self.vertices | other.vertices, self.edges | other.edges)

    def is_subgraph_of(self, other: "InteractionGraph") -> bool:
        return self.vertices <= other.vertices and self.edges <= other.edges

    def sorted_edges(self) -> list[SignedEdge]:
        return sorted(self.edges)

    def renamed(self, mapping: Sequence[int] | dict[int, int]) -> "InteractionGraph":
        """Relabel vertex ``v`` as ``mapping[v]``."""
        return InteractionGraph(
            {mapping[v] for v in self.vertices},
            {SignedEdge(mapping[e.src], mapping[e.dst], e.sign) for e in self.edges},
        )

    def to_dot(self, names: Sequence[str] | None = None) -> str:
        return to_dot(self, names)

    def to_json(self, names: Sequence[str] | None = None) -> str:
        label = _labeler(names)
        doc = {
            "vertices": [label(v) for v in sorted(self.vertices)],
            "edges": [
                {"src": label(e.src), "dst": label(e.dst), "sign": e.symbol}
                for e in self.sorted_edges()
            ],
        }
        return json.dumps(doc, indent=2)


def _labeler(names):
    if names is None:
        return lambda v: str(v + 1)
    return lambda v: names[v]


def _quote(name: str) -> str:
    return name if name.isidentifier() else json.dumps(name)


def to_dot(g: InteractionGraph, names: Sequence[str] | None = None) -> str:
    """Graphviz source; inhibiting edges get a tee arrowhead."""
    label = _labeler(names)
    lines = ["digraph G {"]
    for v in sorted(g.vertices):
        lines.append(f"  {_quote(label(v))};")
    for e in g.sorted_edges():
        attrs = "" if e.sign > 0 else " [arrowhead=tee]"
        lines.append(f"  {_quote(label(e.src))} -> {_quote(label(e.dst))}{attrs};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def local_interaction_graph(net: Network, x: Sequence[int]) -> InteractionGraph:
    """Interaction graph of ``net`` at the single state ``x``.

    Evaluates the full image at every unit neighbour of ``x``; independent of
    the support-based routine used for boxes.
    """
    x = tuple(int(v) for v in x)
    fx = net.evaluate(x)
    edges = set()
    for i in range(net.n):
        for c in (-1, 1):
            level = x[i] + c
            if not 0 <= level <= net.max_levels[i]:
                continue
            y = x[:i] + (level,) + x[i + 1 :]
            fy = net.evaluate(y)
            for j in range(net.n):
                diff = (fy[j] - fx[j]) * c
                if diff:
                    edges.add(SignedEdge(i, j, 1 if diff > 0 else -1))
    return InteractionGraph(frozenset(range(net.n)), frozenset(edges))


def _pair_grid(ranges: list[range]) -> np.ndarray:
    mesh = np.meshgrid(*[np.arange(r.start, r.stop, dtype=np.int64) for r in ranges], indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1) if mesh else np.zeros((1, 0), dtype=np.int64)


def _box_edges(net: Network, box: SymbolicState, restricted: bool, cap: int | None) -> set[SignedEdge]:
    edges = set()
    for j in range(net.n):
        sup = net.supports[j]
        for i in sup:
            iv = box[i]
            if restricted:
                lower = range(iv.lo, iv.hi)  # pairs (y, y+1) with both ends in the box
            else:
                lower = range(max(iv.lo - 1, 0), min(iv.hi, net.max_levels[i] - 1) + 1)
            if len(lower) == 0:
                continue
            ranges = [lower if k == i else range(box[k].lo, box[k].hi + 1) for k in sup]
            size = int(np.prod([len(r) for r in ranges]))
            check_cap(size, cap)
            grid = _pair_grid(ranges)
            cols = {k: grid[:, pos] for pos, k in enumerate(sup)}
            below = net.image_component(j, cols)
            cols[i] = cols[i] + 1
            above = net.image_component(j, cols)
            diff = np.broadcast_to(above - below, (grid.shape[0],))
            if (diff > 0).any():
                edges.add(SignedEdge(i, j, 1))
            if (diff < 0).any():
                edges.add(SignedEdge(i, j, -1))
    return edges


def interaction_graph_over(
    net: Network,
    region: SymbolicState | Iterable[Sequence[int]],
    restricted: bool = True,
    cap: int | None = DEFAULT_CAP,
) -> InteractionGraph:
    """Union of interaction graphs over a box or a set of states.

    For a box, ``restricted=True`` (the default) only compares neighbours that
    both lie in the box, giving the interaction graph of ``f`` restricted to
    the box.  ``restricted=False`` takes the union of the local graphs of all
    member states, whose neighbours may leave the box.  A plain set of states
    always yields the union of local graphs.

    Only pairs ``(i, j)`` with ``i`` in the syntactic support of ``f_j`` are
    examined.
    """
    if isinstance(region, SymbolicState):
        if not region.within(net.max_levels):
            raise ValueError("box is outside the state space")
        return InteractionGraph(frozenset(range(net.n)), frozenset(_box_edges(net, region, restricted, cap)))
    states = [tuple(int(v) for v in x) for x in region]
    if not states:
        raise ValueError("region must be non-empty")
    edges: set[SignedEdge] = set()
    for x in states:
        edges |= _box_edges(net, SymbolicState.from_state(x), False, cap)
    return InteractionGraph(frozenset(range(net.n)), frozenset(edges))


def global_interaction_graph(net: Network) -> InteractionGraph:
    return interaction_graph_over(net, net.state_space)


def difference_graph(system, box: SymbolicState | None = None, cap: int | None = DEFAULT_CAP) -> InteractionGraph:
    """Interaction graph of any system with ``state_space``/``image_array`` over a box.

    Brute force over every member and every in-box unit neighbour; used for
    network modules, which have no rule expressions, and as a cross-check.
    """
    box = system.state_space if box is None else box
    n = len(box)
    states = box.members_array(cap)
    image = system.image_array(states)
    edges = set()
    for i in range(n):
        movable = states[:, i] < box[i].hi
        if not movable.any():
            continue
        lower = states[movable]
        upper = lower.copy()
        upper[:, i] += 1
        diff = system.image_array(upper) - image[movable]
        for j in range(n):
            if (diff[:, j] > 0).any():
                edges.add(SignedEdge(i, j, 1))
            if (diff[:, j] < 0).any():
                edges.add(SignedEdge(i, j, -1))
    return InteractionGraph(frozenset(range(n)), frozenset(edges))

