"""Asynchronous state transition graphs and their attractors.

Under asynchronous update a state ``x`` moves to ``x + sgn(f_i(x) - x_i) e_i``
for every component ``i`` that is not at its target level; a fixed point of
``f`` carries a single self-loop instead.

Graphs are stored over a box: every state is identified by its mixed-radix
code in that box, and edges are kept as two parallel code arrays sorted by
``(src, dst)``.  This works for networks and for network modules alike; both
expose ``state_space``, ``names`` and a vectorised ``image_array``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from drn.model import DEFAULT_CAP, State, SymbolicState, check_cap

DOT_LIMIT = 4096


class TransitionGraph:
    """A directed graph whose vertices are states of a box.

    ``nodes`` holds the sorted box codes of the vertices, ``src``/``dst`` the
    edge endpoints as box codes.  Instances are treated as immutable.
    """

    def __init__(self, box: SymbolicState, nodes, src, dst, names: Sequence[str] | None = None):
        self.box = box
        self.nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        n = max(box.cardinality, 1)
        keys = np.unique(src * n + dst)
        self.src = keys // n
        self.dst = keys % n
        self.names = tuple(names) if names is not None else tuple(str(k + 1) for k in range(len(box)))
        if self.src.size and not (np.isin(self.src, self.nodes).all() and np.isin(self.dst, self.nodes).all()):
            raise ValueError("edge endpoint outside the vertex set")

    def __repr__(self) -> str:
        return f"TransitionGraph(box={self.box}, vertices={self.n_vertices}, edges={self.n_edges})"

    @property
    def n_vertices(self) -> int:
        return int(self.nodes.size)

    @property
    def n_edges(self) -> int:
        return int(self.src.size)

    def states(self) -> Iterator[State]:
        for row in self.box.decode(self.nodes):
            yield tuple(int(v) for v in row)

    def edge_set(self) -> set[tuple[State, State]]:
        a = self.box.decode(self.src)
        b = self.box.decode(self.dst)
        return {(tuple(int(v) for v in u), tuple(int(v) for v in w)) for u, w in zip(a, b)}

    def successors(self, x: Sequence[int]) -> list[State]:
        code = self.box.code_of(x)
        lo, hi = np.searchsorted(self.src, [code, code + 1])
        return [self.box.state_of(c) for c in self.dst[lo:hi]]

    def has_edge(self, x: Sequence[int], y: Sequence[int]) -> bool:
        return tuple(y) in self.successors(x)

    def self_loops(self) -> set[State]:
        loops = self.src[self.src == self.dst]
        return {self.box.state_of(c) for c in loops}

    def __eq__(self, other) -> bool:
        if not isinstance(other, TransitionGraph):
            return NotImplemented
        return (
            self.box == other.box
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
        )

    __hash__ = None

    def difference(self, other: "TransitionGraph", limit: int = 10) -> list[str]:
        """Human-readable list of mismatches against ``other`` (empty if equal)."""
        if self.box != other.box:
            return [f"different boxes: {self.box} vs {other.box}"]
        out = []
        only_a = np.setdiff1d(self.nodes, other.nodes)
        only_b = np.setdiff1d(other.nodes, self.nodes)
        for code in only_a[:limit]:
            out.append(f"vertex only in first: {self.box.state_of(code)}")
        for code in only_b[:limit]:
            out.append(f"vertex only in second: {self.box.state_of(code)}")
        n = max(self.box.cardinality, 1)
        ka = self.src * n + self.dst
        kb = other.src * n + other.dst
        for key in np.setdiff1d(ka, kb)[:limit]:
            out.append(f"edge only in first: {self.box.state_of(key // n)} -> {self.box.state_of(key % n)}")
        for key in np.setdiff1d(kb, ka)[:limit]:
            out.append(f"edge only in second: {self.box.state_of(key // n)} -> {self.box.state_of(key % n)}")
        return out

    @cached_property
    def _csr(self) -> tuple[np.ndarray, np.ndarray]:
        pos_src = np.searchsorted(self.nodes, self.src)
        pos_dst = np.searchsorted(self.nodes, self.dst)
        counts = np.bincount(pos_src, minlength=self.n_vertices)
        indptr = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
        return indptr, pos_dst

    def induced(self, states: Iterable[Sequence[int]]) -> "TransitionGraph":
        """Subgraph on the given states with all edges between them."""
        codes = np.unique(self.box.encode(np.array(list(states), dtype=np.int64).reshape(-1, len(self.box))))
        keep = np.isin(self.src, codes) & np.isin(self.dst, codes)
        return TransitionGraph(self.box, codes, self.src[keep], self.dst[keep], self.names)

    def to_dot(self, limit: int | None = DOT_LIMIT) -> str:
        if limit is not None and self.n_vertices > limit:
            raise ValueError(f"graph has {self.n_vertices} vertices; DOT export is limited to {limit}")
        label = {code: _state_label(self.box.state_of(code)) for code in self.nodes}
        lines = ["digraph STG {"]
        for code in self.nodes:
            lines.append(f'  "{label[code]}";')
        for a, b in zip(self.src, self.dst):
            lines.append(f'  "{label[a]}" -> "{label[b]}";')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "components": list(self.names),
            "vertices": [list(s) for s in self.states()],
            "edges": [[list(a), list(b)] for a, b in sorted(self.edge_set())],
        }
        return json.dumps(doc)


def _state_label(x: State) -> str:
    return "".join(str(v) for v in x) if all(v < 10 for v in x) else ",".join(map(str, x))


def build_stg(system, restrict: SymbolicState | None = None, cap: int | None = DEFAULT_CAP) -> TransitionGraph:
    """Asynchronous state transition graph, optionally induced on a box.

    With ``restrict`` the result has the box's states as vertices and every
    transition whose both ends lie in the box.
    """
    space: SymbolicState = system.state_space
    box = space if restrict is None else restrict
    if not box.issubset(space):
        raise ValueError(f"box {box} is not inside the state space {space}")
    check_cap(box.cardinality, cap)
    states = box.members_array(None)
    image = system.image_array(states)
    codes = np.arange(box.cardinality, dtype=np.int64)
    step = np.sign(image - states)
    srcs, dsts = [], []
    fixed = ~step.any(axis=1)
    srcs.append(codes[fixed])
    dsts.append(codes[fixed])
    for i, iv in enumerate(box):
        target = states[:, i] + step[:, i]
        move = (step[:, i] != 0) & (target >= iv.lo) & (target <= iv.hi)
        srcs.append(codes[move])
        dsts.append(codes[move] + step[move, i] * box.strides[i])
    return TransitionGraph(box, codes, np.concatenate(srcs), np.concatenate(dsts), system.names)


def strongly_connected_components(indptr: Sequence[int], indices: Sequence[int]) -> list[int]:
    """Tarjan's algorithm with an explicit stack.

    Takes a graph in CSR form over vertices ``0..n-1`` and returns a component
    label per vertex.  Labels are assigned in the order components complete,
    so every component's successors carry smaller labels.
    """
    indptr = [int(v) for v in indptr]
    indices = [int(v) for v in indices]
    n = len(indptr) - 1
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    label = [-1] * n
    stack: list[int] = []
    counter = 0
    n_comp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        work = [(root, indptr[root])]
        while work:
            v, pos = work[-1]
            end = indptr[v + 1]
            descended = False
            while pos < end:
                w = indices[pos]
                pos += 1
                if index[w] == -1:
                    work[-1] = (v, pos)
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, indptr[w]))
                    descended = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if descended:
                continue
            work.pop()
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    label[w] = n_comp
                    if w == v:
                        break
                n_comp += 1
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
    return label


@dataclass(frozen=True, order=True)
class Attractor:
    """A terminal strongly connected component; states sorted lexicographically."""

    states: tuple[State, ...]

    def __post_init__(self):
        states = tuple(sorted({tuple(int(v) for v in s) for s in self.states}))
        if not states:
            raise ValueError("an attractor needs at least one state")
        object.__setattr__(self, "states", states)

    @property
    def kind(self) -> str:
        return "steady" if len(self.states) == 1 else "cyclic"

    def __len__(self) -> int:
        return len(self.states)

    def __contains__(self, x) -> bool:
        return tuple(x) in self.states

    def as_dict(self) -> dict:
        return {"kind": self.kind, "states": [list(s) for s in self.states]}


def attractors(g: TransitionGraph) -> list[Attractor]:
    """Terminal strongly connected components, ordered by smallest member."""
    indptr, indices = g._csr
    label = np.asarray(strongly_connected_components(indptr, indices), dtype=np.int64)
    if label.size == 0:
        return []
    pos_src = np.repeat(np.arange(g.n_vertices), np.diff(indptr))
    leaving = label[pos_src] != label[indices]
    open_labels = np.unique(label[pos_src[leaving]])
    terminal = np.setdiff1d(np.unique(label), open_labels)
    members = np.isin(label, terminal)
    codes = g.nodes[members]
    labels = label[members]
    out = []
    for lab in terminal:
        states = g.box.decode(codes[labels == lab])
        out.append(Attractor(tuple(tuple(int(v) for v in row) for row in states)))
    out.sort(key=lambda a: a.states[0])
    return out


def attractors_to_json(found: Sequence[Attractor], **extra) -> str:
    doc = dict(extra)
    doc["attractors"] = [a.as_dict() for a in found]
    return json.dumps(doc)


def is_trap_set(g: TransitionGraph, states: Iterable[Sequence[int]]) -> bool:
    """True iff no edge of ``g`` leaves the given set of vertices."""
    arr = np.array([tuple(s) for s in states], dtype=np.int64).reshape(-1, len(g.box))
    if arr.shape[0] == 0:
        raise ValueError("a trap set must be non-empty")
    if not all(tuple(s) in g.box for s in arr):
        raise ValueError("state outside the graph's box")
    codes = np.unique(g.box.encode(arr))
    if not np.isin(codes, g.nodes).all():
        raise ValueError("state is not a vertex of the graph")
    inside = np.isin(g.src, codes)
    return bool(np.isin(g.dst[inside], codes).all())


def project_dynamics(g: TransitionGraph, components: Sequence[int]) -> TransitionGraph:
    """Projection of ``g`` onto an ordered set of components.

    Self-loops project to self-loops; a move survives only if the component
    that changes is among ``components``.
    """
    comps = list(components)
    if not comps:
        raise ValueError("projection needs at least one component")
    if len(set(comps)) != len(comps) or not all(0 <= c < len(g.box) for c in comps):
        raise ValueError(f"invalid component selection {comps}")
    sub = g.box.project(comps)
    nodes = sub.encode(g.box.decode(g.nodes)[:, comps])
    a = g.box.decode(g.src)
    b = g.box.decode(g.dst)
    changed = a != b
    keep = ~changed.any(axis=1) | changed[:, comps].any(axis=1)
    src = sub.encode(a[keep][:, comps])
    dst = sub.encode(b[keep][:, comps])
    return TransitionGraph(sub, nodes, src, dst, [g.names[c] for c in comps])
