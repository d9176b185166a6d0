"""Input vertices and the sweep over all input combinations.

Fixing every input vertex to a level and leaving all other components at
full range gives a box whose frozen core is exactly the inputs.  The steady
state derived from it contains every attractor with those input levels, so
sweeping all combinations recovers the complete attractor set of ``f``.
"""

from __future__ import annotations

import csv
import io
import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from drn.dynamics import Attractor
from drn.model import DEFAULT_CAP, Network, SymbolicState
from drn.modularize import ModularAnalysis, analyze
from drn.symbolic import IterationTrace, derive_steady_state, frozen_core

DEFAULT_MODULE_CAP = 2**20


def is_input(net: Network, i: int) -> bool:
    """True iff ``f_i`` is the identity on the range of component ``i``."""
    sup = net.supports[i]
    if i not in sup:
        return False
    axes = [np.arange(net.max_levels[k] + 1, dtype=np.int64) for k in sup]
    mesh = np.meshgrid(*axes, indexing="ij")
    cols = {k: m.ravel() for k, m in zip(sup, mesh)}
    values = np.broadcast_to(net.image_component(i, cols), cols[i].shape)
    return bool(np.array_equal(values, cols[i]))


def detect_inputs(net: Network) -> frozenset[int]:
    return frozenset(i for i in range(net.n) if is_input(net, i))


@dataclass
class SweepEntry:
    assignment: dict[int, int]
    steady_state: SymbolicState
    trace: IterationTrace
    analysis: ModularAnalysis
    seconds: float = 0.0

    @property
    def deferred(self) -> bool:
        return self.analysis.deferred

    @property
    def attractors(self) -> list[Attractor] | None:
        return self.analysis.composed


@dataclass
class SweepResult:
    network: Network
    inputs: tuple[int, ...]
    entries: list[SweepEntry] = field(default_factory=list)

    def all_attractors(self) -> list[Attractor]:
        """Union over combinations; raises if any combination was deferred."""
        out = []
        for entry in self.entries:
            if entry.attractors is None:
                raise ValueError(f"attractor analysis deferred for {entry.assignment}")
            out.extend(entry.attractors)
        return sorted(out, key=lambda a: a.states[0])

    def to_csv(self, timing: bool = False) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        names = [self.network.names[i] for i in self.inputs]
        header = names + ["frozen", "symbolic", "modules", "module_sizes", "attractors"]
        if timing:
            header.append("wall_time_s")
        writer.writerow(header)
        for entry in self.entries:
            box = entry.steady_state
            row = [entry.assignment[i] for i in self.inputs]
            row += [
                len(box.regular_components),
                len(box.symbolic_components),
                len(entry.analysis.modules),
                ";".join(str(m.size) for m in entry.analysis.modules),
                "deferred" if entry.deferred else len(entry.attractors),
            ]
            if timing:
                row.append(f"{entry.seconds:.3f}")
            writer.writerow(row)
        return buf.getvalue()

    def report(self) -> dict:
        net = self.network
        return {
            "inputs": [net.names[i] for i in self.inputs],
            "combinations": [
                {
                    "assignment": {net.names[i]: v for i, v in entry.assignment.items()},
                    "steps": entry.trace.steps,
                    **entry.analysis.report(net),
                    "deferred": entry.deferred,
                }
                for entry in self.entries
            ],
        }


def sweep(
    net: Network,
    inputs: frozenset[int] | None = None,
    cap: int | None = DEFAULT_CAP,
    module_cap: int | None = DEFAULT_MODULE_CAP,
) -> SweepResult:
    """Derive a steady state per input combination and compose its attractors.

    Combinations run in lexicographic order of input levels.  When a module
    exceeds ``module_cap`` states the steady state is kept and the attractor
    analysis is marked deferred.
    """
    inputs = detect_inputs(net) if inputs is None else frozenset(inputs)
    if not inputs:
        raise ValueError("network has no input vertices")
    order = tuple(sorted(inputs))
    result = SweepResult(net, order)
    for levels in itertools.product(*(range(net.max_levels[i] + 1) for i in order)):
        started = time.perf_counter()
        assignment = dict(zip(order, levels))
        start = SymbolicState.fixing(net.max_levels, assignment)
        box, trace = derive_steady_state(net, frozen_core(net, start, cap), cap)
        analysis = analyze(net, box, cap=cap, module_cap=module_cap)
        result.entries.append(SweepEntry(assignment, box, trace, analysis, time.perf_counter() - started))
    return result
