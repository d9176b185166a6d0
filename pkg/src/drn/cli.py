"""Command line interface: ``drn <command> MODEL [options]``.

Exit codes: 0 success, 2 model parse error, 3 enumeration cap exceeded,
4 invalid arguments, 5 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from drn import dsl
from drn.dynamics import DOT_LIMIT, attractors, attractors_to_json, build_stg
from drn.errors import DrnError, DslError, EnumerationCapExceeded, InvariantViolation
from drn.input_layer import detect_inputs, sweep
from drn.model import DEFAULT_CAP, Network, SymbolicState, evaluate
from drn.modularize import analyze, decompose, product_stg
from drn.structure import global_interaction_graph, interaction_graph_over
from drn.symbolic import derive_steady_state, frozen_core

EXIT_OK, EXIT_PARSE, EXIT_CAP, EXIT_ARGS, EXIT_INTERNAL = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ARGS, f"{self.prog}: error: {message}\n")


def load_model(path: str) -> tuple[Network, str]:
    """Read a model file, falling back to the bundled corpus by name."""
    p = Path(path)
    if p.is_file():
        return dsl.parse_model(p.read_text(encoding="utf-8")), str(p)
    name = p.name
    if name in dsl.bundled_models() or name + ".drn" in dsl.bundled_models():
        return dsl.load_bundled(name), name
    raise UsageError(f"no such model file: {path}")


def parse_fix(net: Network, spec: str | None) -> dict[int, int]:
    """``"IFNb=1,IL12=0"`` or ``"1=1,2=0"`` -> {position: level}."""
    if not spec:
        return {}
    out = {}
    for item in spec.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"bad --fix item {item!r}; expected NAME=LEVEL")
        try:
            i = net.index(key.strip())
        except KeyError:
            raise UsageError(f"--fix: unknown component {key.strip()!r}") from None
        try:
            level = int(value)
        except ValueError:
            raise UsageError(f"--fix: level {value!r} is not an integer") from None
        if not 0 <= level <= net.max_levels[i]:
            raise UsageError(f"--fix: level {level} outside range 0..{net.max_levels[i]} of {net.names[i]}")
        if i in out and out[i] != level:
            raise UsageError(f"--fix: {net.names[i]} fixed twice")
        out[i] = level
    return out


def parse_cap(text: str | None) -> int | None:
    if text is None:
        text = os.environ.get("DRN_CAP")
    if text is None:
        return DEFAULT_CAP
    if text.lower() in ("none", "off", "0"):
        return None
    try:
        cap = int(text)
    except ValueError:
        raise UsageError(f"invalid cap {text!r}") from None
    if cap < 0:
        raise UsageError("cap must be non-negative")
    return cap


def _fmt_state(x) -> str:
    return "(" + ",".join(str(v) for v in x) + ")"


def _attractor_lines(found) -> list[str]:
    lines = []
    for a in found:
        if a.kind == "steady":
            lines.append(f"steady {_fmt_state(a.states[0])}")
        else:
            lines.append(f"cyclic {{{', '.join(_fmt_state(s) for s in a.states)}}}")
    return lines


def _warn_non_inputs(net: Network, fix: dict[int, int]) -> None:
    others = sorted(set(fix) - detect_inputs(net))
    if others:
        names = ", ".join(net.names[i] for i in others)
        print(f"warning: fixed components {names} are not input vertices; "
              "the fixed box need not be a trap set", file=sys.stderr)


def _derive(net: Network, fix: dict[int, int], cap):
    start = SymbolicState.fixing(net.max_levels, fix)
    return derive_steady_state(net, frozen_core(net, start, cap), cap)


def cmd_attractors(args, net: Network, fix, cap) -> str:
    _warn_non_inputs(net, fix)
    if args.modular:
        box, _ = _derive(net, fix, cap)
        found = analyze(net, box, cap=cap, module_cap=cap).composed
    else:
        found = attractors(build_stg(net, SymbolicState.fixing(net.max_levels, fix), cap))
    if args.format == "json":
        return attractors_to_json(found, components=list(net.names)) + "\n"
    return "\n".join(_attractor_lines(found)) + "\n"


def cmd_symbolic(args, net: Network, fix, cap) -> str:
    if len(fix) == net.n:
        x = tuple(fix[i] for i in range(net.n))
        steady = evaluate(net, x) == x
        if args.format == "json":
            return json.dumps({"state": list(x), "steady": steady, "steps": 0}) + "\n"
        return (_fmt_state(x) if steady else f"{_fmt_state(x)} not steady") + "\n"
    box, trace = _derive(net, fix, cap)
    kind = "regular" if box.is_regular else "symbolic"
    if args.format == "json":
        doc = {
            "trace": [s.format() for s in trace.states],
            "steps": trace.steps,
            "steady_state": box.format(),
            "kind": kind,
            "frozen": [net.names[i] for i in box.regular_components],
        }
        return json.dumps(doc, indent=2) + "\n"
    lines = [s.format() for s in trace.states] if args.trace else [box.format()]
    lines.append(f"# {kind} steady state after {trace.steps} steps")
    return "\n".join(lines) + "\n"


def cmd_verify(args, net: Network, fix, cap) -> str:
    box, _ = _derive(net, fix, cap)
    modules = decompose(net, box, cap)
    product = product_stg(net, box, modules, cap)
    direct = build_stg(net, box, cap)
    if product != direct:
        diff = "\n".join(product.difference(direct))
        raise InvariantViolation(f"product graph differs from the induced transition graph:\n{diff}")
    return (
        f"equal: {box.format()} with {len(modules)} module(s), "
        f"{direct.n_vertices} vertices, {direct.n_edges} edges\n"
    )


def cmd_graph(args, net: Network, fix, cap) -> str:
    if fix:
        g = interaction_graph_over(net, SymbolicState.fixing(net.max_levels, fix), cap=cap)
    else:
        g = global_interaction_graph(net)
    if args.format == "json":
        return g.to_json(net.names) + "\n"
    return g.to_dot(net.names)


def cmd_stg(args, net: Network, fix, cap) -> str:
    g = build_stg(net, SymbolicState.fixing(net.max_levels, fix), cap)
    if args.format == "json":
        return g.to_json() + "\n"
    try:
        return g.to_dot(None if args.force else DOT_LIMIT)
    except ValueError as exc:
        raise UsageError(f"{exc}; use --force to export anyway") from None


def cmd_modules(args, net: Network, fix, cap) -> str:
    box, _ = _derive(net, fix, cap)
    result = analyze(net, box, cap=cap, module_cap=cap)
    if args.format == "json":
        return result.to_json(net) + "\n"
    lines = [f"steady state {box.format()}"]
    for k, module in enumerate(result.modules):
        domain = "x".join(iv.format() for iv in module.state_space)
        lines.append(f"module {{{', '.join(module.names)}}} domain {domain} ({module.size} states)")
        if result.module_attractors is not None:
            lines += ["  " + line for line in _attractor_lines(result.module_attractors[k])]
    if result.composed is not None:
        lines.append(f"composed attractors: {len(result.composed)}")
        lines += ["  " + line for line in _attractor_lines(result.composed)]
    return "\n".join(lines) + "\n"


def cmd_sweep(args, net: Network, fix, cap) -> str:
    if fix:
        raise UsageError("sweep enumerates input combinations itself; --fix is not accepted")
    if not detect_inputs(net):
        raise UsageError("model has no input vertices; use 'symbolic --fix' instead")
    result = sweep(net, cap=cap, module_cap=parse_cap(args.module_cap) if args.module_cap else cap)
    if args.format == "json":
        return json.dumps(result.report()) + "\n"
    return result.to_csv(timing=args.timing)


COMMANDS = {
    "attractors": (cmd_attractors, ("text", "json"), "attractors of the asynchronous dynamics"),
    "symbolic": (cmd_symbolic, ("text", "json"), "derive the (symbolic) steady state of a fixed box"),
    "verify": (cmd_verify, ("text",), "check product graph == induced transition graph"),
    "graph": (cmd_graph, ("dot", "json"), "global or box-restricted interaction graph"),
    "stg": (cmd_stg, ("dot", "json"), "asynchronous state transition graph"),
    "modules": (cmd_modules, ("json", "text"), "network modules at the derived steady state"),
    "sweep": (cmd_sweep, ("csv", "json"), "analyse every input combination"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="drn", description="Analyse multi-valued discrete regulatory networks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, formats, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("model", help="path to a .drn file, or the name of a bundled model")
        p.add_argument("--fix", help="comma-separated NAME=LEVEL (names or 1-based indices)")
        p.add_argument("--format", choices=formats, default=formats[0])
        p.add_argument("--cap", help=f"enumeration cap in states (default {DEFAULT_CAP}, env DRN_CAP, 'none' to lift)")
        p.add_argument("--out", help="write output to this file instead of stdout")
        if name == "attractors":
            p.add_argument("--modular", action="store_true", help="compose attractors from network modules")
        if name == "symbolic":
            p.add_argument("--trace", action="store_true", help="print every iterate")
        if name == "stg":
            p.add_argument("--force", action="store_true", help=f"allow DOT export above {DOT_LIMIT} vertices")
        if name == "sweep":
            p.add_argument("--timing", action="store_true", help="add a wall-time column")
            p.add_argument("--module-cap", help="defer attractor analysis for larger modules")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = COMMANDS[args.command][0]
    try:
        net, source = load_model(args.model)
    except DslError as exc:
        print(exc.format(args.model), file=sys.stderr)
        return EXIT_PARSE
    except UsageError as exc:
        print(f"drn: {exc}", file=sys.stderr)
        return EXIT_ARGS
    try:
        cap = parse_cap(args.cap)
        fix = parse_fix(net, args.fix)
        text = handler(args, net, fix, cap)
    except UsageError as exc:
        print(f"drn: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except EnumerationCapExceeded as exc:
        print(f"drn: {exc}", file=sys.stderr)
        return EXIT_CAP
    except InvariantViolation as exc:
        print(f"drn: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except DrnError as exc:
        print(f"drn: {exc}", file=sys.stderr)
        return EXIT_ARGS
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
