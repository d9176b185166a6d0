"""The ``.drn`` text format.

Grammar (whitespace-insensitive, ``#`` starts a line comment)::

    model ::= ["network" IDENT] decl*
    decl  ::= "var" IDENT ":" INT ".." INT
            | "rule" IDENT ":=" vexpr
    vexpr ::= INT | IDENT | bexpr
            | "case" "{" (bexpr "->" vexpr ";")+ "default" vexpr [";"] "}"
    bexpr ::= bexpr "|" bterm | bterm
    bterm ::= bterm "&" bfac | bfac
    bfac  ::= "!" bfac | "(" bexpr ")" | IDENT CMP INT | IDENT
    CMP   ::= "=" | "!=" | "<" | "<=" | ">" | ">="

A condition written where a level is expected means 1 if it holds and 0
otherwise.  A bare IDENT inside a condition means "level is non-zero".
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from drn.errors import (
    DslSyntaxError,
    DuplicateComponent,
    MissingDefault,
    MissingRule,
    StaticRangeViolation,
    UnknownComponent,
)
from drn.expr import (
    Active,
    And,
    Case,
    Cmp,
    Const,
    Indicator,
    Not,
    Or,
    Ref,
    value_constants,
)
from drn.model import Network

KEYWORDS = {"network", "var", "rule", "case", "default"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>:=|\.\.|->|!=|<=|>=|[=<>!&|(){};:])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "ident", "kw", "op" or "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DslSyntaxError("unexpected character", line, pos - line_start + 1, text[pos])
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "ident":
            word = m.group()
            tokens.append(Token("kw" if word in KEYWORDS else "ident", word, line, col))
        elif kind in ("int", "op"):
            tokens.append(Token(kind, m.group(), line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        # component name -> position, filled before rules are resolved
        self.positions: dict[str, int] = {}

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: Token | None = None, cls=DslSyntaxError):
        tok = tok or self.tok
        return cls(message, tok.line, tok.col, tok.text or "<eof>")

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.tok
        if tok.kind != kind or (text is not None and tok.text != text):
            want = repr(text) if text is not None else kind
            raise self.error(f"expected {want}")
        return self.advance()

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text == text

    # declarations are collected first so rules may refer forward
    def parse_decls(self):
        name = "network"
        if self.at("network"):
            self.advance()
            name = self.expect("ident").text
        variables: list[tuple[Token, int, int]] = []
        rules: list[tuple[Token, int]] = []
        while self.tok.kind != "eof":
            if self.at("var"):
                self.advance()
                ident = self.expect("ident")
                self.expect("op", ":")
                lo_tok = self.expect("int")
                self.expect("op", "..")
                hi_tok = self.expect("int")
                lo, hi = int(lo_tok.text), int(hi_tok.text)
                if lo != 0:
                    raise self.error("ranges must start at 0", lo_tok, StaticRangeViolation)
                if hi < 1:
                    raise self.error("maximal level must be at least 1", hi_tok, StaticRangeViolation)
                variables.append((ident, lo, hi))
            elif self.at("rule"):
                self.advance()
                ident = self.expect("ident")
                self.expect("op", ":=")
                # skip the rule body for now; remember where it starts
                rules.append((ident, self.pos))
                self._skip_vexpr()
            else:
                raise self.error("expected 'var' or 'rule'")
        return name, variables, rules

    def _skip_vexpr(self):
        depth = 0
        while True:
            tok = self.tok
            if tok.kind == "eof":
                if depth:
                    raise self.error("unterminated case expression")
                return
            if depth == 0 and tok.kind == "kw" and tok.text in ("var", "rule"):
                return
            if tok.kind == "op" and tok.text == "{":
                depth += 1
            elif tok.kind == "op" and tok.text == "}":
                depth -= 1
                if depth < 0:
                    raise self.error("unbalanced '}'")
            self.advance()

    def resolve(self, tok: Token) -> int:
        try:
            return self.positions[tok.text]
        except KeyError:
            raise self.error(f"unknown component '{tok.text}'", tok, UnknownComponent) from None

    def parse_vexpr(self):
        if self.at("case"):
            return self.parse_case()
        tok = self.tok
        nxt = self.tokens[self.pos + 1]
        bare_end = nxt.kind in ("eof",) or (nxt.kind == "kw" and nxt.text in ("var", "rule")) or (
            nxt.kind == "op" and nxt.text in (";", "}")
        )
        if bare_end and tok.kind == "int":
            self.advance()
            return Const(int(tok.text))
        if bare_end and tok.kind == "ident":
            self.advance()
            return Ref(self.resolve(tok))
        return Indicator(self.parse_bexpr())

    def parse_case(self):
        self.expect("kw", "case")
        self.expect("op", "{")
        branches = []
        while not self.at("default"):
            if self.at("}"):
                if not branches:
                    raise self.error("case needs at least one guarded branch")
                raise self.error("case without a default branch", cls=MissingDefault)
            if self.tok.kind == "eof":
                raise self.error("unterminated case expression")
            guard = self.parse_bexpr()
            self.expect("op", "->")
            value = self.parse_vexpr()
            self.expect("op", ";")
            branches.append((guard, value))
        if not branches:
            raise self.error("case needs at least one guarded branch")
        self.expect("kw", "default")
        default = self.parse_vexpr()
        if self.at(";"):
            self.advance()
        self.expect("op", "}")
        return Case(tuple(branches), default)

    def parse_bexpr(self):
        left = self.parse_bterm()
        while self.at("|"):
            self.advance()
            left = Or(left, self.parse_bterm())
        return left

    def parse_bterm(self):
        left = self.parse_bfac()
        while self.at("&"):
            self.advance()
            left = And(left, self.parse_bfac())
        return left

    def parse_bfac(self):
        tok = self.tok
        if self.at("!"):
            self.advance()
            return Not(self.parse_bfac())
        if self.at("("):
            self.advance()
            inner = self.parse_bexpr()
            self.expect("op", ")")
            return inner
        if tok.kind == "ident":
            self.advance()
            comp = self.resolve(tok)
            if self.tok.kind == "op" and self.tok.text in ("=", "!=", "<", "<=", ">", ">="):
                op = self.advance().text
                value = self.expect("int")
                return Cmp(comp, op, int(value.text))
            return Active(comp)
        raise self.error("expected a condition")


def parse_model(text: str) -> Network:
    """Parse ``.drn`` source into a validated :class:`Network`.

    Raises a :class:`~drn.errors.DslError` subclass carrying line and column.
    """
    p = _Parser(text)
    name, variables, rules = p.parse_decls()
    if not variables:
        raise DslSyntaxError("model declares no components", 1, 1)
    for ident, _, _ in variables:
        if ident.text in p.positions:
            raise p.error(f"component '{ident.text}' declared twice", ident, DuplicateComponent)
        p.positions[ident.text] = len(p.positions)
    max_levels = [hi for _, _, hi in variables]

    bodies = {}
    for ident, start in rules:
        target = p.resolve(ident)
        if target in bodies:
            raise p.error(f"second rule for '{ident.text}'", ident, DuplicateComponent)
        p.pos = start
        expr = p.parse_vexpr()
        tok = p.tok
        if not (tok.kind == "eof" or (tok.kind == "kw" and tok.text in ("var", "rule"))):
            raise p.error("unexpected token after rule")
        for value in value_constants(expr):
            if not 0 <= value <= max_levels[target]:
                raise p.error(
                    f"constant {value} outside range 0..{max_levels[target]} of '{ident.text}'",
                    ident,
                    StaticRangeViolation,
                )
        bodies[target] = expr
    for ident, _, _ in variables:
        if p.positions[ident.text] not in bodies:
            raise p.error(f"no rule for '{ident.text}'", ident, MissingRule)

    names = tuple(ident.text for ident, _, _ in variables)
    return Network(names, tuple(max_levels), tuple(bodies[i] for i in range(len(names))), name)


def _cond_text(expr, names, level: int) -> str:
    # level: 0 = top of an or-chain, 1 = operand of '&', 2 = operand of '!'
    if isinstance(expr, Cmp):
        return f"{names[expr.comp]} {expr.op} {expr.value}"
    if isinstance(expr, Active):
        return names[expr.comp]
    if isinstance(expr, Not):
        return "!" + _cond_text(expr.arg, names, 2)
    if isinstance(expr, And):
        text = f"{_cond_text(expr.left, names, 1)} & {_cond_text(expr.right, names, 2)}"
        return f"({text})" if level >= 2 else text
    if isinstance(expr, Or):
        text = f"{_cond_text(expr.left, names, 0)} | {_cond_text(expr.right, names, 1)}"
        return f"({text})" if level >= 1 else text
    raise TypeError(f"not a condition: {expr!r}")


def _value_text(expr, names, indent: str) -> str:
    if isinstance(expr, Const):
        return str(expr.value)
    if isinstance(expr, Ref):
        return names[expr.comp]
    if isinstance(expr, Indicator):
        text = _cond_text(expr.cond, names, 0)
        # a lone Active would read back as a level reference
        return f"({text})" if isinstance(expr.cond, Active) else text
    if isinstance(expr, Case):
        inner = indent + "  "
        lines = ["case {"]
        for guard, value in expr.branches:
            lines.append(f"{inner}{_cond_text(guard, names, 0)} -> {_value_text(value, names, inner)};")
        lines.append(f"{inner}default {_value_text(expr.default, names, inner)}")
        lines.append(indent + "}")
        return "\n".join(lines)
    raise TypeError(f"not a value expression: {expr!r}")


def serialize_model(net: Network) -> str:
    """Canonical text for ``net``; ``parse_model`` reads it back unchanged."""
    width = max(len(name) for name in net.names)
    lines = [f"network {net.name}", ""]
    for name, p in zip(net.names, net.max_levels):
        lines.append(f"var {name.ljust(width)} : 0..{p}")
    lines.append("")
    for name, rule in zip(net.names, net.rules):
        lines.append(f"rule {name} := {_value_text(rule, net.names, '')}")
    return "\n".join(lines) + "\n"


def bundled_models() -> list[str]:
    root = resources.files("drn") / "models"
    return sorted(entry.name for entry in root.iterdir() if entry.name.endswith(".drn"))


def bundled_source(name: str) -> str:
    if not name.endswith(".drn"):
        name += ".drn"
    return (resources.files("drn") / "models" / name).read_text(encoding="utf-8")


def load_bundled(name: str) -> Network:
    """Parse one of the models shipped with the package, e.g. ``"thcell"``."""
    return parse_model(bundled_source(name))
