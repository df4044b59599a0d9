"""Parser for ``.gnc`` genetic-circuit descriptions.

The language is line oriented; each non-blank line holds one declaration
and ``#`` starts a comment::

    param <name> [positive] [= <rational>]
    gene <name> degrade <param>
    activate <gene> by <input-or-gene> gain <param>
    repress <gene> by <input-or-gene> gain <param>
    feedback <gene> to <gene> gain <param> sign +|-
    input <name>
    output <gene>
    expect <rational function of s>

Every statement is picked by its first keyword, so the grammar is LL(1).
:func:`parse` runs the syntax pass followed by a name-resolution pass; all
failures are :class:`CircuitError` values carrying a 1-based source span.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib.resources import files
from typing import Optional

from .errors import BiocircuitError, ExpressionSyntaxError
from .notation import parse_rational
from .symbolic import LAPLACE_VAR, RationalFn, format_fraction, render

KEYWORDS = frozenset(
    "param positive gene degrade activate repress by gain input output feedback to sign expect".split()
)


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    end_column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


# -- errors -----------------------------------------------------------------


class CircuitError(BiocircuitError, ValueError):
    def __init__(self, message: str, span: Span):
        self.span = span
        self.message = message
        super().__init__(f"{span.line}:{span.column}: {message}")


class CircuitSyntaxError(CircuitError):
    def __init__(self, span: Span, expected, found: str):
        self.expected = tuple(sorted(expected))
        self.found = found
        super().__init__(f"expected {' or '.join(self.expected)}, found {found}", span)


class DuplicateName(CircuitError):
    pass


class UndeclaredName(CircuitError):
    pass


class InvalidDeclaration(CircuitError):
    pass


class UnsupportedTopology(CircuitError):
    pass


# -- AST --------------------------------------------------------------------

_span = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ParamDecl:
    name: str
    positive: bool = False
    value: Optional[Fraction] = None
    span: Span = _span


@dataclass(frozen=True)
class GeneDecl:
    name: str
    degrade: str
    span: Span = _span


@dataclass(frozen=True)
class RegulationDecl:
    mode: str  # "activate" | "repress"
    target: str
    source: str
    gain: str
    span: Span = _span

    @property
    def sign(self) -> int:
        return 1 if self.mode == "activate" else -1


@dataclass(frozen=True)
class FeedbackDecl:
    source: str
    target: str
    gain: str
    sign: str  # "+" | "-"
    span: Span = _span


@dataclass(frozen=True)
class InputDecl:
    name: str
    span: Span = _span


@dataclass(frozen=True)
class OutputDecl:
    gene: str
    span: Span = _span


@dataclass(frozen=True)
class ExpectDecl:
    fn: RationalFn
    span: Span = _span


@dataclass(frozen=True)
class CircuitAst:
    declarations: tuple

    def of(self, kind) -> list:
        return [d for d in self.declarations if isinstance(d, kind)]

    @property
    def params(self) -> dict:
        return {d.name: d for d in self.of(ParamDecl)}

    @property
    def genes(self) -> dict:
        return {d.name: d for d in self.of(GeneDecl)}

    @property
    def input(self) -> InputDecl:
        return self.of(InputDecl)[0]

    @property
    def output(self) -> OutputDecl:
        return self.of(OutputDecl)[0]

    @property
    def expect(self) -> Optional[ExpectDecl]:
        found = self.of(ExpectDecl)
        return found[0] if found else None


# -- lexer ------------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<number>\d+(?:\.\d+)?(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[=+\-])"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # number | name | keyword | punct | eol
    text: str
    span: Span

    def describe(self) -> str:
        return "end of line" if self.kind == "eol" else repr(self.text)


def _lex_line(text: str, lineno: int) -> list:
    toks = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            span = Span(lineno, pos + 1, pos + 2)
            raise CircuitSyntaxError(span, {"a name", "a number", "'='", "'+'", "'-'"}, repr(ch))
        kind = m.lastgroup
        if kind == "name" and m.group() in KEYWORDS:
            kind = "keyword"
        toks.append(_Tok(kind, m.group(), Span(lineno, pos + 1, m.end() + 1)))
        pos = m.end()
    toks.append(_Tok("eol", "", Span(lineno, len(text) + 1, len(text) + 1)))
    return toks


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


# -- parser -----------------------------------------------------------------


class _Line:
    def __init__(self, toks: list):
        self.toks = toks
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        if tok.kind != "eol":
            self.i += 1
        return tok

    def keyword(self, word: str) -> _Tok:
        tok = self.next()
        if tok.kind != "keyword" or tok.text != word:
            raise CircuitSyntaxError(tok.span, {repr(word)}, tok.describe())
        return tok

    def name(self, what: str = "a name") -> _Tok:
        tok = self.next()
        if tok.kind != "name":
            raise CircuitSyntaxError(tok.span, {what}, tok.describe())
        return tok

    def end(self) -> None:
        tok = self.peek()
        if tok.kind != "eol":
            raise CircuitSyntaxError(tok.span, {"end of line"}, tok.describe())


def _rational(tok: _Tok, negative: bool) -> Fraction:
    try:
        value = Fraction(tok.text)
    except (ValueError, ZeroDivisionError):
        raise CircuitSyntaxError(tok.span, {"a rational number"}, tok.describe()) from None
    return -value if negative else value


def _span_over(first: _Tok, last: _Tok) -> Span:
    return Span(first.span.line, first.span.column, max(last.span.end_column, first.span.end_column))


def _statement(line: _Line, raw: str, lineno: int):
    head = line.next()
    if head.kind != "keyword" or head.text not in _STATEMENTS:
        raise CircuitSyntaxError(head.span, {repr(k) for k in _STATEMENTS}, head.describe())
    if head.text == "expect":
        return _expect(head, raw, lineno)
    decl = _STATEMENTS[head.text](line, head)
    line.end()
    return decl


def _param(line: _Line, head: _Tok) -> ParamDecl:
    name = line.name("a parameter name")
    positive = False
    value = None
    last = name
    if line.peek().kind == "keyword" and line.peek().text == "positive":
        last = line.next()
        positive = True
    tok = line.peek()
    if tok.kind == "punct" and tok.text == "=":
        line.next()
        negative = False
        tok = line.next()
        if tok.kind == "punct" and tok.text == "-":
            negative = True
            tok = line.next()
        if tok.kind != "number":
            raise CircuitSyntaxError(tok.span, {"a rational number"}, tok.describe())
        value = _rational(tok, negative)
        last = tok
    elif tok.kind != "eol":
        expected = {"'='", "end of line"} | (set() if positive else {"'positive'"})
        raise CircuitSyntaxError(tok.span, expected, tok.describe())
    return ParamDecl(name.text, positive, value, _span_over(head, last))


def _gene(line: _Line, head: _Tok) -> GeneDecl:
    name = line.name("a gene name")
    line.keyword("degrade")
    rate = line.name("a parameter name")
    return GeneDecl(name.text, rate.text, _span_over(head, rate))


def _regulation(line: _Line, head: _Tok) -> RegulationDecl:
    target = line.name("a gene name")
    line.keyword("by")
    source = line.name("an input or gene name")
    line.keyword("gain")
    gain = line.name("a parameter name")
    return RegulationDecl(head.text, target.text, source.text, gain.text, _span_over(head, gain))


def _feedback(line: _Line, head: _Tok) -> FeedbackDecl:
    source = line.name("a gene name")
    line.keyword("to")
    target = line.name("a gene name")
    line.keyword("gain")
    gain = line.name("a parameter name")
    line.keyword("sign")
    sign = line.next()
    if sign.kind != "punct" or sign.text not in "+-":
        raise CircuitSyntaxError(sign.span, {"'+'", "'-'"}, sign.describe())
    return FeedbackDecl(source.text, target.text, gain.text, sign.text, _span_over(head, sign))


def _input(line: _Line, head: _Tok) -> InputDecl:
    name = line.name("an input name")
    return InputDecl(name.text, _span_over(head, name))


def _output(line: _Line, head: _Tok) -> OutputDecl:
    name = line.name("a gene name")
    return OutputDecl(name.text, _span_over(head, name))


def _expect(head: _Tok, raw: str, lineno: int) -> ExpectDecl:
    start = head.span.end_column - 1  # 0-based offset just past the keyword
    text = raw[start:]
    if not text.strip():
        raise CircuitSyntaxError(Span(lineno, len(raw) + 1, len(raw) + 1), {"an expression"}, "end of line")
    try:
        fn = parse_rational(text)
    except ExpressionSyntaxError as exc:
        col = min(start + exc.position + 1, len(raw) + 1)
        raise CircuitSyntaxError(Span(lineno, col, col + 1), {"a rational function of s"}, f"malformed expression ({exc})") from None
    return ExpectDecl(fn, Span(lineno, head.span.column, len(raw.rstrip()) + 1))


_STATEMENTS = {
    "param": _param,
    "gene": _gene,
    "activate": _regulation,
    "repress": _regulation,
    "feedback": _feedback,
    "input": _input,
    "output": _output,
    "expect": None,
}


_EXPECT_HEAD = re.compile(r"\s*expect(?![A-Za-z0-9_])")


def parse_syntax(source: str) -> CircuitAst:
    """Syntax pass only: no name resolution."""
    decls = []
    for lineno, line in enumerate(source.splitlines(), start=1):
        raw = _strip_comment(line)
        head = _EXPECT_HEAD.match(raw)
        # the expression after ``expect`` has its own grammar; lex only the keyword
        toks = _lex_line(raw[: head.end()] if head else raw, lineno)
        if toks[0].kind == "eol":
            continue
        decls.append(_statement(_Line(toks), raw, lineno))
    return CircuitAst(tuple(decls))


# -- resolution -------------------------------------------------------------


def resolve(ast: CircuitAst) -> CircuitAst:
    """Check declarations and references; return ``ast`` unchanged on success."""
    kinds: dict = {}
    spans: dict = {}
    first_span = Span(1, 1, 1)
    for d in ast.declarations:
        name = getattr(d, "name", None)
        if name is None:
            continue
        kind = {ParamDecl: "parameter", GeneDecl: "gene", InputDecl: "input"}[type(d)]
        if name in kinds:
            prev = spans[name]
            raise DuplicateName(f"{name!r} already declared at {prev}", d.span or first_span)
        if kind == "parameter" and name == LAPLACE_VAR:
            raise InvalidDeclaration(f"{LAPLACE_VAR!r} is reserved for the Laplace variable", d.span)
        kinds[name] = kind
        spans[name] = d.span

    def need(name: str, allowed: tuple, span: Span) -> None:
        kind = kinds.get(name)
        if kind is None:
            raise UndeclaredName(f"{name!r} is not declared", span)
        if kind not in allowed:
            raise InvalidDeclaration(f"{name!r} is a {kind}, expected {' or '.join(allowed)}", span)

    for d in ast.declarations:
        if isinstance(d, GeneDecl):
            need(d.degrade, ("parameter",), d.span)
        elif isinstance(d, RegulationDecl):
            need(d.target, ("gene",), d.span)
            need(d.source, ("input", "gene"), d.span)
            need(d.gain, ("parameter",), d.span)
        elif isinstance(d, FeedbackDecl):
            need(d.source, ("gene",), d.span)
            need(d.target, ("gene",), d.span)
            need(d.gain, ("parameter",), d.span)
        elif isinstance(d, OutputDecl):
            need(d.gene, ("gene",), d.span)
        elif isinstance(d, ExpectDecl):
            for p in sorted(d.fn.params()):
                need(p, ("parameter",), d.span)

    last = ast.declarations[-1].span if ast.declarations else first_span
    for kind, what in ((InputDecl, "input"), (OutputDecl, "output")):
        found = ast.of(kind)
        if not found:
            raise InvalidDeclaration(f"missing {what} declaration", last)
        if len(found) > 1:
            raise InvalidDeclaration(f"more than one {what} declaration", found[1].span)
    expects = ast.of(ExpectDecl)
    if len(expects) > 1:
        raise InvalidDeclaration("more than one expect declaration", expects[1].span)
    return ast


def parse(source: str) -> CircuitAst:
    """Parse and resolve a circuit description."""
    return resolve(parse_syntax(source))


# -- rendering --------------------------------------------------------------


def render_decl(d) -> str:
    if isinstance(d, ParamDecl):
        out = f"param {d.name}"
        if d.positive:
            out += " positive"
        if d.value is not None:
            out += f" = {format_fraction(d.value)}"
        return out
    if isinstance(d, GeneDecl):
        return f"gene {d.name} degrade {d.degrade}"
    if isinstance(d, RegulationDecl):
        return f"{d.mode} {d.target} by {d.source} gain {d.gain}"
    if isinstance(d, FeedbackDecl):
        return f"feedback {d.source} to {d.target} gain {d.gain} sign {d.sign}"
    if isinstance(d, InputDecl):
        return f"input {d.name}"
    if isinstance(d, OutputDecl):
        return f"output {d.gene}"
    if isinstance(d, ExpectDecl):
        return f"expect {render(d.fn)}"
    raise TypeError(f"unknown declaration {d!r}")


def render_ast(ast: CircuitAst) -> str:
    return "".join(render_decl(d) + "\n" for d in ast.declarations)


def corpus() -> dict:
    """The bundled example circuits, ``{file name: source text}``."""
    root = files(__package__) / "corpus"
    return {
        p.name: p.read_text(encoding="utf-8")
        for p in sorted(root.iterdir(), key=lambda p: p.name)
        if p.name.endswith(".gnc")
    }
