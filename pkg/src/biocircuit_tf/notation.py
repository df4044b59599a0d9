"""Parser for the textual rendering of polynomials and rational functions.

Accepts the output of :func:`symbolic.render` and, more generally, any
expression built from rational literals, parameter names, ``s``, ``+ - * /``,
non-negative integer powers ``^k`` and parentheses.  Division by an
arbitrary expression is allowed; the result is a canonical
:class:`~biocircuit_tf.symbolic.RationalFn`.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import BiocircuitError, ExpressionSyntaxError
from .symbolic import LAPLACE_VAR, ONE, S, SPoly, RationalFn, const, param

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        tok = self.take()
        if tok[1] != value or tok[0] == "eof":
            self.fail(f"expected {value!r}", tok)
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        found = "end of input" if tok[0] == "eof" else repr(tok[1])
        raise ExpressionSyntaxError(f"{msg}, found {found}", tok[2], self.text)

    # expr := ['-'|'+'] term (('+'|'-') term)*
    def expr(self) -> RationalFn:
        tok = self.peek()
        sign = 1
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            sign = -1 if tok[1] == "-" else 1
        value = self.term()
        if sign < 0:
            value = -value
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                rhs = self.term()
                value = value + rhs if tok[1] == "+" else value - rhs
            else:
                return value

    # term := power (('*'|'/') power)*
    def term(self) -> RationalFn:
        value = self.power()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "*/":
                self.take()
                rhs = self.power()
                if tok[1] == "*":
                    value = value * rhs
                else:
                    if rhs.is_zero():
                        raise ExpressionSyntaxError("division by zero", tok[2], self.text)
                    # no structural cancellation: (N)/(D) must read back as rat_make(N, D)
                    value = RationalFn(value.num * rhs.den, value.den * rhs.num)
            else:
                return value

    # power := atom ['^' integer]
    def power(self) -> RationalFn:
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            exp = self.take()
            if exp[0] != "num" or not exp[1].isdigit():
                self.fail("expected a non-negative integer exponent", exp)
            k = int(exp[1])
            if k > 64:
                raise ExpressionSyntaxError("exponent too large", exp[2], self.text)
            if k == 0:
                return ONE
            if base.is_zero():
                return base
            return base**k
        return base

    def atom(self) -> RationalFn:
        tok = self.take()
        kind, value, _ = tok
        if kind == "num":
            return const(Fraction(value))
        if kind == "name":
            return S if value == LAPLACE_VAR else param(value)
        if kind == "op" and value == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "op" and value == "-":
            return -self.power()
        self.fail("expected a number, name or '('", tok)

    def done(self):
        tok = self.peek()
        if tok[0] != "eof":
            self.fail("unexpected trailing input", tok)


def parse_rational(text: str) -> RationalFn:
    """Parse an expression into a canonical :class:`RationalFn`."""
    p = _Parser(text)
    try:
        value = p.expr()
    except ExpressionSyntaxError:
        raise
    except BiocircuitError as exc:
        raise ExpressionSyntaxError(str(exc), 0, text) from exc
    except RecursionError:
        raise ExpressionSyntaxError("expression nested too deeply", 0, text) from None
    p.done()
    return value


def parse_spoly(text: str) -> SPoly:
    """Parse a polynomial in ``s`` (denominator must reduce to 1)."""
    f = parse_rational(text)
    if f.den != SPoly.const(1):
        raise ExpressionSyntaxError("expected a polynomial, got a proper fraction", 0, text)
    return f.num


def parse_param_poly(text: str):
    p = parse_spoly(text)
    if p.degree > 0:
        raise ExpressionSyntaxError("expected an expression free of s", 0, text)
    return p.coeffs[0] if p.coeffs else SPoly().leading()
