from fractions import Fraction

import pytest

from _circuits import random_program
from _gen import CASES, rng
from biocircuit_tf.circuit import (
    CircuitAst,
    CircuitError,
    CircuitSyntaxError,
    DuplicateName,
    GeneDecl,
    InvalidDeclaration,
    ParamDecl,
    RegulationDecl,
    UndeclaredName,
    corpus,
    parse,
    parse_syntax,
    render_ast,
)

ACTIVATED = corpus()["activated.gnc"]


def test_activated_program():
    ast = parse(ACTIVATED)
    assert len(ast.of(GeneDecl)) == 1
    (reg,) = ast.of(RegulationDecl)
    assert (reg.mode, reg.target, reg.source, reg.gain) == ("activate", "Y", "A", "gamma_A")
    assert ast.params["alpha"] == ParamDecl("alpha", True, Fraction(1))
    assert reg.span.line == 6 and reg.span.column == 1


def test_undeclared_parameter():
    src = ACTIVATED.replace("gene Y degrade alpha", "gene Y degrade beta")
    with pytest.raises(UndeclaredName) as info:
        parse(src)
    assert info.value.span.line == 5


def test_duplicate_name():
    with pytest.raises(DuplicateName):
        parse(ACTIVATED + "gene alpha degrade alpha\n")


def test_missing_output_and_kind_mismatch():
    with pytest.raises(InvalidDeclaration):
        parse(ACTIVATED.replace("output Y", ""))
    with pytest.raises(InvalidDeclaration):
        parse(ACTIVATED.replace("degrade alpha", "degrade A"))
    with pytest.raises(InvalidDeclaration):
        parse("param s\n" + ACTIVATED)


def test_syntax_error_expected_set():
    with pytest.raises(CircuitSyntaxError) as info:
        parse("feedback Y to Y gain k sign plus\n")
    err = info.value
    assert (err.span.line, err.span.column) == (1, 29)
    assert err.expected == ("'+'", "'-'")


def test_comments_and_blank_lines():
    src = "# header\n\n" + ACTIVATED.replace("input A", "input A   # the TF")
    assert parse(src) == parse(ACTIVATED)


def test_expect_line():
    ast = parse(ACTIVATED + "expect gamma_A/(s+alpha)  # claimed\n")
    assert str(ast.expect.fn) == "(gamma_A)/(s + alpha)"
    with pytest.raises(UndeclaredName):
        parse(ACTIVATED + "expect beta/s\n")
    with pytest.raises(CircuitSyntaxError) as info:
        parse(ACTIVATED + "expect (s + \n")
    assert info.value.span.line == 8


@pytest.mark.parametrize("name", sorted(corpus()))
def test_corpus_round_trip(name):
    ast = parse(corpus()[name])
    text = render_ast(ast)
    assert parse(text) == ast
    assert render_ast(parse(text)) == text


def test_random_program_round_trip():
    r = rng(50)
    for _ in range(CASES):
        ast = parse(random_program(r))
        assert parse(render_ast(ast)) == ast


def _mutations(r, text):
    n = len(text)
    yield text[: r.randint(0, n)]
    i = r.randint(0, n)
    yield text[:i] + r.choice("=+-#/()*x1 \n\té\x00") + text[i:]
    i = r.randint(0, max(n - 1, 0))
    yield text[:i] + text[i + 1 :]
    yield "".join(chr(r.randint(0, 0x7F)) for _ in range(r.randint(0, 40)))
    words = text.split()
    r.shuffle(words)
    yield " ".join(words)


def _span_in_text(text, span):
    lines = text.splitlines() or [""]
    if not 1 <= span.line <= len(lines):
        return False
    return 1 <= span.column <= len(lines[span.line - 1]) + 1


def test_parser_is_total_and_spans_point_into_input():
    r = rng(51)
    sources = list(corpus().values())
    checked = 0
    for _ in range(CASES):
        for text in _mutations(r, r.choice(sources)):
            try:
                parse(text)
            except CircuitError as exc:
                assert _span_in_text(text, exc.span), (text, exc)
            checked += 1
    assert checked >= CASES


def test_render_ignores_spans():
    a = parse_syntax("gene Y degrade alpha\n")
    b = parse_syntax("\n\n   gene   Y degrade   alpha\n")
    assert a == b and a.declarations[0].span != b.declarations[0].span
    assert isinstance(a, CircuitAst)
