"""Acceptance gate.  Tests are named ``test_criterion_<n>_...``; the conftest
hook prints one PASS/FAIL line per criterion at the end of the run."""

import math
import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from _certs import corpus_certificate, digit_mutations
from _gen import CASES
from biocircuit_tf import certificate as certs
from biocircuit_tf.blockdiag import feedback_block, geometric_partial_sum, reduce
from biocircuit_tf.circuit import corpus, parse
from biocircuit_tf.cli import main, sample_obligation
from biocircuit_tf.elaborate import elaborate
from biocircuit_tf.errors import AlgebraicLoop
from biocircuit_tf.obligations import ObligationKind as K
from biocircuit_tf.ode import check_equivalence, derive_tf, ode_make
from biocircuit_tf.oracle import InputSpec, simulate, validate_tf
from biocircuit_tf.symbolic import S, const, param, rat_eq, rat_eval
from biocircuit_tf.trace import Rule, conclude_equal
from test_blockdiag import test_reduce_invariant_under_child_permutation as permutation_invariance
from test_circuit import test_random_program_round_trip as random_round_trip
from test_ode import test_scaling_invariance as scaling_invariance
from test_symbolic import test_canonicalization_idempotent_and_factor_invariant as idempotence
from test_symbolic import test_field_axioms as field_axioms

alpha, gamma_A, gamma_R = param("alpha"), param("gamma_A"), param("gamma_R")


def _elaborated(name, text=None):
    return elaborate(parse(text if text is not None else corpus()[name]))


# 1 -------------------------------------------------------------------------


def test_criterion_1_activated_diagram_reduction():
    start = time.perf_counter()
    red = reduce(_elaborated("activated.gnc").diagram)
    cert = conclude_equal(red.certificate, red.fn, gamma_A / (S + alpha))
    elapsed = time.perf_counter() - start
    assert rat_eq(red.fn, gamma_A / (S + alpha))
    assert ("NonzeroDenom", "s + alpha") in {(o.kind.value, o.subject) for o in red.obligations}
    assert [s.rule for s in cert.steps] == [Rule.SERIES_COMP, Rule.CROSS_MULT_EQ]
    assert certs.replay(certs.emit(cert)).accepted
    assert elapsed < 1.0


# 2 -------------------------------------------------------------------------


def test_criterion_2_ode_derivation_and_ledger():
    start = time.perf_counter()
    ode = ode_make(["alpha", 1], ["gamma_A"], ["alpha", "gamma_A"])
    res = derive_tf(ode)
    elapsed = time.perf_counter() - start
    assert rat_eq(res.tf, gamma_A / (S + alpha))
    ledger = Counter((o.kind, o.subject) for o in res.obligations)
    assert ledger == Counter({
        (K.POSITIVITY, "alpha"): 1,
        (K.POSITIVITY, "gamma_A"): 1,
        (K.ZERO_INIT_COND, "u, y"): 1,
        (K.DIFFERENTIABILITY, "u, y up to derivative order 1"): 1,
        (K.LAPLACE_EXISTS, "u"): 1,
        (K.LAPLACE_EXISTS, "y"): 1,
        (K.NONZERO_DENOM, "L[u](s)"): 1,
        (K.NONZERO_DENOM, "s + alpha"): 1,
    })
    assert elapsed < 1.0


def test_criterion_2_elaborated_ode_is_the_same_model():
    e = _elaborated("activated.gnc")
    assert e.ode == ode_make(["alpha", 1], ["gamma_A"], ["alpha", "gamma_A"])


# 3 -------------------------------------------------------------------------


def test_criterion_3_repressed_expression():
    start = time.perf_counter()
    rep_circuit = _elaborated("repressed.gnc")
    red, der = reduce(rep_circuit.diagram), derive_tf(rep_circuit.ode)
    assert rat_eq(red.fn, -gamma_R / (S + alpha))
    assert rat_eq(der.tf, -gamma_R / (S + alpha))
    assert check_equivalence(red, der).equivalent

    # same gain symbol on both sides, so only the sign differs
    shared = corpus()["repressed.gnc"].replace("gamma_R", "gamma_A")
    act, rep = _elaborated("activated.gnc"), _elaborated("repressed.gnc", shared)
    cross = check_equivalence(reduce(act.diagram), derive_tf(rep.ode))
    assert not cross.equivalent
    assert not cross.certificate.conclusion.holds
    assert certs.replay(certs.emit(cross.certificate)).accepted
    assert time.perf_counter() - start < 1.0


# 4 -------------------------------------------------------------------------


def test_criterion_4_convergent_loop_matches_partial_sum():
    f, g = const(Fraction(1, 2)), const(Fraction(1, 2))
    closed, obs = feedback_block(f, g)
    assert rat_eval(closed, {}, 0) == pytest.approx(2 / 3, abs=0)
    partial = rat_eval(geometric_partial_sum(f, g, 50), {}, 0)
    assert abs(partial - rat_eval(closed, {}, 0)) < 1e-12
    conv = next(o for o in obs if o.kind is K.CONVERGENCE)
    assert sample_obligation(conv, {}, [1.0]) is True


@pytest.mark.parametrize("a, b", [(1, 1), (2, 1), (-2, 1)])
def test_criterion_4_divergent_loops(a, b):
    f, g = const(a), const(b)
    try:
        _, obs = feedback_block(f, g)
    except AlgebraicLoop as exc:  # loop gain exactly 1: no closed form at all
        obs = exc.obligations
    conv = [o for o in obs if o.kind is K.CONVERGENCE]
    assert len(conv) == 1
    assert sample_obligation(conv[0], {}, [1.0]) is False

    sums = [abs(rat_eval(geometric_partial_sum(f, g, k), {}, 0)) for k in (10, 25, 50, 100)]
    assert all(x < y for x, y in zip(sums, sums[1:]))
    assert sums[-1] > 100
    if abs(a * b) > 1:
        assert sums[-1] > 1e20


# 5 -------------------------------------------------------------------------


def test_criterion_5_numerical_cross_validation():
    start = time.perf_counter()
    e = _elaborated("activated.gnc")
    bindings = {"alpha": 1, "gamma_A": 2}
    tf = reduce(e.diagram).fn
    report = validate_tf(e.ode, bindings, tf, [1, 2, 5], 1e-4, duration=20.0, dt=1e-3, input=InputSpec("step"))
    assert report.passed
    for p in report.points:
        assert abs(p.measured - 2 / (p.s + 1)) / abs(2 / (p.s + 1)) < 1e-4
    _, y = simulate(e.ode, bindings, InputSpec("step"), 20.0, 1e-3)
    i = int(round(1.0 / y.dt))
    assert y.times[i] == pytest.approx(1.0)
    assert abs(y.samples[i] - 2 * (1 - math.exp(-1))) < 1e-6
    assert np.isclose(y.samples[-1], 2 * (1 - math.exp(-20)), atol=1e-6)
    assert time.perf_counter() - start < 10.0


# 6 -------------------------------------------------------------------------


def test_criterion_6_case_budget():
    assert CASES >= 500


def test_criterion_6_field_axioms():
    field_axioms()


def test_criterion_6_canonicalization_idempotence():
    idempotence()


def test_criterion_6_reduce_permutation_invariance():
    permutation_invariance()


def test_criterion_6_derive_scaling_invariance():
    scaling_invariance()


@pytest.mark.parametrize("name", sorted(corpus()))
def test_criterion_6_corpus_round_trip(name):
    from biocircuit_tf.circuit import render_ast

    ast = parse(corpus()[name])
    assert parse(render_ast(ast)) == ast


def test_criterion_6_random_program_round_trip():
    random_round_trip()


def test_criterion_6_tamper_detection():
    total = 0
    for name in sorted(corpus()):
        doc = corpus_certificate(name)
        assert certs.replay(doc).accepted
        for path, pos, mutated in digit_mutations(doc):
            assert not certs.replay(mutated).accepted, (name, path, pos)
            total += 1
    assert total >= 500


# 7 -------------------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(corpus()))
def test_criterion_7_derive_is_byte_stable(name, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    (tmp_path / name).write_text(corpus()[name])
    docs, outputs = [], []
    for run in ("first", "second"):
        out = tmp_path / f"{run}.tfcert.json"
        assert main(["derive", name, "--out", str(out)]) == 0
        outputs.append(capsys.readouterr().out.replace(out.name, "<cert>"))
        docs.append(out.read_text())
    assert certs.body(docs[0]).encode() == certs.body(docs[1]).encode()
    assert docs[0] == docs[1]
    assert outputs[0] == outputs[1]
