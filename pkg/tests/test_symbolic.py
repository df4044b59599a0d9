from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from _gen import CASES, bindings, rational, rng, spoly
from biocircuit_tf.errors import DivisionByZeroFn, EvalPole, UnboundParameter, ZeroDenominator
from biocircuit_tf.symbolic import (
    ONE,
    S,
    ZERO,
    ParamPoly,
    RationalFn,
    SPoly,
    bind,
    const,
    cross_difference,
    param,
    rat_add,
    rat_eq,
    rat_eval,
    rat_make,
    rat_mul,
    render,
    spoly_eval,
)

alpha, gamma = param("alpha"), param("gamma_A")


def test_activated_form_renders():
    assert render(gamma / (S + alpha)) == "(gamma_A)/(s + alpha)"


def test_numeric_denominator_made_monic():
    assert render(rat_make(SPoly([2, 2]), SPoly.const(2))) == "(s + 1)/(1)"


def test_sum_of_partial_fractions():
    f = 1 / (S + 1) + 1 / (S + 2)
    assert render(f) == "(2*s + 3)/(s^2 + 3*s + 2)"


def test_common_symbolic_factor_cancels_in_product():
    assert render((gamma / (S + alpha)) * (S + alpha)) == "(gamma_A)/(1)"


def test_zero_is_zero_over_one():
    f = S / (S + alpha) - S / (S + alpha)
    assert f == ZERO and render(f) == "(0)/(1)"


def test_zero_denominator_rejected():
    with pytest.raises(ZeroDenominator):
        rat_make(SPoly.s(), SPoly())


def test_division_by_zero_function():
    with pytest.raises(DivisionByZeroFn):
        S / ZERO


def test_reserved_name():
    with pytest.raises(ValueError):
        param("s")


def test_rat_eq_is_mathematical_not_structural():
    a = rat_make(SPoly([ParamPoly.var("alpha"), 1]) * SPoly([1, 1]), SPoly([1, 1]))
    b = RationalFn(SPoly([ParamPoly.var("alpha"), 1]))
    assert rat_eq(a, b)
    assert not rat_eq(a, b + 1)


def test_cross_difference_zero_iff_equal():
    f = gamma / (S + alpha)
    assert cross_difference(f, f).is_zero()
    assert not cross_difference(f, -f).is_zero()


def test_eval_exact_and_pole():
    f = 2 / (S + 1)
    assert rat_eval(f, {}, 1) == 1
    assert rat_eval(f, {}, 1j) == pytest.approx(1 - 1j)
    with pytest.raises(EvalPole):
        rat_eval(f, {}, -1)


def test_eval_unbound():
    with pytest.raises(UnboundParameter):
        rat_eval(gamma / (S + alpha), {"alpha": 1}, 2)


def test_partial_bind():
    f = bind(gamma / (S + alpha), {"alpha": Fraction(1, 2)})
    assert render(f) == "(gamma_A)/(s + 1/2)"
    assert f.params() == {"gamma_A"}


def test_negative_power():
    assert rat_eq((S + alpha) ** -2 * (S + alpha) ** 2, ONE)


def test_eval_matches_double_precision_horner():
    r = rng(1)
    for _ in range(CASES):
        f = rational(r)
        b = bindings(r)
        s = complex(r.uniform(-4, 4), r.uniform(-4, 4))
        num = np.polyval([complex(spoly_eval(SPoly.const(c), b, 0)) for c in reversed(f.num.coeffs)], s)
        den = np.polyval([complex(spoly_eval(SPoly.const(c), b, 0)) for c in reversed(f.den.coeffs)], s)
        if abs(den) < 1e-6:
            continue
        got = rat_eval(f, b, s)
        assert abs(got - num / den) <= 1e-12 * max(1.0, abs(num / den))


def test_degree_additive_under_product():
    r = rng(2)
    for _ in range(CASES):
        a, b = spoly(r, 3, nonzero=True), spoly(r, 3, nonzero=True)
        assert (a * b).degree == a.degree + b.degree


def test_field_axioms():
    r = rng(3)
    for _ in range(CASES):
        f, g, h = rational(r, 1), rational(r, 1), rational(r, 1)
        assert rat_eq(f + g, g + f)
        assert rat_eq(f * g, g * f)
        assert rat_eq((f + g) + h, f + (g + h))
        assert rat_eq((f * g) * h, f * (g * h))
        assert rat_eq(f * (g + h), f * g + f * h)
        assert rat_eq(f + ZERO, f) and rat_eq(f * ONE, f)
        assert rat_eq(f + (-f), ZERO)
        if not f.is_zero():
            assert rat_eq(f * (ONE / f), ONE)


def test_canonicalization_idempotent_and_factor_invariant():
    r = rng(4)
    for _ in range(CASES):
        f = rational(r)
        assert RationalFn(f.num, f.den) == f
        p = spoly(r, 2, symbolic=False, nonzero=True)
        c = Fraction(r.choice([-3, -1, 2, 5]), r.choice([1, 7]))
        assert RationalFn(f.num * p, f.den * p) == f
        assert RationalFn(f.num.scale(c), f.den.scale(c)) == f


def test_evaluation_is_a_homomorphism():
    r = rng(5)
    for _ in range(CASES):
        f, g = rational(r, 1), rational(r, 1)
        b = bindings(r)
        s = complex(r.uniform(0.5, 3), r.uniform(-2, 2))
        try:
            fv, gv = rat_eval(f, b, s), rat_eval(g, b, s)
        except EvalPole:
            continue
        assert rat_eval(f + g, b, s) == pytest.approx(fv + gv, rel=1e-9, abs=1e-12)
        assert rat_eval(f * g, b, s) == pytest.approx(fv * gv, rel=1e-9, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.fractions(max_denominator=20), min_size=1, max_size=4),
       st.lists(st.fractions(max_denominator=20), min_size=1, max_size=4))
def test_numeric_canonical_form_is_reduced(num, den):
    if not any(den):
        return
    f = rat_make(SPoly(num), SPoly(den))
    assert f.den.leading().constant_value() == 1
    assert rat_eq(f, RationalFn(SPoly(num)) / RationalFn(SPoly(den))) if any(num) else f == ZERO


def test_struct_ops_agree_with_functions():
    f, g = gamma / (S + alpha), const(3) / S
    assert f + g == rat_add(f, g) and f * g == rat_mul(f, g)
