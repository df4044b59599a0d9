"""Linear constant-coefficient ODE models and their Laplace-domain derivation.

A model relates output ``y`` and input ``u`` by

    sum_k out_coeffs[k] * y^(k)(t) = sum_k in_coeffs[k] * u^(k)(t)

Under zero initial conditions each ``k``-th derivative transforms to
``s**k`` times the signal's transform, which turns the equation into
``out_poly(s) * Y(s) = in_poly(s) * U(s)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from . import obligations as obl
from .errors import EmptyCoefficients, ImproperSystem, ZeroLeadingCoefficient
from .obligations import INPUT_TRANSFORM
from .symbolic import ParamPoly, RationalFn, SPoly, check_param_name, cross_difference, rat_eq, render
from .trace import Certificate, Conclusion, Rule, Step, conclude_equal


@dataclass(frozen=True)
class LinearOde:
    out_coeffs: tuple
    in_coeffs: tuple
    positive_params: frozenset = frozenset()

    @property
    def order(self) -> int:
        return len(self.out_coeffs) - 1

    @property
    def input_order(self) -> int:
        return len(self.in_coeffs) - 1

    def params(self) -> frozenset:
        return frozenset().union(*(c.params() for c in self.out_coeffs + self.in_coeffs))

    def scaled(self, q) -> "LinearOde":
        return LinearOde(
            tuple(c.scale(q) for c in self.out_coeffs),
            tuple(c.scale(q) for c in self.in_coeffs),
            self.positive_params,
        )

    def __str__(self) -> str:
        def side(coeffs, sig):
            terms = []
            for k, c in enumerate(coeffs):
                if c.is_zero():
                    continue
                d = sig if k == 0 else (f"d{sig}/dt" if k == 1 else f"d^{k}{sig}/dt^{k}")
                terms.append(d if c == 1 else f"({c})*{d}")
            return " + ".join(reversed(terms)) or "0"

        return f"{side(self.out_coeffs, 'y')} = {side(self.in_coeffs, 'u')}"


def ode_make(
    out_coeffs: Sequence, in_coeffs: Sequence, positive_params: Iterable[str] = ()
) -> LinearOde:
    """Validated :class:`LinearOde` (coefficients lowest derivative first)."""
    outs = tuple(ParamPoly.coerce(c) for c in out_coeffs)
    ins = [ParamPoly.coerce(c) for c in in_coeffs]
    if not outs or not ins:
        raise EmptyCoefficients("both coefficient lists must be non-empty")
    if outs[-1].is_zero():
        raise ZeroLeadingCoefficient("highest-order output coefficient is zero")
    while len(ins) > 1 and ins[-1].is_zero():
        ins.pop()
    if len(ins) > len(outs):
        raise ImproperSystem(
            f"input order {len(ins) - 1} exceeds output order {len(outs) - 1}"
        )
    positive = frozenset(check_param_name(p) for p in positive_params)
    return LinearOde(outs, tuple(ins), positive)


def characteristic_polys(ode: LinearOde) -> tuple:
    """``(out_poly, in_poly)``: each derivative order k replaced by ``s**k``."""
    return SPoly(ode.out_coeffs), SPoly(ode.in_coeffs)


class DerivationResult(NamedTuple):
    tf: RationalFn
    obligations: list
    certificate: Certificate


def _deriv_term(coeff: ParamPoly, k: int) -> SPoly:
    return SPoly.const(coeff) * SPoly.s(k)


def derive_tf(ode: LinearOde) -> DerivationResult:
    """Transfer function ``Y(s)/U(s) = in_poly/out_poly`` with its side conditions."""
    out_poly, in_poly = characteristic_polys(ode)
    steps = []
    sides = []
    for role, coeffs in (("y", ode.out_coeffs), ("u", ode.in_coeffs)):
        terms = []
        for k, c in enumerate(coeffs):
            if c.is_zero():
                continue
            t = str(_deriv_term(c, k))
            steps.append(Step(Rule.LAPLACE_DERIV_RULE, (role, str(SPoly.const(c)), str(k)), t))
            terms.append(t)
        sides.append(tuple(terms))
    tf = RationalFn(in_poly, out_poly)
    steps.append(Step(Rule.LAPLACE_LINEARITY, tuple(sides), render(tf)))

    n = ode.order
    where = f"derive_tf[order {n}]"
    obligations: list = [obl.positivity(p, f"{where}: declared positive") for p in sorted(ode.positive_params)]
    obligations += [
        obl.differentiability(f"{where}: derivative rule", max(n, 1)),
        obl.laplace_exists("u", f"{where}: transform of u and its derivatives up to order {ode.input_order}"),
        obl.laplace_exists("y", f"{where}: transform of y and its derivatives up to order {n}"),
        obl.zero_init_cond(f"{where}: derivative rule", max(n, 1)),
        obl.nonzero_denom(INPUT_TRANSFORM, f"{where}: division by the input transform"),
        obl.nonzero_denom(out_poly, f"{where}: division by the characteristic polynomial"),
    ]
    r = render(tf)
    cert = Certificate(tuple(steps), tuple(obligations), Conclusion(r, r))
    return DerivationResult(tf, obligations, cert)


@dataclass(frozen=True)
class EquivalenceReport:
    equivalent: bool
    lhs: RationalFn
    rhs: RationalFn
    difference: SPoly
    obligations: tuple
    certificate: Certificate

    def __str__(self) -> str:
        verdict = "EQUIVALENT" if self.equivalent else "NOT EQUIVALENT"
        return f"{render(self.lhs)}\n{render(self.rhs)}\n{verdict}"


def _unpack(x) -> tuple:
    if isinstance(x, RationalFn):
        return x, [], None
    if isinstance(x, DerivationResult):
        return x.tf, list(x.obligations), x.certificate
    fn, obs, *rest = x
    return fn, list(obs), (rest[0] if rest else None)


def check_equivalence(a, b) -> EquivalenceReport:
    """Decide ``a == b`` by cross-multiplication.

    ``a`` and ``b`` may be a :class:`DerivationResult`, a block-diagram
    ``Reduction``, an ``(fn, obligations)`` pair or a bare ``RationalFn``.
    The report carries the union of both obligation ledgers and a
    certificate whose last step is the ``CrossMultEq`` check.
    """
    fa, oa, ca = _unpack(a)
    fb, ob, cb = _unpack(b)
    obligations = tuple(obl.merge(oa, ob))
    steps = (ca.steps if ca else ()) + (cb.steps if cb else ())
    base = Certificate(steps, obligations, Conclusion(render(fa), render(fa)))
    cert = conclude_equal(base, fa, fb)
    return EquivalenceReport(rat_eq(fa, fb), fa, fb, cross_difference(fa, fb), obligations, cert)

